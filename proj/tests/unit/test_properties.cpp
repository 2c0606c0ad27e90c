#include <doctest.h>

#include "properties.hpp"

namespace {

void check(const props::Outcome& o) {
  INFO(o.name << ": worst " << o.worst << " over " << o.cases << " cases");
  CHECK(o.pass);
  CHECK(o.cases > 0);
}

} // namespace

TEST_CASE("projection primitives are nonnegative") { check(props::projection_positivity(1)); }
TEST_CASE("projection keeps primitive order") { check(props::projection_preserves_order(2)); }
TEST_CASE("schemes keep nondecreasing data nondecreasing") { check(props::monotonicity_preservation(3)); }
TEST_CASE("maximum principle") { check(props::maximum_principle(4)); }
TEST_CASE("L1 contraction") { check(props::l1_contraction(5)); }
TEST_CASE("one-sided Lipschitz constant does not grow") { check(props::dlip_nonincrease()); }
TEST_CASE("W1 metric axioms") { check(props::w1_metric_axioms(6)); }
