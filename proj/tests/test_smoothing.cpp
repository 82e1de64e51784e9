#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "disloc/smoothing.hpp"

using namespace disloc;

TEST_CASE("quintic profile values") {
  const SmoothingFunction& q = smoothing_catalog("quintic");
  CHECK(q.r(-0.5) == 0.0);
  CHECK(q.r(0.5) == 1.0);
  CHECK(q.r(0.0) == 0.5);
  CHECK(q.r(-0.7) == 0.0);
  CHECK(q.r(0.9) == 1.0);
  CHECK(q.r_prime(0.0) == 1.875);
  CHECK(q.r_prime(-0.5) == 0.0);
  CHECK(q.r_prime(0.5) == 0.0);
  CHECK(q.sup_r_prime() == 1.875);
}

TEST_CASE("catalog profiles validate") {
  for (const char* name : {"quintic", "bump"}) {
    const SmoothingCheck c = validate_smoothing(smoothing_catalog(name));
    CHECK_MESSAGE(c.endpoints_ok, name);
    CHECK_MESSAGE(c.monotone_ok, name);
    CHECK_MESSAGE(c.consistent_ok, name);
    CHECK_MESSAGE(c.unit_mass_err < 1e-8, name);
  }
}

TEST_CASE("bump profile is flat at the ends") {
  const SmoothingFunction& b = smoothing_catalog("bump");
  CHECK(b.r(-0.5) == 0.0);
  CHECK(b.r(0.5) == 1.0);
  CHECK(b.r_prime(-0.5) == 0.0);
  CHECK(b.r_prime(0.5) == 0.0);
  CHECK(b.r(0.4) < 1.0);
  CHECK(b.r(0.4) > 0.99);
  CHECK(b.r_prime(0.4) > 0.0);
  CHECK(b.r_prime(0.0) > 1.0);
}

TEST_CASE("corrupt profile is gated and fails validation") {
  CHECK_THROWS_AS(smoothing_catalog("corrupt"), std::invalid_argument);
  const SmoothingFunction& c = smoothing_catalog("corrupt", /*allow_corrupt=*/true);
  const SmoothingCheck chk = validate_smoothing(c);
  CHECK(!chk.all_ok());
  CHECK(!chk.consistent_ok);
}

TEST_CASE("catalog names") {
  const auto names = smoothing_catalog_names();
  bool qf = false, bf = false;
  for (const auto& n : names) {
    qf = qf || n == "quintic";
    bf = bf || n == "bump";
  }
  CHECK(qf);
  CHECK(bf);
  CHECK_THROWS_AS(smoothing_catalog("no_such_profile"), std::invalid_argument);
}
