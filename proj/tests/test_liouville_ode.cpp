#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "oracles/closed_forms.hpp"
#include "qvortex/liouville_ode.hpp"

using namespace qvortex;

namespace {

double max_error_a0(double tol, double r_end = 2.5) {
  const auto prof = integrate_family(0.0, r_end, tol);
  double err = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = r_end * i / 2000.0;
    err = std::max(err, std::abs(prof.v1(r) - oracle::v_a0(r)));
  }
  return err;
}

}  // namespace

TEST_CASE("a = 0 matches 2 ln(1 - r^2/8) on [0, 2.5]") {
  const auto t0 = std::chrono::steady_clock::now();
  const double err = max_error_a0(1e-10);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(err <= 1e-8);
  CHECK(secs < 1.0);
}

TEST_CASE("a = 0 endpoint values at r1 = 2") {
  const auto prof = integrate_family(0.0, 2.0, 1e-10);
  CHECK(prof.v1(2.0) == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-9));
  CHECK(prof.dv1(2.0) == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(prof.r_max() == doctest::Approx(2.0));
}

TEST_CASE("a = -1/4 reproduces -r^2/4") {
  const auto prof = integrate_family(-0.25, 4.0, 1e-10);
  double err = 0.0, derr = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = 4.0 * i / 1000.0;
    err = std::max(err, std::abs(prof.v1(r) - oracle::v_quarter(r)));
    derr = std::max(derr, std::abs(prof.dv1(r) - oracle::dv_quarter(r)));
  }
  CHECK(err <= 1e-8);
  CHECK(derr <= 1e-8);
  const auto p1 = integrate_family(-0.25, 1.0, 1e-10);
  CHECK(p1.v1(1.0) == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(p1.dv1(1.0) == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("origin: v(0) = v'(0) = 0 and v''(0) = -1/2 for any a") {
  for (double a : {-5.0, -1.0, -0.25, 0.0, 0.3}) {
    CAPTURE(a);
    const auto prof = integrate_family(a, 1.0, 1e-10);
    CHECK(prof.nodes().front().r1 == 0.0);
    CHECK(prof.nodes().front().v1 == 0.0);
    CHECK(prof.nodes().front().dv1 == 0.0);
    CHECK(prof.r_start() <= 1e-2);
    // v'(h)/h -> v''(0)
    const double h = 1e-4;
    CHECK(prof.dv1(h) / h == doctest::Approx(-0.5).epsilon(1e-6));
  }
}

TEST_CASE("a = 0 cannot pass the barrier at 2 sqrt(2)") {
  try {
    integrate_family(0.0, 3.0, 1e-10);
    FAIL("expected BlowUp");
  } catch (const BlowUp& e) {
    CHECK(e.r_reached() < 2.0 * std::sqrt(2.0));
    CHECK(e.r_reached() > 2.8);
  }
}

TEST_CASE("v' < 0 and v decreasing for a in [-5, 0]") {
  for (double a = -5.0; a <= 0.0; a += 0.5) {
    CAPTURE(a);
    const auto prof = integrate_family(a, 2.5, 1e-9);
    double prev = 0.0;
    for (int i = 1; i <= 500; ++i) {
      const double r = 2.5 * i / 500.0;
      const auto n = prof.at(r);
      REQUIRE(n.dv1 < 0.0);
      REQUIRE(n.v1 < prev);
      prev = n.v1;
    }
  }
}

TEST_CASE("residual at dense-output points stays below 100 tol") {
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    for (double a : {-2.0, -0.25, 0.0}) {
      CAPTURE(tol);
      CAPTURE(a);
      const auto prof = integrate_family(a, 2.5, tol);
      double worst = 0.0;
      for (int i = 1; i <= 997; ++i) worst = std::max(worst, prof.residual(2.5 * i / 997.0));
      CHECK(worst <= 100 * tol);
    }
  }
}

TEST_CASE("tighter tolerance reduces the error against the closed form") {
  const double e6 = max_error_a0(1e-6);
  const double e8 = max_error_a0(1e-8);
  const double e10 = max_error_a0(1e-10);
  CHECK(e8 < e6);
  CHECK(e10 < e8);
  // With error ~ tol^(p/(p+1)) for a 5(4) pair, 100x tol gives 40-100x error.
  CHECK(e6 / e8 > 10.0);
  CHECK(e8 / e10 > 10.0);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(integrate_family(0.0, 0.0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(integrate_family(0.0, -1.0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(integrate_family(0.0, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate_family(0.0, 1.0, 1e-15), std::invalid_argument);
  CHECK_NOTHROW(integrate_family(0.0, 1.0, 1e-14));
  CHECK_NOTHROW(integrate_family(0.0, 1.0, 1e-4));
}

TEST_CASE("tiny r1_end is served by the origin series") {
  const auto prof = integrate_family(-1.0, 1e-3, 1e-10);
  CHECK(prof.v1(1e-3) == doctest::Approx(-0.25e-6).epsilon(1e-6));
}

TEST_CASE("profile CSV has a versioned header and one row per node") {
  const auto prof = integrate_family(-0.5, 2.0, 1e-8);
  std::ostringstream out;
  write_profile_csv(prof, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# qvortex profile v1", 0) == 0);
  std::getline(in, line);
  CHECK(line == "r1,v1,dv1");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == prof.nodes().size());
}
