#include <cmath>

#include "coretail/solvers.hpp"
#include "doctest.h"

using namespace coretail;

TEST_CASE("bisect finds a bracketed root") {
  const double r = bisect([](double x) { return x * x - 2; }, 1.0, 2.0);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("bisect rejects same-sign brackets") {
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1; }, -1.0, 1.0),
                  NoSignChange);
}

TEST_CASE("newton converges with a flat derivative via the safeguard") {
  const double r = newton([](double x) { return x * x * x; },
                          [](double x) { return 3 * x * x; }, 1.0, -1.0, 1.0);
  CHECK(std::abs(r) < 1e-4);  // |f| = |r|^3 <= tol_f
  CHECK(std::abs(r * r * r) <= 1e-11);
}

TEST_CASE("newton matches bisect on a well-behaved problem") {
  auto f = [](double x) { return std::cos(x) - x; };
  auto df = [](double x) { return -std::sin(x) - 1; };
  const double r = newton(f, df, 0.5, 0.0, 1.0);
  CHECK(r == doctest::Approx(0.7390851332151607).epsilon(1e-10));
}

TEST_CASE("newton requires a bracket") {
  CHECK_THROWS_AS(newton([](double x) { return x * x + 1; },
                         [](double x) { return 2 * x; }, 0.5, 0.0, 1.0),
                  NoSignChange);
}

TEST_CASE("one-dimensional simplex finds a quadratic minimum") {
  const double x = nelder_mead_1d([](double v) { return (v - 3) * (v - 3); },
                                  0.0, 0.5);
  CHECK(x == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("simplex respects bounds") {
  const double x = nelder_mead_1d([](double v) { return (v - 3) * (v - 3); },
                                  0.5, 0.2, {}, 0.0, 1.0);
  CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("simplex handles a non-smooth objective") {
  const double x =
      nelder_mead_1d([](double v) { return std::abs(v - 1.25); }, 4.0, 1.0);
  CHECK(x == doctest::Approx(1.25).epsilon(1e-5));
}

TEST_CASE("max_iter is honoured") {
  SolverConfig cfg;
  cfg.max_iter = 3;
  cfg.tol_x = 0;  // force the iteration cap to bite
  cfg.tol_f = 0;
  CHECK_THROWS_AS(
      bisect([](double x) { return x - 0.1234567; }, 0.0, 1e9, cfg),
      MaxIterExceeded);
}
