#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "coretail/rng.hpp"
#include "coretail/santafe.hpp"
#include "doctest.h"

using namespace coretail;
namespace sf = coretail::santafe;

namespace {

// inverse-transform draws from the (numerically normalized) degree weights
std::vector<long> synth_degrees(const sf::Params& p, std::size_t n,
                                std::uint64_t seed) {
  const long kmax = static_cast<long>(p.n_system) - 2;
  std::vector<double> cum(static_cast<std::size_t>(kmax));
  double total = 0;
  for (long k = 1; k <= kmax; ++k) {
    total += sf::pk(p, k);
    cum[static_cast<std::size_t>(k - 1)] = total;
  }
  CounterRng rng{seed};
  std::vector<long> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform01(i) * total;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    out[i] = static_cast<long>(it - cum.begin()) + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("standard normal quantile") {
  CHECK(sf::inv_norm_cdf(0.5) == 0.0);
  CHECK(sf::inv_norm_cdf(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(sf::inv_norm_cdf(0.16) == doctest::Approx(-0.994458).epsilon(1e-5));
  CHECK_THROWS_AS(sf::inv_norm_cdf(0.0), DomainError);
  CHECK_THROWS_AS(sf::inv_norm_cdf(1.0), DomainError);

  SUBCASE("round trip through an erfc-based cdf") {
    CounterRng rng{8};
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const double p = rng.uniform01(i);
      CHECK(sf::norm_cdf(sf::inv_norm_cdf(p)) == doctest::Approx(p).epsilon(1e-9));
    }
  }
  SUBCASE("extreme quantiles stay accurate") {
    for (double p : {1e-12, 1e-9, 1e-4, 1 - 1e-4, 1 - 1e-9}) {
      CHECK(sf::norm_cdf(sf::inv_norm_cdf(p)) ==
            doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("degree weights pk") {
  const sf::Params p{1.5, 0.2, 10000};
  SUBCASE("positive on the whole valid range") {
    for (long k : {1L, 5L, 100L, 5000L, 9998L}) CHECK(sf::pk(p, k) > 0);
  }
  SUBCASE("degree range errors") {
    CHECK_THROWS_AS(sf::pk(p, 0), DomainError);
    CHECK_THROWS_AS(sf::pk(p, 9999), DomainError);
  }
  SUBCASE("rho guard") {
    CHECK_THROWS_AS(sf::pk(sf::Params{1.5, 1e-9, 10000}, 5), InvalidParams);
    CHECK_THROWS_AS(sf::pk(sf::Params{1.5, 0.5, 10000}, 5), InvalidParams);
    CHECK_NOTHROW(sf::pk(sf::Params{1.5, 1e-8, 10000}, 5));
  }
  SUBCASE("the asymptotic form is only approximately normalized") {
    double total = 0;
    for (long k = 1; k <= 9998; ++k) total += sf::pk(p, k);
    MESSAGE("sum of pk over the degree range: ", total);
    CHECK(total > 0.0);  // recorded, not pinned: the form is an approximation
  }
}

TEST_CASE("degree sample construction") {
  CHECK_THROWS_AS(sf::DegreeSample::from_degrees({}, 100), DegenerateSample);
  CHECK_THROWS_AS(sf::DegreeSample::from_degrees({0, 3}, 100), DomainError);
  CHECK_THROWS_AS(sf::DegreeSample::from_degrees({99}, 100), DomainError);
  const auto ds = sf::DegreeSample::from_degrees({1, 2, 3}, 100);
  CHECK(ds.y.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(ds.y[i] ==
          sf::inv_norm_cdf(1.0 - static_cast<double>(i + 1) / 99.0));
}

TEST_CASE("log-likelihood") {
  const sf::Params p{0.8, 0.15, 5000};
  SUBCASE("a single degree reduces to ln pk") {
    const auto ds = sf::DegreeSample::from_degrees({17}, 5000);
    CHECK(sf::log_likelihood(p, ds) ==
          doctest::Approx(sf::log_pk(p, 17)).epsilon(1e-12));
  }
  SUBCASE("matches the sum of ln pk") {
    const auto degrees = synth_degrees(p, 500, 3);
    const auto ds = sf::DegreeSample::from_degrees(degrees, 5000);
    double direct = 0;
    for (long k : degrees) direct += sf::log_pk(p, k);
    CHECK(sf::log_likelihood(p, ds) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
  SUBCASE("N enters only through the -n ln(N-1) term at fixed y") {
    auto ds = sf::DegreeSample::from_degrees({4, 9, 40}, 1000);
    const double base = sf::log_likelihood(sf::Params{0.8, 0.15, 1000}, ds);
    ds.n_system = 4000;  // keep the same y values, change N
    const double moved = sf::log_likelihood(sf::Params{0.8, 0.15, 4000}, ds);
    CHECK(moved - base ==
          doctest::Approx(-3.0 * (std::log(3999.0) - std::log(999.0)))
              .epsilon(1e-12));
  }
}

TEST_CASE("closed-form fit") {
  SUBCASE("constant degrees give rho = 0") {
    const auto ds = sf::DegreeSample::from_degrees({7, 7, 7, 7}, 1000);
    const auto r = sf::fit(ds);
    CHECK(r.rho_hat == 0.0);
  }
  SUBCASE("unit variance clips at the open upper bound") {
    const auto r = sf::fit_from_moments(0.0, 1.0, 50, 1000);
    CHECK(r.rho_hat == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.rho_hat < 0.5);
  }
  SUBCASE("rho_hat reproduces var/(var+1) exactly") {
    const double m1 = 0.4, m2 = 0.9;
    const auto r = sf::fit_from_moments(m1, m2, 100, 1000);
    const double v = m2 - m1 * m1;
    CHECK(r.rho_hat == v / (v + 1));
  }
  SUBCASE("rho_hat only depends on the variance of y") {
    const double m1 = 0.3, m2 = 0.5;
    const auto a = sf::fit_from_moments(m1, m2, 64, 1000);
    const double shift = 1.7;
    const auto b = sf::fit_from_moments(m1 + shift,
                                        m2 + 2 * shift * m1 + shift * shift,
                                        64, 1000);
    CHECK(a.rho_hat == doctest::Approx(b.rho_hat).epsilon(1e-12));
  }
  SUBCASE("order invariance") {
    const sf::Params p{1.0, 0.25, 2000};
    auto degrees = synth_degrees(p, 300, 9);
    const auto r1 = sf::fit(sf::DegreeSample::from_degrees(degrees, 2000));
    std::reverse(degrees.begin(), degrees.end());
    const auto r2 = sf::fit(sf::DegreeSample::from_degrees(degrees, 2000));
    CHECK(r1.t_hat == doctest::Approx(r2.t_hat).epsilon(1e-12));
    CHECK(r1.rho_hat == doctest::Approx(r2.rho_hat).epsilon(1e-12));
  }
  SUBCASE("both t signs are evaluated and the winner maximizes the likelihood") {
    const sf::Params p{1.2, 0.2, 10000};
    const auto ds =
        sf::DegreeSample::from_degrees(synth_degrees(p, 2000, 4), 10000);
    const auto r = sf::fit(ds);
    CHECK(r.loglik == std::max(r.loglik_t_plus, r.loglik_t_minus));
    CHECK(r.sign_note.find("wins") != std::string::npos);
  }
}

TEST_CASE("fitted point is stationary and locally maximal") {
  const sf::Params truth{1.0, 0.2, 10000};
  const auto ds =
      sf::DegreeSample::from_degrees(synth_degrees(truth, 4000, 11), 10000);
  const auto r = sf::fit(ds);
  const double n = static_cast<double>(ds.y.size());
  auto ll = [&](double t, double rho) {
    return sf::log_likelihood(sf::Params{t, rho, 10000}, ds);
  };
  const double h = 1e-6;
  const double gt = (ll(r.t_hat + h, r.rho_hat) - ll(r.t_hat - h, r.rho_hat)) / (2 * h);
  const double gr =
      (ll(r.t_hat, r.rho_hat + h) - ll(r.t_hat, r.rho_hat - h)) / (2 * h);
  CHECK(std::abs(gt) <= 1e-6 * n);
  CHECK(std::abs(gr) <= 1e-6 * n);

  // 21 x 21 local grid probe
  const double center = ll(r.t_hat, r.rho_hat);
  for (int i = -10; i <= 10; ++i)
    for (int k = -10; k <= 10; ++k) {
      const double t = r.t_hat + 2e-4 * i;
      const double rho = r.rho_hat + 2e-4 * k;
      if (rho < sf::kRhoMin || rho >= 0.5) continue;
      CHECK(ll(t, rho) <= center + 1e-9 * std::abs(center));
    }
}

TEST_CASE("synthetic recovery of rho") {
  const double rho_true = 0.2;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const sf::Params p{1.0, rho_true, 10000};
    const auto ds =
        sf::DegreeSample::from_degrees(synth_degrees(p, 3000, seed), 10000);
    const auto r = sf::fit(ds);
    CHECK(std::abs(r.rho_hat - rho_true) <= 0.05);
  }
}
