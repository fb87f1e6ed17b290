#include <cmath>
#include <limits>
#include <vector>

#include "coretail/rng.hpp"
#include "coretail/sample.hpp"
#include "doctest.h"

using namespace coretail;

TEST_CASE("ingestion sorts, deduplicates uniques and filters") {
  const auto s = SortedSample::from_values({3, 1, 2, 2});
  CHECK(s.values() == std::vector<double>{1, 2, 2, 3});
  CHECK(s.uniques() == std::vector<double>{1, 2, 3});
  CHECK(s.size() == 4);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto t = SortedSample::from_values({1, nan, 2, 3});
  CHECK(t.values() == std::vector<double>{1, 2, 3});

  CHECK_THROWS_AS(SortedSample::from_values({0.5, 0.0}), NonPositiveValue);
  CHECK_THROWS_AS(SortedSample::from_values({1.0, -2.0}), NonPositiveValue);
  CHECK_THROWS_AS(SortedSample::from_values({1.0}), EmptyInput);
  CHECK_THROWS_AS(SortedSample::from_values({nan, nan, 1.0}), EmptyInput);
}

TEST_CASE("split statistics at a threshold") {
  const auto s = SortedSample::from_values({1, 2, 3, 4});

  SUBCASE("interior threshold") {
    const auto st = s.split_at(2.5);
    CHECK(st.n_core == 2);
    CHECK(st.n_tail == 2);
    CHECK(st.mean_core == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(st.mean_ln_tail ==
          doctest::Approx(0.5 * (std::log(3) + std::log(4))).epsilon(1e-14));
  }
  SUBCASE("threshold on an observation goes to the core") {
    const auto st = s.split_at(2.0);
    CHECK(st.n_core == 2);
    CHECK(st.n_tail == 2);
  }
  SUBCASE("all-tail split") {
    const auto st = s.split_at(0.5);
    CHECK(st.n_core == 0);
    CHECK(st.n_tail == 4);
  }
  SUBCASE("counts always add up") {
    for (double xm : {0.1, 1.0, 2.0, 3.9, 4.0, 9.0}) {
      const auto st = s.split_at(xm);
      CHECK(st.n == st.n_core + st.n_tail);
    }
  }
}

TEST_CASE("interval iteration") {
  SUBCASE("three distinct values give two intervals") {
    const auto s = SortedSample::from_values({1, 2, 3});
    const auto ivs = s.intervals();
    REQUIRE(ivs.size() == 2);
    CHECK(ivs[0].index == 1);
    CHECK(ivs[0].lo == 1);
    CHECK(ivs[0].hi == 2);
    CHECK(ivs[0].stats.n_core == 1);
    CHECK(ivs[1].lo == 2);
    CHECK(ivs[1].hi == 3);
    CHECK(ivs[1].stats.n_core == 2);
  }
  SUBCASE("duplicates collapse") {
    const auto s = SortedSample::from_values({1, 1, 2});
    const auto ivs = s.intervals();
    REQUIRE(ivs.size() == 1);
    CHECK(ivs[0].lo == 1);
    CHECK(ivs[0].hi == 2);
    CHECK(ivs[0].stats.n_core == 2);
  }
  SUBCASE("interval stats match split_at on the left edge") {
    const auto s = SortedSample::from_values({0.5, 1.5, 1.5, 2.5, 7.5, 9});
    for (const auto& iv : s.intervals()) {
      const auto st = s.split_at(iv.lo);
      CHECK(iv.stats.n_core == st.n_core);
      CHECK(iv.stats.mean_ln_tail == st.mean_ln_tail);
      CHECK(iv.stats.mean_core == st.mean_core);
    }
  }
}

TEST_CASE("split statistics are constant inside an interval") {
  CounterRng rng{99};
  std::vector<double> vals;
  for (int i = 0; i < 200; ++i) vals.push_back(0.1 + 5 * rng.uniform01(i));
  const auto s = SortedSample::from_values(vals);
  for (const auto& iv : s.intervals()) {
    const double mid = iv.lo + 0.37 * (iv.hi - iv.lo);
    const auto a = s.split_at(iv.lo);
    const auto b = s.split_at(mid);
    CHECK(a.n_core == b.n_core);
    CHECK(a.mean_ln_core == b.mean_ln_core);
    CHECK(a.mean_ln_tail == b.mean_ln_tail);
  }
}

TEST_CASE("core count grows and tail count shrinks along the scan") {
  CounterRng rng{7};
  std::vector<double> vals;
  for (int i = 0; i < 500; ++i)
    vals.push_back(std::exp(4 * rng.uniform01(i) - 2));
  const auto s = SortedSample::from_values(vals);
  std::size_t prev_core = 0;
  std::size_t prev_tail = s.size();
  for (const auto& iv : s.intervals()) {
    CHECK(iv.stats.n_core >= prev_core);
    CHECK(iv.stats.n_tail <= prev_tail);
    prev_core = iv.stats.n_core;
    prev_tail = iv.stats.n_tail;
  }
}

TEST_CASE("prefix means agree with direct summation") {
  CounterRng rng{12345};
  std::vector<double> vals;
  for (int i = 0; i < 20000; ++i)
    vals.push_back(std::exp(10 * rng.uniform01(i) - 5));
  const auto s = SortedSample::from_values(vals);
  for (double xm : {0.01, 0.4, 1.0, 30.0, 140.0}) {
    const auto st = s.split_at(xm);
    double sln_core = 0, sx_core = 0, sln_tail = 0;
    for (double v : s.values()) {
      if (v <= xm) {
        sln_core += std::log(v);
        sx_core += v;
      } else {
        sln_tail += std::log(v);
      }
    }
    if (st.n_core > 0) {
      CHECK(st.mean_ln_core ==
            doctest::Approx(sln_core / st.n_core).epsilon(1e-12));
      CHECK(st.mean_core == doctest::Approx(sx_core / st.n_core).epsilon(1e-12));
    }
    if (st.n_tail > 0)
      CHECK(st.mean_ln_tail ==
            doctest::Approx(sln_tail / st.n_tail).epsilon(1e-12));
  }
}

TEST_CASE("tail log-average exceeds ln x_min whenever the tail is non-empty") {
  CounterRng rng{3};
  std::vector<double> vals;
  for (int i = 0; i < 300; ++i) vals.push_back(0.2 + rng.uniform01(i));
  const auto s = SortedSample::from_values(vals);
  for (const auto& iv : s.intervals())
    CHECK(iv.stats.mean_ln_tail - std::log(iv.lo) > 0);
}
