#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "udw/series.hpp"

using namespace udw;

TEST_CASE("neumaier summation beats naive accumulation") {
  // alternating large/small magnitudes
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NeumaierSum acc;
  long double exact = 0.0;
  double naive = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = (i % 2 == 0) ? 1e16 * u(rng) : u(rng) - 1e16 * 0.0;
    acc.add(x);
    naive += x;
    exact += static_cast<long double>(x);
  }
  const double err_comp = std::abs(static_cast<double>(
      (static_cast<long double>(acc.value()) - exact) / exact));
  const double err_naive = std::abs(static_cast<double>(
      (static_cast<long double>(naive) - exact) / exact));
  CHECK(err_comp <= err_naive);
  CHECK(err_comp < 1e-15);
}

TEST_CASE("cutoff schedule is geometric and ends at the cutoff") {
  const auto s = cutoff_schedule(4000);
  CHECK(s.back() == 4000);
  CHECK(s.size() >= 4);
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  const auto tiny = cutoff_schedule(4);
  CHECK(tiny.size() >= 4);
  CHECK(tiny.back() == 4);
}

TEST_CASE("convergence verdicts") {
  std::vector<int> cuts = {16, 32, 64, 128, 256, 512, 1024};

  SUBCASE("geometric tail -> Converged") {
    // partial sums of sum 2^-j against cutoff doubling
    std::vector<double> vals;
    double v = 0.0, inc = 0.125;
    for (size_t j = 0; j < cuts.size(); ++j) {
      v += inc;
      inc /= 2;
      vals.push_back(v);
    }
    const auto d = convergence_diagnose(cuts, vals, 1e-2);
    CHECK(d.verdict == Verdict::Converged);
    CHECK(d.tail_bound > 0.0);
    CHECK(d.tail_bound < 1e-2);
  }

  SUBCASE("log growth -> LogDivergent") {
    std::vector<double> vals;
    for (int c : cuts) vals.push_back(0.3 * std::log(c));
    const auto d = convergence_diagnose(cuts, vals, 1e-10);
    CHECK(d.verdict == Verdict::LogDivergent);
    CHECK(d.slope == doctest::Approx(0.3).epsilon(1e-9));
  }

  SUBCASE("power growth -> Divergent") {
    std::vector<double> vals;
    for (int c : cuts) vals.push_back(1e-4 * c * c);
    const auto d = convergence_diagnose(cuts, vals, 1e-10);
    CHECK(d.verdict == Verdict::Divergent);
  }

  SUBCASE("tolerance decides") {
    std::vector<double> vals;
    double v = 0.0, inc = 0.125;
    for (size_t j = 0; j < cuts.size(); ++j) {
      v += inc;
      inc /= 2;
      vals.push_back(v);
    }
    CHECK(convergence_diagnose(cuts, vals, 1e-12).verdict !=
          Verdict::Converged);
  }

  CHECK_THROWS_AS(convergence_diagnose({1, 2}, {0.0, 0.0}, 1e-10),
                  std::invalid_argument);
}

TEST_CASE("tail estimates") {
  const std::vector<double> vals = {1.0, 1.5, 1.75, 1.875};
  const auto t = tail_estimates(vals);
  CHECK(t.size() == 4);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 0.0);
  // ratio 1/2: tail = inc * r / (1-r) = inc
  CHECK(t[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t[3] == doctest::Approx(0.125).epsilon(1e-12));
}
