#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "udw/lattice.hpp"

namespace udw {

// Neumaier-compensated accumulator; summation order is always the
// lexicographic mode order, so results are bit-reproducible.
struct NeumaierSum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

enum class Verdict { Converged, LogDivergent, Divergent };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "converged";
    case Verdict::LogDivergent: return "log-divergent";
    default: return "divergent";
  }
}

struct Diagnosis {
  Verdict verdict = Verdict::Divergent;
  double value = 0.0;       // last partial sum
  double tail_bound = 0.0;  // geometric tail estimate (converged only)
  double slope = 0.0;       // increment per unit log cutoff (log-divergent)
};

// Mode sum evaluated on an increasing cutoff schedule.
struct PartialSumSeries {
  std::vector<int> cutoffs;
  std::vector<double> values;
  std::vector<double> tail_bounds;  // geometric estimate per cutoff, 0 early
  Diagnosis diagnosis;
};

// Geometric (roughly doubling) cutoff schedule ending exactly at `cutoff`,
// with at least four entries.
inline std::vector<int> cutoff_schedule(int cutoff, int max_points = 12) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  std::vector<int> sched;
  int c = cutoff;
  while (c >= 1 && static_cast<int>(sched.size()) < max_points) {
    sched.push_back(c);
    if (c == 1) break;
    c /= 2;
  }
  std::reverse(sched.begin(), sched.end());
  while (static_cast<int>(sched.size()) < 4) {
    // Tiny cutoffs: pad with repeats removed below; fall back to linear.
    sched.clear();
    for (int v = 1; v <= cutoff; ++v) sched.push_back(v);
    if (static_cast<int>(sched.size()) >= 4) break;
    for (int v = cutoff + 1; static_cast<int>(sched.size()) < 4; ++v)
      sched.push_back(v);
    break;
  }
  sched.erase(std::unique(sched.begin(), sched.end()), sched.end());
  return sched;
}

// Classify the large-cutoff behaviour of a partial-sum sequence on a
// geometric schedule.
//   Converged:    increments decay geometrically and the extrapolated tail
//                 r I / (1-r) falls below tol.
//   LogDivergent: increments per unit log cutoff are positive and stable
//                 (within 35%) over the last three intervals.
//   Divergent:    anything else that keeps growing.
inline Diagnosis convergence_diagnose(const std::vector<int>& cutoffs,
                                      const std::vector<double>& values,
                                      double tol) {
  if (cutoffs.size() != values.size() || cutoffs.size() < 4)
    throw std::invalid_argument("need >= 4 matched cutoff/value points");
  const size_t n = cutoffs.size();
  Diagnosis d;
  d.value = values[n - 1];

  std::vector<double> inc(n - 1), slope(n - 1);
  for (size_t j = 0; j + 1 < n; ++j) {
    inc[j] = values[j + 1] - values[j];
    const double dl = std::log(static_cast<double>(cutoffs[j + 1]) /
                               static_cast<double>(cutoffs[j]));
    slope[j] = inc[j] / dl;
  }
  const double last = std::abs(inc[n - 2]);
  const double prev = std::abs(inc[n - 3]);

  // Geometric decay with extrapolated tail below tol.
  if (last <= tol * 1e-3) {
    d.verdict = Verdict::Converged;
    d.tail_bound = last;
    return d;
  }
  if (prev > 0.0) {
    const double r = last / prev;
    if (r < 0.9) {
      const double tail = last * r / (1.0 - r);
      if (tail < tol) {
        d.verdict = Verdict::Converged;
        d.tail_bound = tail;
        return d;
      }
    }
  }

  // Stable positive increment per log cutoff.
  const size_t k = n - 1;
  if (k >= 3) {
    const double a = slope[k - 3], b = slope[k - 2], c = slope[k - 1];
    if (a > 0.0 && b > 0.0 && c > 0.0) {
      const double lo = std::min({a, b, c}), hi = std::max({a, b, c});
      if (hi / lo < 1.35) {
        d.verdict = Verdict::LogDivergent;
        d.slope = c;
        return d;
      }
    }
  }
  d.verdict = Verdict::Divergent;
  d.slope = slope[k - 1];
  return d;
}

// Per-cutoff geometric tail estimate used in reports; zero where it cannot
// be formed yet.
inline std::vector<double> tail_estimates(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  for (size_t j = 2; j < values.size(); ++j) {
    const double i1 = std::abs(values[j] - values[j - 1]);
    const double i0 = std::abs(values[j - 1] - values[j - 2]);
    if (i0 > 0.0) {
      const double r = i1 / i0;
      out[j] = (r < 1.0) ? i1 * r / (1.0 - r) : i1;
    } else {
      out[j] = i1;
    }
  }
  return out;
}

}  // namespace udw
