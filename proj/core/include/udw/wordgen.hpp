#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "udw/oracle.hpp"

namespace udw {

// Random operator words with distinct group times, bounded symbol count,
// and well-formed spinor index labels. Used to cross-check the contraction
// engine against the brute-force evaluation.
class RandomWordGenerator {
 public:
  RandomWordGenerator(const CavityField& f, int cutoff, unsigned seed,
                      int max_symbols = 8)
      : f_(f), cutoff_(cutoff), max_symbols_(max_symbols), rng_(seed) {}

  OperatorWord next() {
    for (;;) {
      OperatorWord w = (f_.kind == FieldKind::Spinor) ? spinor_word()
                                                      : scalar_word();
      if (count_symbols(w) <= max_symbols_) return w;
    }
  }

 private:
  CavityField f_;
  int cutoff_;
  int max_symbols_;
  std::mt19937 rng_;

  static int count_symbols(const OperatorWord& w) {
    int c = static_cast<int>(w.prefix.size() + w.suffix.size());
    for (const auto& g : w.groups) c += static_cast<int>(g.syms.size());
    return c;
  }

  double pos() { return 0.125 * static_cast<double>(rng_() % 8); }
  int spin() { return (rng_() % 2) ? +1 : -1; }

  IVec mode() {
    const int nz = 1 + static_cast<int>(rng_() % (2 * cutoff_));
    return IVec{{nz <= cutoff_ ? nz : cutoff_ - nz, 0, 0}};
  }

  std::vector<double> times(size_t n) {
    std::vector<double> pool;
    for (int i = 0; i < 12; ++i) pool.push_back(-0.9 + 0.17 * i);
    std::shuffle(pool.begin(), pool.end(), rng_);
    pool.resize(n);
    return pool;
  }

  OperatorWord scalar_word() {
    const bool cx = f_.kind == FieldKind::ComplexScalar;
    OperatorWord w;
    const size_t nv = 1 + rng_() % 2;
    const bool with_det = rng_() % 2;
    const size_t nmu = with_det ? 1 + rng_() % 2 : 0;
    auto ts = times(nv + nmu);

    size_t ti = 0;
    for (size_t v = 0; v < nv; ++v) {
      const double t = ts[ti++];
      const DVec x{{pos(), 0, 0}};
      if (rng_() % 2) {
        OpGroup g;
        g.normal = true;
        g.syms = {OperatorSymbol::scalar(t, x, cx && (rng_() % 2)),
                  OperatorSymbol::scalar(t, x, cx && (rng_() % 2))};
        w.groups.push_back(g);
      } else {
        w.groups.push_back(
            {{OperatorSymbol::scalar(t, x, cx && (rng_() % 2))}, false});
      }
    }
    for (size_t m = 0; m < nmu; ++m)
      w.groups.push_back({{OperatorSymbol::monopole(ts[ti++])}, false});
    std::shuffle(w.groups.begin(), w.groups.end(), rng_);

    const size_t na = rng_() % 3, nc = rng_() % 3;
    for (size_t i = 0; i < na; ++i)
      w.prefix.push_back(cx && (rng_() % 2)
                             ? OperatorSymbol::ladder_b(mode(), false)
                             : OperatorSymbol::ladder_a(mode(), false));
    for (size_t i = 0; i < nc; ++i)
      w.suffix.push_back(cx && (rng_() % 2)
                             ? OperatorSymbol::ladder_b(mode(), true)
                             : OperatorSymbol::ladder_a(mode(), true));
    if (with_det) {
      w.prefix.push_back(OperatorSymbol::sigma(false));
      w.suffix.insert(w.suffix.begin(), OperatorSymbol::sigma(true));
    }
    return w;
  }

  OperatorWord spinor_word() {
    OperatorWord w;
    const size_t nv = 1 + rng_() % 2;
    const bool with_det = rng_() % 2;
    const size_t nmu = with_det ? 1 : 0;
    auto ts = times(nv + nmu);

    size_t ti = 0;
    for (size_t v = 0; v < nv; ++v) {
      const double t = ts[ti++];
      const DVec x{{pos(), 0, 0}};
      OpGroup g;
      g.normal = true;
      g.syms = {OperatorSymbol::spinor(t, x, true, static_cast<int>(v)),
                OperatorSymbol::spinor(t, x, false, static_cast<int>(v))};
      w.groups.push_back(g);
    }
    for (size_t m = 0; m < nmu; ++m)
      w.groups.push_back({{OperatorSymbol::monopole(ts[ti++])}, false});
    std::shuffle(w.groups.begin(), w.groups.end(), rng_);

    const size_t na = rng_() % 3, nc = rng_() % 3;
    for (size_t i = 0; i < na; ++i)
      w.prefix.push_back(
          rng_() % 2 ? OperatorSymbol::ladder_b(mode(), false, spin())
                     : OperatorSymbol::ladder_a(mode(), false, spin()));
    for (size_t i = 0; i < nc; ++i)
      w.suffix.push_back(
          rng_() % 2 ? OperatorSymbol::ladder_b(mode(), true, spin())
                     : OperatorSymbol::ladder_a(mode(), true, spin()));
    if (with_det) {
      w.prefix.push_back(OperatorSymbol::sigma(false));
      w.suffix.insert(w.suffix.begin(), OperatorSymbol::sigma(true));
    }
    return w;
  }
};

}  // namespace udw
