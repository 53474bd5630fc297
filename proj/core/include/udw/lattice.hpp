#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace udw {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Integer mode label l and real vectors, padded to 3 spatial components.
// Unused components stay zero for n < 3.
struct IVec {
  std::array<int, 3> c{0, 0, 0};

  int& operator[](int i) { return c[i]; }
  int operator[](int i) const { return c[i]; }
  bool operator==(const IVec& o) const { return c == o.c; }
  bool operator!=(const IVec& o) const { return c != o.c; }
  bool operator<(const IVec& o) const { return c < o.c; }
  IVec operator-() const { return {{-c[0], -c[1], -c[2]}}; }
  IVec operator+(const IVec& o) const {
    return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2]}};
  }
  IVec operator-(const IVec& o) const {
    return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}};
  }
  bool zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }
  int sup_norm() const {
    int m = 0;
    for (int v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

struct DVec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  DVec operator-(const DVec& o) const {
    return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}};
  }
  bool operator==(const DVec& o) const { return c == o.c; }
  double dot(const DVec& o) const {
    return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2];
  }
  double norm2() const { return dot(*this); }
};

enum class FieldKind { RealScalar, ComplexScalar, Spinor };

// Field in a box [-L/2, L/2]^n with periodic boundary conditions.
// Momenta k = 2 pi l / L with l in Z^n \ {0}; the zero mode is excluded.
struct CavityField {
  FieldKind kind = FieldKind::RealScalar;
  int n = 1;        // spatial dimension, 1..3
  double L = 1.0;   // box side
  double m = 0.0;   // mass

  CavityField() = default;
  CavityField(FieldKind k, int dim, double side, double mass)
      : kind(k), n(dim), L(side), m(mass) {
    if (n < 1 || n > 3) throw std::invalid_argument("dimension must be 1..3");
    if (kind == FieldKind::Spinor && n == 2)
      throw std::invalid_argument("spinor field supports n=1 or n=3 only");
    if (L <= 0.0) throw std::invalid_argument("box side must be positive");
    if (m < 0.0) throw std::invalid_argument("mass must be nonnegative");
  }

  DVec momentum(const IVec& l) const {
    const double u = 2.0 * M_PI / L;
    return {{u * l[0], u * l[1], u * l[2]}};
  }

  // omega = sqrt(|k|^2 + m^2); strictly positive since l != 0.
  double dispersion(const IVec& l) const {
    if (l.zero()) throw std::invalid_argument("zero mode excluded");
    return std::sqrt(momentum(l).norm2() + m * m);
  }

  double volume() const { return std::pow(L, n); }

  bool fermionic() const { return kind == FieldKind::Spinor; }
};

// Visit every mode with sup-norm <= cutoff, zero mode excluded, in
// lexicographic order of (l1, l2, l3). Deterministic enumeration order is
// load-bearing: reproducible compensated sums and the oracle basis both
// depend on it.
template <class F>
void for_each_mode(int n, int cutoff, F&& f) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  IVec l;
  const int lo1 = -cutoff, hi1 = cutoff;
  const int lo2 = (n >= 2) ? -cutoff : 0, hi2 = (n >= 2) ? cutoff : 0;
  const int lo3 = (n >= 3) ? -cutoff : 0, hi3 = (n >= 3) ? cutoff : 0;
  for (int a = lo1; a <= hi1; ++a)
    for (int b = lo2; b <= hi2; ++b)
      for (int c = lo3; c <= hi3; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        l[0] = a;
        l[1] = b;
        l[2] = c;
        f(l);
      }
}

inline std::vector<IVec> mode_list(int n, int cutoff) {
  std::vector<IVec> out;
  for_each_mode(n, cutoff, [&](const IVec& l) { out.push_back(l); });
  return out;
}

// Scalar mode function with time dependence:
//   phi_k(t,x) = exp(-i (omega t - k.x)) / sqrt(2 omega L^n)
inline cplx scalar_mode_full(const CavityField& f, const IVec& l, double t,
                             const DVec& x) {
  const double w = f.dispersion(l);
  const DVec k = f.momentum(l);
  return std::exp(-I * (w * t - k.dot(x))) / std::sqrt(2.0 * w * f.volume());
}

// Spatial-only mode phi_k(x) = exp(i k.x) / L^{n/2}.
inline cplx scalar_mode_spatial(const CavityField& f, const IVec& l,
                                const DVec& x) {
  const DVec k = f.momentum(l);
  return std::exp(I * k.dot(x)) / std::sqrt(f.volume());
}

}  // namespace udw
