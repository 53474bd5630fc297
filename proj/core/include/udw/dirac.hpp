#pragma once

#include <Eigen/Dense>

#include "udw/lattice.hpp"

namespace udw {

using Mat4 = Eigen::Matrix4cd;
using Spinor = Eigen::Vector4cd;
using BarSpinor = Eigen::RowVector4cd;

// Dirac representation: gamma^0 = diag(1,1,-1,-1), gamma^i off-diagonal
// with Pauli blocks. The n=1 field lives on the same C^4 using gamma^0 and
// gamma^3 only.
inline const Mat4& gamma0() {
  static const Mat4 g = [] {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 2) = m(3, 3) = -1.0;
    return m;
  }();
  return g;
}

inline Eigen::Matrix2cd pauli(int i) {
  Eigen::Matrix2cd s;
  switch (i) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli index must be 1..3");
  }
  return s;
}

inline const Mat4& gamma_sp(int i) {
  static const std::array<Mat4, 3> g = [] {
    std::array<Mat4, 3> out;
    for (int i = 1; i <= 3; ++i) {
      Mat4 m = Mat4::Zero();
      m.block<2, 2>(0, 2) = pauli(i);
      m.block<2, 2>(2, 0) = -pauli(i);
      out[i - 1] = m;
    }
    return out;
  }();
  if (i < 1 || i > 3) throw std::invalid_argument("gamma index must be 1..3");
  return g[i - 1];
}

// slash(k) = omega gamma^0 - k.gamma ; in n=1 the single momentum component
// couples to gamma^3.
inline Mat4 momentum_slash(const CavityField& f, const IVec& l) {
  const double w = f.dispersion(l);
  const DVec k = f.momentum(l);
  Mat4 m = w * gamma0();
  if (f.n == 1) {
    m -= k[0] * gamma_sp(3);
  } else {
    for (int i = 0; i < 3; ++i) m -= k[i] * gamma_sp(i + 1);
  }
  return m;
}

inline Eigen::Vector2cd two_spinor(int s2) {
  if (s2 != 1 && s2 != -1) throw std::invalid_argument("spin must be +-1");
  Eigen::Vector2cd xi = Eigen::Vector2cd::Zero();
  xi(s2 == 1 ? 0 : 1) = 1.0;
  return xi;
}

// Momentum-space amplitudes u (eps=+1) and v (eps=-1), spin s2 = +-1 for
// s = +-1/2. Normalized so that ubar u = 1 (massive) resp. u† u = 1
// (massless).
inline Spinor spinor_amp(const CavityField& f, const IVec& l, int s2,
                         int eps) {
  if (f.kind != FieldKind::Spinor)
    throw std::invalid_argument("spinor amplitude needs a spinor field");
  const double w = f.dispersion(l);
  const DVec k = f.momentum(l);
  const Eigen::Vector2cd xi = two_spinor(s2);

  Eigen::Vector2cd lower;
  double pref;
  if (f.m > 0.0) {
    pref = std::sqrt((w + f.m) / (2.0 * f.m));
    if (f.n == 1)
      lower = (k[0] / (w + f.m)) * (pauli(3) * xi);
    else
      lower = ((k[0] * pauli(1) + k[1] * pauli(2) + k[2] * pauli(3)) /
               (w + f.m)) *
              xi;
  } else {
    pref = 1.0 / std::sqrt(2.0);
    if (f.n == 1)
      lower = (k[0] > 0 ? 1.0 : -1.0) * (pauli(3) * xi);
    else
      lower = ((k[0] * pauli(1) + k[1] * pauli(2) + k[2] * pauli(3)) / w) * xi;
  }

  Spinor out;
  if (eps == +1) {
    out << xi(0), xi(1), lower(0), lower(1);
  } else if (eps == -1) {
    out << lower(0), lower(1), xi(0), xi(1);
  } else {
    throw std::invalid_argument("eps must be +-1");
  }
  return pref * out;
}

inline BarSpinor bar(const Spinor& psi) {
  return psi.adjoint() * gamma0();
}

// Normalization of the mode functions: sqrt(m / (omega L^n)) when massive,
// L^{-n/2} when massless.
inline double spinor_mode_norm(const CavityField& f, const IVec& l) {
  if (f.m > 0.0) return std::sqrt(f.m / (f.dispersion(l) * f.volume()));
  return 1.0 / std::sqrt(f.volume());
}

// Full mode function psi_{k,s,eps}(t,x) = norm * amp * e^{-i eps omega t}
// * e^{+i eps k.x}.
inline Spinor spinor_mode_full(const CavityField& f, const IVec& l, int s2,
                               int eps, double t, const DVec& x) {
  const double w = f.dispersion(l);
  const DVec k = f.momentum(l);
  const cplx phase =
      std::exp(-I * static_cast<double>(eps) * (w * t - k.dot(x)));
  return spinor_mode_norm(f, l) * phase * spinor_amp(f, l, s2, eps);
}

// Spin sums: sum_s u ubar = (slash(k)+m)/2m, sum_s v vbar = (slash(k)-m)/2m
// for m>0; both slash(k)/2omega for m=0.
inline Mat4 spin_sum(const CavityField& f, const IVec& l, int eps) {
  const Mat4 ks = momentum_slash(f, l);
  if (f.m > 0.0)
    return (ks + static_cast<double>(eps) * f.m * Mat4::Identity()) /
           (2.0 * f.m);
  return ks / (2.0 * f.dispersion(l));
}

}  // namespace udw
