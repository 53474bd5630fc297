#pragma once

#include "udw/lattice.hpp"

namespace udw {

// Thrown when a time-domain two-point function is requested at equal
// arguments, where the T-ordering is ambiguous.
struct CoincidenceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Switching function chi(t).
//   Sudden:   indicator of [t0, t0+T]
//   Gaussian: exp(-t^2 / 2T^2), centered at t=0
struct Switching {
  enum class Kind { Sudden, Gaussian };
  Kind kind = Kind::Sudden;
  double T = 1.0;   // duration resp. width
  double t0 = 0.0;  // sudden window start

  static Switching sudden(double T, double t0) {
    if (T <= 0.0) throw std::invalid_argument("switching duration must be > 0");
    return {Kind::Sudden, T, t0};
  }
  // Default window centered at zero.
  static Switching sudden(double T) { return sudden(T, -T / 2.0); }
  static Switching gaussian(double T) {
    if (T <= 0.0) throw std::invalid_argument("switching width must be > 0");
    return {Kind::Gaussian, T, 0.0};
  }

  double chi(double t) const {
    if (kind == Kind::Sudden) return (t >= t0 && t <= t0 + T) ? 1.0 : 0.0;
    return std::exp(-t * t / (2.0 * T * T));
  }

  // chitilde(nu) = int dt chi(t) e^{+i nu t}
  //   Sudden:   e^{i nu (t0 + T/2)} 2 sin(nu T / 2) / nu   (-> T at nu=0)
  //   Gaussian: sqrt(2 pi) T e^{-nu^2 T^2 / 2}
  cplx time_fourier(double nu) const {
    if (kind == Kind::Sudden) {
      const double h = nu * T / 2.0;
      const double sinc = (std::abs(h) < 1e-8)
                              ? T * (1.0 - h * h / 6.0)
                              : 2.0 * std::sin(h) / nu;
      return std::exp(I * nu * (t0 + T / 2.0)) * sinc;
    }
    return std::sqrt(2.0 * M_PI) * T * std::exp(-nu * nu * T * T / 2.0);
  }

  // |chitilde(nu)|^2, avoiding the complex phase.
  double sq_fourier(double nu) const {
    if (kind == Kind::Sudden) {
      const double h = nu * T / 2.0;
      if (std::abs(h) < 1e-8) {
        const double s = T * (1.0 - h * h / 6.0);
        return s * s;
      }
      const double s = std::sin(h);
      return 4.0 * s * s / (nu * nu);
    }
    const double e = T * std::exp(-nu * nu * T * T / 2.0);
    return 2.0 * M_PI * e * e;
  }

  // Support used by time quadratures: exact for sudden, +-window*T for
  // Gaussian (tail below 1e-14 at the default 8 widths).
  std::pair<double, double> support(double window = 8.0) const {
    if (kind == Kind::Sudden) return {t0, t0 + T};
    return {-window * T, window * T};
  }
};

// Spatial smearing profile p(x).
//   PointLike: delta at x0
//   Gaussian:  normalized Gaussian of width sigma at x0
struct SpatialProfile {
  enum class Kind { PointLike, Gaussian };
  Kind kind = Kind::PointLike;
  DVec x0{};
  double sigma = 0.0;

  static SpatialProfile point(DVec x = {}) {
    return {Kind::PointLike, x, 0.0};
  }
  static SpatialProfile gaussian(double sigma, DVec x = {}) {
    if (sigma <= 0.0) throw std::invalid_argument("profile width must be > 0");
    return {Kind::Gaussian, x, sigma};
  }

  // ptilde(k) = int dx p(x) e^{-i k.x}
  cplx fourier(const DVec& k) const {
    const cplx ph = std::exp(-I * k.dot(x0));
    if (kind == Kind::PointLike) return ph;
    return ph * std::exp(-k.norm2() * sigma * sigma / 2.0);
  }

  // |ptilde(k)|^2
  double sq_fourier(const DVec& k) const {
    if (kind == Kind::PointLike) return 1.0;
    return std::exp(-k.norm2() * sigma * sigma);
  }
};

// Two-level detector with gap Omega and monopole coupling:
//   model 1: lambda chi mu int p Phi           (real scalar, linear)
//   model 2: lambda chi mu int p :Phi Phi:     (real scalar, quadratic)
//   model 3: lambda chi mu int p :Phi† Phi:    (complex scalar)
//   model 4: lambda chi mu int p :Psibar Psi:  (spinor)
struct DetectorSpec {
  double Omega = 1.0;
  double lambda = 1.0;
  int model = 1;
  Switching switching = Switching::sudden(1.0);
  SpatialProfile profile = SpatialProfile::point();

  void validate(const CavityField& f) const {
    if (model < 1 || model > 4) throw std::invalid_argument("model must be 1..4");
    if (Omega <= 0.0) throw std::invalid_argument("gap must be positive");
    const FieldKind k = f.kind;
    const bool ok = (model == 1 && k == FieldKind::RealScalar) ||
                    (model == 2 && k == FieldKind::RealScalar) ||
                    (model == 3 && k == FieldKind::ComplexScalar) ||
                    (model == 4 && k == FieldKind::Spinor);
    if (!ok) throw std::invalid_argument("model / field kind mismatch");
  }
};

// Feynman propagator of the detector monopole in the ground state:
//   D(t) = e^{-i Omega t} for t > 0, -e^{+i Omega t} for t < 0.
// The coincidence limit is ill defined and rejected.
inline cplx detector_propagator(double Omega, double t) {
  if (t == 0.0) throw CoincidenceLimit("detector propagator at equal times");
  if (t > 0.0) return std::exp(-I * Omega * t);
  return -std::exp(I * Omega * t);
}

}  // namespace udw
