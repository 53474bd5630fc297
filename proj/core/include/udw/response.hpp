#pragma once

#include "udw/profile.hpp"
#include "udw/series.hpp"

namespace udw {

// Vacuum excitation probabilities at leading order, as partial-sum series
// over the lattice cutoff schedule. Every value is a full re-summation in
// lexicographic mode order with Neumaier compensation, so output is
// bit-identical across runs and thread counts.

// Model 1 (linear coupling):
//   P = lambda^2/(2 L^n) sum_k (1/omega) |chitilde(Omega+omega)|^2 |ptilde(k)|^2
PartialSumSeries vep_linear(const CavityField& f, const DetectorSpec& det,
                            const std::vector<int>& schedule, double tol,
                            int threads = 1);

// Models 2-4 (quadratic couplings), renormalized pair-creation term:
//   models 2,3: lambda^2/(4 L^2n) sum_{k,p} |ptilde(k+p)|^2
//               |chitilde(Omega+w_k+w_p)|^2 / (w_k w_p)
//   model 4:    lambda^2/(2 L^2n) sum_{k,p} W(k,p) |ptilde(k+p)|^2
//               |chitilde(Omega+w_k+w_p)|^2
//   with W = (w_k+m)(w_p+m)/(w_k w_p) |k/(w_k+m) - p/(w_p+m)|^2.
PartialSumSeries vep_pair(const CavityField& f, const DetectorSpec& det,
                          const std::vector<int>& schedule, double tol,
                          int threads = 1);

// Un-renormalized tadpole term that normal ordering removes:
//   models 2,3: lambda^2/(4 L^2n) (sum_k 1/w)^2 |chitilde(Omega)|^2
//   model 4:    lambda^2/(2 L^2n) 8 m^2 (sum_k 1/w)^2 |chitilde(Omega)|^2
PartialSumSeries vep_tadpole(const CavityField& f, const DetectorSpec& det,
                             const std::vector<int>& schedule, double tol);

// Renormalized VEP for any model (model 1 has no tadpole).
PartialSumSeries vep_renormalized(const CavityField& f,
                                  const DetectorSpec& det,
                                  const std::vector<int>& schedule, double tol,
                                  int threads = 1);

inline PartialSumSeries vep_renormalized(const CavityField& f,
                                         const DetectorSpec& det, int cutoff,
                                         double tol, int threads = 1) {
  return vep_renormalized(f, det, cutoff_schedule(cutoff), tol, threads);
}

// Upper bound for model 1, n=1, massless, sudden + pointlike:
//   (lambda^2 L^2 / 2 pi^3) sum_{l=1..lmax} l^-3
double vep_linear_sudden_point_bound(const CavityField& f,
                                     const DetectorSpec& det, long lmax);

}  // namespace udw
