#pragma once

#include <map>

#include "udw/wick.hpp"

namespace udw {

// Brute-force truncated Fock space. Tensor factors in listed order:
//   real scalar:    one bosonic factor per mode
//   complex scalar: a factors per mode, then b factors
//   spinor:         a factors per (mode, spin), then b factors (2 levels)
//   detectors:      last, 2 levels each
// All fermionic factors share one global Jordan-Wigner chain in this order.
struct TruncatedSpace {
  struct Factor {
    int levels;
    bool fermionic;
  };

  CavityField field;
  std::vector<IVec> modes;
  std::vector<int> spins;  // {0} scalar, {+1,-1} spinor
  int cap = 2;
  int n_detectors = 1;
  std::vector<Factor> factors;
  std::vector<size_t> stride;
  size_t dim = 0;

  TruncatedSpace(const CavityField& f, std::vector<IVec> mode_set, int cap_,
                 int n_det);

  size_t occ(size_t idx, size_t factor) const {
    return (idx / stride[factor]) % static_cast<size_t>(factors[factor].levels);
  }
  // Factor indices for ladder operators.
  size_t ladder_factor(bool type_b, size_t mode_idx, int s2) const;
  size_t detector_factor(int det_id) const;
};

using FockVec = Eigen::VectorXcd;

// Ladder operator (with Jordan-Wigner parity on fermionic factors) applied
// to a state vector.
FockVec apply_ladder(const TruncatedSpace& sp, size_t factor, bool dagger,
                     const FockVec& v);

// Dense matrix of the same operator, for small spaces.
Eigen::MatrixXcd ladder_matrix(const TruncatedSpace& sp, size_t factor,
                               bool dagger);

// Apply one operator symbol (ladder, sigma, monopole, or field operator with
// its full mode expansion). Spinor field symbols need an index assignment.
FockVec apply_symbol(const TruncatedSpace& sp, const WickContext& ctx,
                     const OperatorSymbol& s, const std::map<int, int>& asg,
                     const FockVec& v);

// <vac| prefix T[groups] suffix |vac> by direct matrix-free evaluation:
// groups are stably sorted by descending time (with fermionic block signs),
// normal-ordered groups are expanded over creator/annihilator parts, spinor
// index labels are summed.
cplx word_vev(const TruncatedSpace& sp, const WickContext& ctx,
              const OperatorWord& w);

// Bosonic occupancy sufficient for an exact vacuum expectation of the word.
int required_cap(const OperatorWord& w, const CavityField& f);

// Direct Schroedinger-picture evolution with
//   H(t) = H_field + H_detector + lambda chi(t) (sigma+ + sigma-) V
// where V is the (normal-ordered for models 2-4) smeared field coupling.
// Midpoint-exponential stepping; initial state vacuum x ground.
struct EvolveResult {
  double p_excited = 0.0;
  double norm_defect = 0.0;  // | ||psi|| - 1 |
};
EvolveResult oracle_evolve(const TruncatedSpace& sp, const WickContext& ctx,
                           const DetectorSpec& det, double t_begin,
                           double t_end, int steps);

}  // namespace udw
