#pragma once

#include "udw/quadrature.hpp"
#include "udw/wick.hpp"

namespace udw {

struct QuadSpec {
  int nodes = 64;        // Gauss-Legendre order per time axis
  double window = 8.0;   // Gaussian switching support, in widths
  double tol = 1e-12;    // node-doubling convergence target
  int max_nodes = 1024;
  bool adaptive = true;
};

// One external field quantum.
struct Quantum {
  bool anti = false;  // antiparticle (b-type)
  IVec l{};
  int s2 = 0;  // spinor spin
};

struct ExternalState {
  std::vector<bool> detector_excited = {false};  // per detector id
  std::vector<Quantum> quanta;
};

// A diagram is an equivalence class of Wick contractions of the amplitude
// word: pairings related by swapping the two identical field slots of a
// model-2 vertex share one diagram, and the class size is the symmetry
// factor.
struct Diagram {
  int order = 2;
  std::vector<int> vertex_det;  // detector id powering each vertex
  OperatorWord word;            // vertex times are placeholders (tags set)
  Pairing pairing;              // class representative
  int symmetry_factor = 1;
  int sign = 1;
};

// Amplitude word <out| U^(order) |0, g...g>: field annihilators and sigma-
// for excited detectors in the prefix (detector operators innermost), one
// monopole + field group per vertex.
OperatorWord build_amplitude_word(const WickContext& ctx, int model, int order,
                                  const ExternalState& out,
                                  const std::vector<int>& vertex_det);

std::vector<Diagram> enumerate_diagrams(const WickContext& ctx, int model,
                                        int order, const ExternalState& out,
                                        int n_detectors = 1);

// (-i)^order prod_v lambda_v int (time simplex) prod chi_v *
// symmetry_factor * pairing product. Evaluated orders: 1 and 2.
cplx amplitude(const Diagram& d, const WickContext& ctx,
               const std::vector<DetectorSpec>& dets, const QuadSpec& q);

// Sum of all diagrams for the external state.
cplx amplitude_sum(const WickContext& ctx, int model, int order,
                   const ExternalState& out,
                   const std::vector<DetectorSpec>& dets, const QuadSpec& q);

// Boundary factors of external legs on a diagram evaluated at time t
// (and window start t0 for a through-going excited detector).
struct Leg {
  enum class Kind {
    ScalarOut,
    SpinorParticleOut,
    SpinorAntiparticleOut,
    DetectorGround,
    DetectorExcited
  };
  Kind kind = Kind::ScalarOut;
  IVec l{};
  int s2 = 0;
};
cplx leg_factor(const CavityField& f, const Leg& leg, double Omega, double t,
                double t0 = 0.0);

// Spectral decomposition of the second-order vacuum loop:
//   A2 = -lambda^2 sum_j w_j I(nu_j),  sum_a |A1_a|^2 = lambda^2 sum_j w_j
//   |chitilde(nu_j)|^2,
// with I(nu) the simplex integral of chi chi e^{-i nu (t1-t2)}. Quadratic
// vertices carry the joint smearing |ptilde(k+p)|^2.
struct SpectralLine {
  double nu;
  double weight;
};
std::vector<SpectralLine> loop_spectrum(const CavityField& f,
                                        const DetectorSpec& det, int cutoff);

// P_{0,g->g} = 1 + 2 Re A2 at second order.
double vnrp_second_order(const CavityField& f, const DetectorSpec& det,
                         int cutoff, const QuadSpec& q);

// |sum_a |A1|^2 + 2 Re A2| with both sides at the same cutoff (or at
// cutoff and cutoff_a1 to demonstrate the mismatch failure mode).
double unitarity_residual(const CavityField& f, const DetectorSpec& det,
                          int cutoff, const QuadSpec& q, int cutoff_a1 = -1);

// Leading-order excitation swap between two detectors coupled to the same
// quadratic field (model 3 or 4): detA starts excited, final state is
// detA ground, detB excited, one particle + one antiparticle (lowest modes
// unless given).
cplx two_detector_swap(const WickContext& ctx, const DetectorSpec& detA,
                       const DetectorSpec& detB, const Quantum& particle,
                       const Quantum& antiparticle, const QuadSpec& q);

// Adjacency text export for the CLI `diagrams` subcommand.
std::string diagram_text(const Diagram& d, const WickContext& ctx);

}  // namespace udw
