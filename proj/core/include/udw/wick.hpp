#pragma once

#include "udw/dirac.hpp"
#include "udw/profile.hpp"

namespace udw {

// Symbolic second-quantized operators. A word is
//   prefix | T[ groups ] | suffix
// where prefix acts next to the bra (annihilators, sigma-), the groups are
// time-ordered, and the suffix acts on the ket (creators, sigma+).
enum class SymKind {
  LadderA,      // field quanta a / a† (dagger flag)
  LadderB,      // antiquanta b / b†
  SigmaMinus,   // detector lowering, ground-state bra side
  SigmaPlus,    // detector raising, ket side
  Monopole,     // mu(t) = sigma+ e^{+i Omega t} + sigma- e^{-i Omega t}
  ScalarField,  // Phi (dagger = Phi† for the complex field)
  SpinorField   // Psi (dagger = Psibar), carries an open spinor index label
};

struct OperatorSymbol {
  SymKind kind = SymKind::ScalarField;
  bool dagger = false;
  IVec l{};            // ladder mode
  int s2 = 0;          // ladder spin (+-1, spinor field only)
  double t = 0.0;      // field / monopole time argument
  DVec x{};            // field position
  int prof = -1;       // >= 0: smeared against context profile, x ignored
  int det_id = 0;      // detector id for sigma / monopole
  int spin_label = 0;  // open spinor index label (SpinorField)
  int vertex = -1;     // optional vertex tag, used to reassign times

  static OperatorSymbol ladder_a(IVec l, bool dag, int s2 = 0) {
    OperatorSymbol s;
    s.kind = SymKind::LadderA;
    s.l = l;
    s.dagger = dag;
    s.s2 = s2;
    return s;
  }
  static OperatorSymbol ladder_b(IVec l, bool dag, int s2 = 0) {
    OperatorSymbol s = ladder_a(l, dag, s2);
    s.kind = SymKind::LadderB;
    return s;
  }
  static OperatorSymbol sigma(bool plus, int det = 0) {
    OperatorSymbol s;
    s.kind = plus ? SymKind::SigmaPlus : SymKind::SigmaMinus;
    s.det_id = det;
    return s;
  }
  static OperatorSymbol monopole(double t, int det = 0) {
    OperatorSymbol s;
    s.kind = SymKind::Monopole;
    s.t = t;
    s.det_id = det;
    return s;
  }
  static OperatorSymbol scalar(double t, DVec x, bool dag = false) {
    OperatorSymbol s;
    s.kind = SymKind::ScalarField;
    s.t = t;
    s.x = x;
    s.dagger = dag;
    return s;
  }
  static OperatorSymbol spinor(double t, DVec x, bool barred, int label) {
    OperatorSymbol s;
    s.kind = SymKind::SpinorField;
    s.t = t;
    s.x = x;
    s.dagger = barred;
    s.spin_label = label;
    return s;
  }
};

struct OpGroup {
  std::vector<OperatorSymbol> syms;
  bool normal = false;  // normal-ordered: no contractions inside the group
};

struct OperatorWord {
  std::vector<OperatorSymbol> prefix;
  std::vector<OpGroup> groups;
  std::vector<OperatorSymbol> suffix;

  // Reassign the time of all symbols tagged with the given vertex id.
  void set_vertex_time(int vertex, double t) {
    auto upd = [&](OperatorSymbol& s) {
      if (s.vertex == vertex &&
          (s.kind == SymKind::Monopole || s.kind == SymKind::ScalarField ||
           s.kind == SymKind::SpinorField))
        s.t = t;
    };
    for (auto& s : prefix) upd(s);
    for (auto& g : groups)
      for (auto& s : g.syms) upd(s);
    for (auto& s : suffix) upd(s);
  }
};

struct WickContext {
  CavityField field;
  std::vector<double> gaps = {1.0};          // detector gaps by det_id
  int cutoff = 1;                            // propagator mode truncation
  std::vector<SpatialProfile> profiles{};    // targets of OperatorSymbol::prof
};

// A full contraction: disjoint index pairs (i < j) covering every flattened
// symbol position (prefix, then group symbols in order, then suffix).
using Pairing = std::vector<std::pair<int, int>>;

struct FlatSymbol {
  OperatorSymbol sym;
  int group = -1;  // -1 prefix, -2 suffix, else group index
  bool normal = false;
};

std::vector<FlatSymbol> flatten(const OperatorWord& w);
bool symbol_fermionic(const OperatorSymbol& s, const CavityField& f);

// All potentially nonvanishing full contractions. Pairs joining two symbols
// of the same normal-ordered group are excluded, as are pairs whose value
// vanishes identically (mismatched modes, wrong dagger structure, charge).
std::vector<Pairing> enumerate_full_contractions(const OperatorWord& w,
                                                 const WickContext& ctx);

// (-1)^{#crossings among fermionic pairs}; bosonic pairs commute freely.
int fermion_sign(const std::vector<FlatSymbol>& flat, const CavityField& f,
                 const Pairing& p);

// Product of contraction values for one pairing, summed over all spinor
// index assignments and multiplied by the fermionic sign.
cplx pairing_product(const OperatorWord& w, const WickContext& ctx,
                     const Pairing& p);

struct VevResult {
  cplx value{0.0, 0.0};
  size_t n_pairings = 0;
};

// <vac| prefix T[groups] suffix |vac> evaluated by Wick's theorem with
// mode sums truncated at ctx.cutoff.
VevResult evaluate_vev(const OperatorWord& w, const WickContext& ctx);

// Truncated time-domain propagators.
struct ScalarPropagator {
  cplx value{0.0, 0.0};
  bool coincident = false;  // equal spacetime points: divergent as cutoff grows
};
ScalarPropagator scalar_propagator_timedomain(const CavityField& f, int cutoff,
                                              double dt, const DVec& dx);

struct SpinorPropagator {
  Mat4 value = Mat4::Zero();
  bool coincident = false;
};
SpinorPropagator spinor_propagator_timedomain(const CavityField& f, int cutoff,
                                              double dt, const DVec& dx);

// Text form of words; see docs/word-grammar.md.
OperatorWord parse_word(const std::string& text);
std::string format_word(const OperatorWord& w);

}  // namespace udw
