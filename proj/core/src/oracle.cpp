#include "udw/oracle.hpp"

#include <Eigen/Eigenvalues>

namespace udw {

TruncatedSpace::TruncatedSpace(const CavityField& f, std::vector<IVec> mode_set,
                               int cap_, int n_det)
    : field(f), modes(std::move(mode_set)), cap(cap_), n_detectors(n_det) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (n_detectors < 1) throw std::invalid_argument("need >= 1 detector");
  spins = (f.kind == FieldKind::Spinor) ? std::vector<int>{+1, -1}
                                        : std::vector<int>{0};
  const bool ferm = f.fermionic();
  const int levels = ferm ? 2 : cap + 1;
  const size_t per_type = modes.size() * spins.size();
  const size_t types = (f.kind == FieldKind::RealScalar) ? 1 : 2;
  for (size_t t = 0; t < types; ++t)
    for (size_t i = 0; i < per_type; ++i) factors.push_back({levels, ferm});
  for (int d = 0; d < n_detectors; ++d) factors.push_back({2, true});

  stride.assign(factors.size(), 1);
  for (size_t i = factors.size(); i-- > 1;)
    stride[i - 1] = stride[i] * static_cast<size_t>(factors[i].levels);
  dim = stride[0] * static_cast<size_t>(factors[0].levels);
  if (dim > (1u << 23))
    throw std::invalid_argument("truncated space too large");
}

size_t TruncatedSpace::ladder_factor(bool type_b, size_t mode_idx,
                                     int s2) const {
  size_t spin_idx = 0;
  if (field.kind == FieldKind::Spinor) {
    if (s2 != +1 && s2 != -1) throw std::invalid_argument("spinor needs spin");
    spin_idx = (s2 == +1) ? 0 : 1;
  }
  const size_t per_type = modes.size() * spins.size();
  size_t base = type_b ? per_type : 0;
  if (type_b && field.kind == FieldKind::RealScalar)
    throw std::invalid_argument("real scalar has no b quanta");
  return base + mode_idx * spins.size() + spin_idx;
}

size_t TruncatedSpace::detector_factor(int det_id) const {
  return factors.size() - static_cast<size_t>(n_detectors) +
         static_cast<size_t>(det_id);
}

FockVec apply_ladder(const TruncatedSpace& sp, size_t factor, bool dagger,
                     const FockVec& v) {
  FockVec out = FockVec::Zero(static_cast<long>(sp.dim));
  const auto lev = static_cast<size_t>(sp.factors[factor].levels);
  const size_t st = sp.stride[factor];
  const bool ferm = sp.factors[factor].fermionic;
  for (size_t idx = 0; idx < sp.dim; ++idx) {
    const cplx amp = v(static_cast<long>(idx));
    if (amp == 0.0) continue;
    const size_t o = sp.occ(idx, factor);
    double coef;
    size_t tgt;
    if (dagger) {
      if (o + 1 > lev - 1) continue;  // occupancy cap (fermion: o must be 0)
      coef = ferm ? 1.0 : std::sqrt(static_cast<double>(o + 1));
      tgt = idx + st;
    } else {
      if (o == 0) continue;
      coef = ferm ? 1.0 : std::sqrt(static_cast<double>(o));
      tgt = idx - st;
    }
    if (ferm) {
      // Jordan-Wigner parity over preceding fermionic factors.
      int par = 0;
      for (size_t g = 0; g < factor; ++g)
        if (sp.factors[g].fermionic) par += static_cast<int>(sp.occ(idx, g));
      if (par % 2) coef = -coef;
    }
    out(static_cast<long>(tgt)) += coef * amp;
  }
  return out;
}

Eigen::MatrixXcd ladder_matrix(const TruncatedSpace& sp, size_t factor,
                               bool dagger) {
  Eigen::MatrixXcd m(static_cast<long>(sp.dim), static_cast<long>(sp.dim));
  FockVec e = FockVec::Zero(static_cast<long>(sp.dim));
  for (size_t j = 0; j < sp.dim; ++j) {
    e(static_cast<long>(j)) = 1.0;
    m.col(static_cast<long>(j)) = apply_ladder(sp, factor, dagger, e);
    e(static_cast<long>(j)) = 0.0;
  }
  return m;
}

namespace {

size_t mode_index(const TruncatedSpace& sp, const IVec& l) {
  for (size_t i = 0; i < sp.modes.size(); ++i)
    if (sp.modes[i] == l) return i;
  throw std::invalid_argument("mode not in truncated space");
}

cplx plane_factor(const WickContext& ctx, const OperatorSymbol& s,
                  const DVec& k, int sign) {
  if (s.prof >= 0) {
    const cplx pt = ctx.profiles.at(s.prof).fourier(k);
    return sign > 0 ? std::conj(pt) : pt;
  }
  const double ph = k.dot(s.x);
  return std::exp(I * (sign > 0 ? ph : -ph));
}

// Annihilator (part = -1) or creator (part = +1) piece of a symbol applied
// to a state. Pure ladder/sigma symbols live entirely in one part.
FockVec apply_part(const TruncatedSpace& sp, const WickContext& ctx,
                   const OperatorSymbol& s, const std::map<int, int>& asg,
                   int part, const FockVec& v) {
  const CavityField& f = ctx.field;
  FockVec out = FockVec::Zero(static_cast<long>(sp.dim));
  auto gap = [&](int id) { return ctx.gaps.at(static_cast<size_t>(id)); };

  switch (s.kind) {
    case SymKind::LadderA:
      if ((s.dagger ? +1 : -1) != part) return out;
      return apply_ladder(sp, sp.ladder_factor(false, mode_index(sp, s.l), s.s2),
                          s.dagger, v);
    case SymKind::LadderB:
      if ((s.dagger ? +1 : -1) != part) return out;
      return apply_ladder(sp, sp.ladder_factor(true, mode_index(sp, s.l), s.s2),
                          s.dagger, v);
    case SymKind::SigmaMinus:
    case SymKind::SigmaPlus: {
      const bool dag = s.kind == SymKind::SigmaPlus;
      if ((dag ? +1 : -1) != part) return out;
      return apply_ladder(sp, sp.detector_factor(s.det_id), dag, v);
    }
    case SymKind::Monopole: {
      const bool dag = part == +1;
      const cplx ph = std::exp((dag ? +I : -I) * gap(s.det_id) * s.t);
      return ph * apply_ladder(sp, sp.detector_factor(s.det_id), dag, v);
    }
    case SymKind::ScalarField: {
      for (size_t i = 0; i < sp.modes.size(); ++i) {
        const IVec& l = sp.modes[i];
        const double w = f.dispersion(l);
        const DVec k = f.momentum(l);
        const double nrm = 1.0 / std::sqrt(2.0 * w * f.volume());
        const cplx fwd = nrm * std::exp(-I * w * s.t) * plane_factor(ctx, s, k, +1);
        const cplx bwd = std::conj(fwd);
        // Phi  = a fwd + (a† or b†) bwd ; Phi† = a† bwd + b fwd
        if (!s.dagger) {
          if (part < 0)
            out += fwd * apply_ladder(sp, sp.ladder_factor(false, i, 0), false, v);
          else
            out += bwd * apply_ladder(
                             sp,
                             sp.ladder_factor(f.kind == FieldKind::ComplexScalar,
                                              i, 0),
                             true, v);
        } else {
          if (f.kind != FieldKind::ComplexScalar)
            throw std::invalid_argument("dagger on real scalar field");
          if (part > 0)
            out += bwd * apply_ladder(sp, sp.ladder_factor(false, i, 0), true, v);
          else
            out += fwd * apply_ladder(sp, sp.ladder_factor(true, i, 0), false, v);
        }
      }
      return out;
    }
    case SymKind::SpinorField: {
      const int A = asg.at(s.spin_label);
      for (size_t i = 0; i < sp.modes.size(); ++i) {
        const IVec& l = sp.modes[i];
        const double w = f.dispersion(l);
        const DVec k = f.momentum(l);
        const double nrm = spinor_mode_norm(f, l);
        for (int s2 : {+1, -1}) {
          // psi_{k,s,eps}(t,x) = nrm amp_eps e^{-i eps(wt - k.x)}
          const Spinor up = spinor_amp(f, l, s2, +1);
          const Spinor vp = spinor_amp(f, l, s2, -1);
          const cplx php = std::exp(-I * w * s.t) * plane_factor(ctx, s, k, +1);
          const cplx phm = std::conj(php);
          if (!s.dagger) {
            // Psi = a psi_+ + b† psi_-
            if (part < 0)
              out += nrm * php * up(A) *
                     apply_ladder(sp, sp.ladder_factor(false, i, s2), false, v);
            else
              out += nrm * phm * vp(A) *
                     apply_ladder(sp, sp.ladder_factor(true, i, s2), true, v);
          } else {
            // Psibar = a† psibar_+ + b psibar_-
            if (part > 0)
              out += nrm * std::conj(php) * bar(up)(A) *
                     apply_ladder(sp, sp.ladder_factor(false, i, s2), true, v);
            else
              out += nrm * std::conj(phm) * bar(vp)(A) *
                     apply_ladder(sp, sp.ladder_factor(true, i, s2), false, v);
          }
        }
      }
      return out;
    }
  }
  return out;
}

bool has_time(const OperatorSymbol& s) {
  return s.kind == SymKind::Monopole || s.kind == SymKind::ScalarField ||
         s.kind == SymKind::SpinorField;
}

int fermion_count(const OpGroup& g, const CavityField& f) {
  int c = 0;
  for (const auto& s : g.syms) c += symbol_fermionic(s, f) ? 1 : 0;
  return c;
}

double group_time(const OpGroup& g) {
  for (const auto& s : g.syms)
    if (has_time(s)) return s.t;
  throw std::invalid_argument("T-ordered group carries no time argument");
}

// Apply a normal-ordered group: sum over creator/annihilator part choices,
// creators pulled to the left (in original relative order) with fermionic
// reordering signs.
FockVec apply_normal_group(const TruncatedSpace& sp, const WickContext& ctx,
                           const OpGroup& g, const std::map<int, int>& asg,
                           const FockVec& v) {
  const size_t n = g.syms.size();
  FockVec out = FockVec::Zero(static_cast<long>(sp.dim));
  for (size_t mask = 0; mask < (static_cast<size_t>(1) << n); ++mask) {
    // bit i set: symbol i contributes its creator part
    int sign = 1;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        if (!(mask >> i & 1) && (mask >> j & 1) &&
            symbol_fermionic(g.syms[i], ctx.field) &&
            symbol_fermionic(g.syms[j], ctx.field))
          sign = -sign;
    // rightmost first: annihilators right-to-left, then creators
    FockVec cur = v;
    bool dead = false;
    for (size_t i = n; i-- > 0 && !dead;) {
      if (mask >> i & 1) continue;
      cur = apply_part(sp, ctx, g.syms[i], asg, -1, cur);
      dead = cur.isZero(0.0);
    }
    for (size_t i = n; i-- > 0 && !dead;) {
      if (!(mask >> i & 1)) continue;
      cur = apply_part(sp, ctx, g.syms[i], asg, +1, cur);
      dead = cur.isZero(0.0);
    }
    if (!dead) out += static_cast<double>(sign) * cur;
  }
  return out;
}

}  // namespace

FockVec apply_symbol(const TruncatedSpace& sp, const WickContext& ctx,
                     const OperatorSymbol& s, const std::map<int, int>& asg,
                     const FockVec& v) {
  return apply_part(sp, ctx, s, asg, -1, v) + apply_part(sp, ctx, s, asg, +1, v);
}

int required_cap(const OperatorWord& w, const CavityField& f) {
  if (f.fermionic()) return 1;
  int touching = 0;
  auto count = [&](const OperatorSymbol& s) {
    if (s.kind == SymKind::LadderA || s.kind == SymKind::LadderB ||
        s.kind == SymKind::ScalarField)
      ++touching;
  };
  for (const auto& s : w.prefix) count(s);
  for (const auto& g : w.groups)
    for (const auto& s : g.syms) count(s);
  for (const auto& s : w.suffix) count(s);
  return std::max(2, touching / 2);
}

cplx word_vev(const TruncatedSpace& sp, const WickContext& ctx,
              const OperatorWord& w) {
  // Stable sort groups by descending time; fermionic blocks anticommute.
  std::vector<size_t> order(w.groups.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> times(w.groups.size());
  std::vector<int> fc(w.groups.size());
  for (size_t i = 0; i < w.groups.size(); ++i) {
    times[i] = group_time(w.groups[i]);
    fc[i] = fermion_count(w.groups[i], ctx.field);
  }
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return times[a] > times[b];
  });
  int sign = 1;
  for (size_t a = 0; a < order.size(); ++a)
    for (size_t b = a + 1; b < order.size(); ++b)
      if (order[a] > order[b] && (fc[order[a]] * fc[order[b]]) % 2)
        sign = -sign;

  // Spinor index labels.
  std::map<int, int> count;
  auto note = [&](const OperatorSymbol& s) {
    if (s.kind == SymKind::SpinorField) ++count[s.spin_label];
  };
  for (const auto& s : w.prefix) note(s);
  for (const auto& g : w.groups)
    for (const auto& s : g.syms) note(s);
  for (const auto& s : w.suffix) note(s);
  std::vector<int> labels;
  for (const auto& [lab, c] : count) {
    if (c != 2)
      throw std::invalid_argument("spinor index label must appear exactly twice");
    labels.push_back(lab);
  }

  cplx total = 0.0;
  const size_t nasg = static_cast<size_t>(1) << (2 * labels.size());
  for (size_t a = 0; a < nasg; ++a) {
    std::map<int, int> asg;
    size_t rest = a;
    for (int lab : labels) {
      asg[lab] = static_cast<int>(rest & 3);
      rest >>= 2;
    }
    FockVec v = FockVec::Zero(static_cast<long>(sp.dim));
    v(0) = 1.0;
    for (size_t i = w.suffix.size(); i-- > 0;)
      v = apply_symbol(sp, ctx, w.suffix[i], asg, v);
    for (size_t oi = order.size(); oi-- > 0;) {
      const OpGroup& g = w.groups[order[oi]];
      if (g.normal) {
        v = apply_normal_group(sp, ctx, g, asg, v);
      } else {
        for (size_t i = g.syms.size(); i-- > 0;)
          v = apply_symbol(sp, ctx, g.syms[i], asg, v);
      }
    }
    for (size_t i = w.prefix.size(); i-- > 0;)
      v = apply_symbol(sp, ctx, w.prefix[i], asg, v);
    total += v(0);
  }
  return static_cast<double>(sign) * total;
}

EvolveResult oracle_evolve(const TruncatedSpace& sp, const WickContext& ctx,
                           const DetectorSpec& det, double t_begin,
                           double t_end, int steps) {
  det.validate(ctx.field);
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  const long dim = static_cast<long>(sp.dim);

  // Free Hamiltonian: diagonal occupation energies plus detector gap.
  Eigen::VectorXd h0 = Eigen::VectorXd::Zero(dim);
  const size_t per_type = sp.modes.size() * sp.spins.size();
  const size_t types = (ctx.field.kind == FieldKind::RealScalar) ? 1 : 2;
  for (size_t idx = 0; idx < sp.dim; ++idx) {
    double e = 0.0;
    for (size_t t = 0; t < types; ++t)
      for (size_t i = 0; i < sp.modes.size(); ++i)
        for (size_t si = 0; si < sp.spins.size(); ++si) {
          const size_t fct = t * per_type + i * sp.spins.size() + si;
          e += ctx.field.dispersion(sp.modes[i]) *
               static_cast<double>(sp.occ(idx, fct));
        }
    e += det.Omega * static_cast<double>(
                         sp.occ(idx, sp.detector_factor(0)));
    h0(static_cast<long>(idx)) = e;
  }

  // Coupling operator V (Schroedinger picture, fields at t = 0):
  // model 1: smeared Phi ; models 2-4: normal-ordered smeared bilinear.
  const int prof = 0;
  WickContext c = ctx;
  if (c.profiles.empty()) c.profiles.push_back(det.profile);
  auto field_sym = [&](bool dag, int label) {
    OperatorSymbol s;
    s.kind = (det.model == 4) ? SymKind::SpinorField : SymKind::ScalarField;
    s.dagger = dag;
    s.t = 0.0;
    s.prof = prof;
    s.spin_label = label;
    return s;
  };
  OpGroup bil;
  bil.normal = det.model != 1;
  if (det.model == 1) {
    bil.syms = {field_sym(false, 0)};
  } else if (det.model == 2) {
    bil.syms = {field_sym(false, 0), field_sym(false, 1)};
  } else if (det.model == 3) {
    bil.syms = {field_sym(true, 0), field_sym(false, 1)};
  } else {
    bil.syms = {field_sym(true, 0), field_sym(false, 1)};
  }

  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(dim, dim);
  const int labels = (det.model == 4) ? 1 : 0;
  // Psibar_A Psi^A: sum the shared index; scalars use a single assignment.
  for (int A = 0; A < (labels ? 4 : 1); ++A) {
    std::map<int, int> asg;
    asg[0] = A;
    asg[1] = A;
    FockVec e = FockVec::Zero(dim);
    for (long j = 0; j < dim; ++j) {
      e(j) = 1.0;
      FockVec col = bil.normal ? apply_normal_group(sp, c, bil, asg, e)
                               : apply_symbol(sp, c, bil.syms[0], asg, e);
      V.col(j) += col;
      e(j) = 0.0;
    }
  }
  // Monopole sigma+ + sigma-.
  Eigen::MatrixXcd mu = ladder_matrix(sp, sp.detector_factor(0), true);
  mu += ladder_matrix(sp, sp.detector_factor(0), false);
  const Eigen::MatrixXcd W = mu * V;  // detector factor commutes with field V

  FockVec psi = FockVec::Zero(dim);
  psi(0) = 1.0;
  const double dt = (t_end - t_begin) / steps;
  Eigen::MatrixXcd H(dim, dim);
  for (int s = 0; s < steps; ++s) {
    const double tm = t_begin + (s + 0.5) * dt;
    H = W * (det.lambda * det.switching.chi(tm));
    H += h0.cast<cplx>().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::VectorXcd phase =
        (-I * dt * es.eigenvalues().cast<cplx>().array()).exp();
    psi = es.eigenvectors() *
          (phase.array() * (es.eigenvectors().adjoint() * psi).array()).matrix();
  }

  EvolveResult r;
  r.norm_defect = std::abs(psi.norm() - 1.0);
  // Probability that the detector is excited.
  const size_t dfct = sp.detector_factor(0);
  for (size_t idx = 0; idx < sp.dim; ++idx)
    if (sp.occ(idx, dfct) == 1)
      r.p_excited += std::norm(psi(static_cast<long>(idx)));
  return r;
}

}  // namespace udw
