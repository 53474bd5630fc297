#include "udw/feynman.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace udw {
namespace {

int model_of(const CavityField& f, int model) {
  const bool ok = (model == 1 && f.kind == FieldKind::RealScalar) ||
                  (model == 2 && f.kind == FieldKind::RealScalar) ||
                  (model == 3 && f.kind == FieldKind::ComplexScalar) ||
                  (model == 4 && f.kind == FieldKind::Spinor);
  if (!ok) throw std::invalid_argument("model / field kind mismatch");
  return model;
}

// Spinor pair weight W(k,p) of the quadratic response sum.
double spinor_pair_weight(const CavityField& f, const IVec& lk,
                          const IVec& lp) {
  const double wk = f.dispersion(lk), wp = f.dispersion(lp);
  const DVec k = f.momentum(lk), p = f.momentum(lp);
  const double ak = wk + f.m, ap = wp + f.m;
  const DVec d = {{k[0] / ak - p[0] / ap, k[1] / ak - p[1] / ap,
                   k[2] / ak - p[2] / ap}};
  return (ak * ap / (wk * wp)) * d.norm2();
}

}  // namespace

OperatorWord build_amplitude_word(const WickContext& ctx, int model, int order,
                                  const ExternalState& out,
                                  const std::vector<int>& vertex_det) {
  model_of(ctx.field, model);
  if (static_cast<int>(vertex_det.size()) != order)
    throw std::invalid_argument("vertex/detector assignment size mismatch");

  OperatorWord w;
  for (const auto& q : out.quanta) {
    OperatorSymbol s = q.anti ? OperatorSymbol::ladder_b(q.l, false, q.s2)
                              : OperatorSymbol::ladder_a(q.l, false, q.s2);
    w.prefix.push_back(s);
  }
  // Detector operators innermost.
  for (size_t d = 0; d < out.detector_excited.size(); ++d)
    if (out.detector_excited[d])
      w.prefix.push_back(OperatorSymbol::sigma(false, static_cast<int>(d)));

  for (int v = 0; v < order; ++v) {
    const int det = vertex_det[static_cast<size_t>(v)];
    const double t = -static_cast<double>(v);  // placeholder, distinct
    OperatorSymbol mu = OperatorSymbol::monopole(t, det);
    mu.vertex = v;
    w.groups.push_back({{mu}, false});

    auto field_sym = [&](bool dag, int label) {
      OperatorSymbol s;
      s.kind = (model == 4) ? SymKind::SpinorField : SymKind::ScalarField;
      s.dagger = dag;
      s.t = t;
      s.prof = det;  // smeared with that detector's profile
      s.spin_label = label;
      s.vertex = v;
      return s;
    };
    OpGroup g;
    g.normal = model != 1;
    switch (model) {
      case 1: g.syms = {field_sym(false, 0)}; break;
      case 2: g.syms = {field_sym(false, 0), field_sym(false, 0)}; break;
      case 3: g.syms = {field_sym(true, 0), field_sym(false, 0)}; break;
      default: g.syms = {field_sym(true, v), field_sym(false, v)}; break;
    }
    w.groups.push_back(g);
  }
  return w;
}

namespace {

// Flat positions of the two field slots of each model-2 vertex.
std::vector<std::array<int, 2>> model2_slots(const OperatorWord& w) {
  const auto fl = flatten(w);
  std::map<int, std::vector<int>> by_vertex;
  for (size_t i = 0; i < fl.size(); ++i)
    if (fl[i].sym.kind == SymKind::ScalarField && fl[i].sym.vertex >= 0)
      by_vertex[fl[i].sym.vertex].push_back(static_cast<int>(i));
  std::vector<std::array<int, 2>> slots;
  for (const auto& [v, pos] : by_vertex)
    if (pos.size() == 2) slots.push_back({pos[0], pos[1]});
  return slots;
}

Pairing normalized(Pairing p) {
  for (auto& [i, j] : p)
    if (i > j) std::swap(i, j);
  std::sort(p.begin(), p.end());
  return p;
}

Pairing apply_swaps(const Pairing& p,
                    const std::vector<std::array<int, 2>>& slots,
                    unsigned mask) {
  std::map<int, int> perm;
  for (size_t v = 0; v < slots.size(); ++v)
    if (mask >> v & 1) {
      perm[slots[v][0]] = slots[v][1];
      perm[slots[v][1]] = slots[v][0];
    }
  Pairing out = p;
  for (auto& [i, j] : out) {
    if (auto it = perm.find(i); it != perm.end()) i = it->second;
    if (auto it = perm.find(j); it != perm.end()) j = it->second;
  }
  return normalized(out);
}

}  // namespace

std::vector<Diagram> enumerate_diagrams(const WickContext& ctx, int model,
                                        int order, const ExternalState& out,
                                        int n_detectors) {
  model_of(ctx.field, model);
  if (n_detectors < 1) throw std::invalid_argument("need >= 1 detector");
  // Pauli: no repeated fermionic quanta.
  if (ctx.field.fermionic())
    for (size_t a = 0; a < out.quanta.size(); ++a)
      for (size_t b = a + 1; b < out.quanta.size(); ++b)
        if (out.quanta[a].anti == out.quanta[b].anti &&
            out.quanta[a].l == out.quanta[b].l &&
            out.quanta[a].s2 == out.quanta[b].s2)
          throw std::invalid_argument("repeated fermionic quantum");

  std::vector<Diagram> diagrams;
  std::vector<int> assign(static_cast<size_t>(order), 0);
  for (;;) {
    OperatorWord w = build_amplitude_word(ctx, model, order, out, assign);
    const auto fl = flatten(w);
    const auto pairings = enumerate_full_contractions(w, ctx);
    if (model == 2) {
      const auto slots = model2_slots(w);
      std::map<Pairing, std::pair<Pairing, int>> classes;  // canon -> (rep, count)
      for (const auto& p : pairings) {
        Pairing canon = normalized(p);
        for (unsigned mask = 1; mask < (1u << slots.size()); ++mask)
          canon = std::min(canon, apply_swaps(p, slots, mask));
        auto [it, fresh] = classes.try_emplace(canon, normalized(p), 0);
        ++it->second.second;
      }
      for (const auto& [canon, rep] : classes)
        diagrams.push_back({order, assign, w, rep.first, rep.second,
                            fermion_sign(fl, ctx.field, rep.first)});
    } else {
      for (const auto& p : pairings)
        diagrams.push_back(
            {order, assign, w, normalized(p), 1, fermion_sign(fl, ctx.field, p)});
    }
    // next assignment
    int i = order - 1;
    while (i >= 0 && ++assign[static_cast<size_t>(i)] == n_detectors)
      assign[static_cast<size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return diagrams;
}

cplx amplitude(const Diagram& d, const WickContext& ctx,
               const std::vector<DetectorSpec>& dets, const QuadSpec& q) {
  if (d.order < 1 || d.order > 2)
    throw std::invalid_argument("amplitudes evaluated through order 2 only");
  OperatorWord w = d.word;

  auto sw = [&](int v) -> const Switching& {
    return dets.at(static_cast<size_t>(d.vertex_det[static_cast<size_t>(v)]))
        .switching;
  };
  auto lam = [&](int v) {
    return dets.at(static_cast<size_t>(d.vertex_det[static_cast<size_t>(v)]))
        .lambda;
  };

  if (d.order == 1) {
    const auto [a, b] = sw(0).support(q.window);
    auto f = [&](double t) {
      w.set_vertex_time(0, t);
      return sw(0).chi(t) * pairing_product(w, ctx, d.pairing);
    };
    const cplx integral =
        q.adaptive ? quad_1d_adaptive(f, a, b, q.tol, q.nodes, q.max_nodes)
                   : quad_1d(f, a, b, q.nodes);
    return -I * lam(0) * static_cast<double>(d.symmetry_factor) * integral;
  }

  const auto [a0, b0] = sw(0).support(q.window);
  const auto [a1, b1] = sw(1).support(q.window);
  const double a = std::min(a0, a1), b = std::max(b0, b1);
  auto f = [&](double t1, double t2) {
    const double c = sw(0).chi(t1) * sw(1).chi(t2);
    if (c == 0.0) return cplx{0.0, 0.0};
    w.set_vertex_time(0, t1);
    w.set_vertex_time(1, t2);
    return c * pairing_product(w, ctx, d.pairing);
  };
  const cplx integral =
      q.adaptive ? quad_simplex_adaptive(f, a, b, q.tol, q.nodes, q.max_nodes)
                 : quad_simplex(f, a, b, q.nodes);
  return -lam(0) * lam(1) * static_cast<double>(d.symmetry_factor) * integral;
}

cplx amplitude_sum(const WickContext& ctx, int model, int order,
                   const ExternalState& out,
                   const std::vector<DetectorSpec>& dets, const QuadSpec& q) {
  cplx total = 0.0;
  for (const auto& d :
       enumerate_diagrams(ctx, model, order, out,
                          static_cast<int>(dets.size())))
    total += amplitude(d, ctx, dets, q);
  return total;
}

cplx leg_factor(const CavityField& f, const Leg& leg, double Omega, double t,
                double t0) {
  switch (leg.kind) {
    case Leg::Kind::ScalarOut: {
      const double w = f.dispersion(leg.l);
      return std::exp(-I * w * t) / std::sqrt(2.0 * w * f.volume());
    }
    case Leg::Kind::SpinorParticleOut:
    case Leg::Kind::SpinorAntiparticleOut: {
      const double w = f.dispersion(leg.l);
      return spinor_mode_norm(f, leg.l) * std::exp(-I * w * t);
    }
    case Leg::Kind::DetectorGround:
      return 1.0;
    case Leg::Kind::DetectorExcited:
      return std::exp(-I * Omega * (t - t0));
  }
  return 0.0;
}

std::vector<SpectralLine> loop_spectrum(const CavityField& f,
                                        const DetectorSpec& det, int cutoff) {
  det.validate(f);
  std::vector<SpectralLine> lines;
  const double vol = f.volume();
  if (det.model == 1) {
    for_each_mode(f.n, cutoff, [&](const IVec& l) {
      const double w = f.dispersion(l);
      lines.push_back({det.Omega + w,
                       det.profile.sq_fourier(f.momentum(l)) / (2.0 * w * vol)});
    });
    return lines;
  }
  const auto modes = mode_list(f.n, cutoff);
  const double L2n = vol * vol;
  for (const auto& lk : modes)
    for (const auto& lp : modes) {
      const double wk = f.dispersion(lk), wp = f.dispersion(lp);
      const double prof2 =
          det.profile.sq_fourier(f.momentum(lk + lp));
      double wgt;
      if (det.model == 4) {
        wgt = spinor_pair_weight(f, lk, lp) * prof2 / (2.0 * L2n);
      } else {
        // model 2 keeps its symmetry factor 2; model 3 has none
        const double sym = (det.model == 2) ? 2.0 : 1.0;
        wgt = sym * prof2 / (4.0 * wk * wp * L2n);
      }
      lines.push_back({det.Omega + wk + wp, wgt});
    }
  return lines;
}

namespace {

// I(nu) = int_{t1>t2} chi(t1) chi(t2) e^{-i nu (t1 - t2)}; 2 Re I = |chitilde|^2.
cplx simplex_phase_integral(const Switching& sw, double nu, const QuadSpec& q) {
  const auto [a, b] = sw.support(q.window);
  auto f = [&](double t1, double t2) {
    return sw.chi(t1) * sw.chi(t2) * std::exp(-I * nu * (t1 - t2));
  };
  return q.adaptive
             ? quad_simplex_adaptive(f, a, b, q.tol, q.nodes, q.max_nodes)
             : quad_simplex(f, a, b, q.nodes);
}

double windowed_sq_fourier(const Switching& sw, double nu, const QuadSpec& q) {
  const auto [a, b] = sw.support(q.window);
  auto f = [&](double t) { return sw.chi(t) * std::exp(I * nu * t); };
  const cplx ft = q.adaptive
                      ? quad_1d_adaptive(f, a, b, q.tol, q.nodes, q.max_nodes)
                      : quad_1d(f, a, b, q.nodes);
  return std::norm(ft);
}

}  // namespace

double vnrp_second_order(const CavityField& f, const DetectorSpec& det,
                         int cutoff, const QuadSpec& q) {
  double re_a2 = 0.0;
  std::map<double, double> cache;  // nu -> 2 Re I(nu)
  for (const auto& line : loop_spectrum(f, det, cutoff)) {
    auto it = cache.find(line.nu);
    if (it == cache.end())
      it = cache
               .emplace(line.nu,
                        2.0 * simplex_phase_integral(det.switching, line.nu, q)
                                  .real())
               .first;
    re_a2 -= det.lambda * det.lambda * line.weight * 0.5 * it->second;
  }
  return 1.0 + 2.0 * re_a2;
}

double unitarity_residual(const CavityField& f, const DetectorSpec& det,
                          int cutoff, const QuadSpec& q, int cutoff_a1) {
  if (cutoff_a1 < 0) cutoff_a1 = cutoff;
  const double l2 = det.lambda * det.lambda;
  std::map<double, double> icache, ccache;
  double two_re_a2 = 0.0;
  for (const auto& line : loop_spectrum(f, det, cutoff)) {
    auto it = icache.find(line.nu);
    if (it == icache.end())
      it = icache
               .emplace(line.nu,
                        2.0 * simplex_phase_integral(det.switching, line.nu, q)
                                  .real())
               .first;
    two_re_a2 -= l2 * line.weight * it->second;
  }
  double sum_a1 = 0.0;
  for (const auto& line : loop_spectrum(f, det, cutoff_a1)) {
    auto it = ccache.find(line.nu);
    if (it == ccache.end())
      it = ccache
               .emplace(line.nu,
                        windowed_sq_fourier(det.switching, line.nu, q))
               .first;
    sum_a1 += l2 * line.weight * it->second;
  }
  return std::abs(sum_a1 + two_re_a2);
}

cplx two_detector_swap(const WickContext& ctx, const DetectorSpec& detA,
                       const DetectorSpec& detB, const Quantum& particle,
                       const Quantum& antiparticle, const QuadSpec& q) {
  if (detA.model != detB.model || (detA.model != 3 && detA.model != 4))
    throw std::invalid_argument("swap needs a shared quadratic model 3 or 4");
  model_of(ctx.field, detA.model);
  if (ctx.profiles.size() < 2 || ctx.gaps.size() < 2)
    throw std::invalid_argument("context needs both detectors' profiles/gaps");

  ExternalState out;
  out.detector_excited = {false, true};  // A back to ground, B excited
  out.quanta = {particle, antiparticle};
  const std::vector<DetectorSpec> dets = {detA, detB};

  cplx total = 0.0;
  for (int d0 = 0; d0 < 2; ++d0)
    for (int d1 = 0; d1 < 2; ++d1) {
      OperatorWord w =
          build_amplitude_word(ctx, detA.model, 2, out, {d0, d1});
      w.suffix.insert(w.suffix.begin(), OperatorSymbol::sigma(true, 0));
      const auto fl = flatten(w);
      for (const auto& p : enumerate_full_contractions(w, ctx)) {
        Diagram d{2, {d0, d1}, w, p, 1, fermion_sign(fl, ctx.field, p)};
        total += amplitude(d, ctx, dets, q);
      }
    }
  return total;
}

std::string diagram_text(const Diagram& d, const WickContext& ctx) {
  const auto fl = flatten(d.word);
  std::ostringstream out;
  out << "diagram order=" << d.order << " symmetry=" << d.symmetry_factor
      << " sign=" << (d.sign > 0 ? "+1" : "-1") << "\n";
  out << "vertices:";
  for (size_t v = 0; v < d.vertex_det.size(); ++v)
    out << " v" << v << "(det" << d.vertex_det[v] << ")";
  out << "\n";
  auto loc = [&](int i) {
    const auto& s = fl[static_cast<size_t>(i)].sym;
    if (s.vertex >= 0) return "v" + std::to_string(s.vertex);
    return std::string("ext");
  };
  auto kind = [&](int i, int j) {
    const SymKind a = fl[static_cast<size_t>(i)].sym.kind;
    const SymKind b = fl[static_cast<size_t>(j)].sym.kind;
    auto det = [](SymKind k) {
      return k == SymKind::Monopole || k == SymKind::SigmaMinus ||
             k == SymKind::SigmaPlus;
    };
    auto sp = [](SymKind k) {
      return k == SymKind::SpinorField;
    };
    if (det(a) && det(b)) return "DetectorLine";
    if (sp(a) || sp(b) || ctx.field.kind == FieldKind::Spinor)
      return "SpinorLine";
    return "ScalarLine";
  };
  for (const auto& [i, j] : d.pairing)
    out << "edge " << kind(i, j) << " " << loc(i) << " -- " << loc(j) << "\n";
  return out.str();
}

}  // namespace udw
