#include "udw/wick.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace udw {
namespace {

// e^{+i k.x} (sign=+1) or e^{-i k.x} (sign=-1) for a point symbol; the
// profile Fourier transform for a smeared one. Profiles are real, so the
// sign-flipped factor is the complex conjugate in both cases.
cplx plane_factor(const WickContext& ctx, const OperatorSymbol& s,
                  const DVec& k, int sign) {
  if (s.prof >= 0) {
    const cplx pt = ctx.profiles.at(s.prof).fourier(k);
    return sign > 0 ? std::conj(pt) : pt;
  }
  const double ph = k.dot(s.x);
  return std::exp(I * (sign > 0 ? ph : -ph));
}

bool same_location(const OperatorSymbol& a, const OperatorSymbol& b) {
  if (a.prof >= 0 || b.prof >= 0) return a.prof == b.prof;
  return a.x == b.x;
}

// <Phi(a) Phi†(b)> for t_a >= t_b, truncated mode sum.
cplx scalar_wightman(const WickContext& ctx, const OperatorSymbol& a,
                     const OperatorSymbol& b) {
  const CavityField& f = ctx.field;
  cplx acc = 0.0;
  for_each_mode(f.n, ctx.cutoff, [&](const IVec& l) {
    const double w = f.dispersion(l);
    const DVec k = f.momentum(l);
    acc += std::exp(-I * w * (a.t - b.t)) * plane_factor(ctx, a, k, +1) *
           plane_factor(ctx, b, k, -1) / (2.0 * w * f.volume());
  });
  return acc;
}

cplx scalar_feynman(const WickContext& ctx, const OperatorSymbol& a,
                    const OperatorSymbol& b) {
  if (a.t == b.t && same_location(a, b))
    throw CoincidenceLimit("scalar propagator at coincident points");
  // Equal times at distinct points are fine: the lattice is reflection
  // symmetric, so both orderings agree exactly.
  return (a.t >= b.t) ? scalar_wightman(ctx, a, b) : scalar_wightman(ctx, b, a);
}

// <T Psi_A(a) Psibar_B(b)> component, truncated.
cplx spinor_feynman(const WickContext& ctx, const OperatorSymbol& a, int A,
                    const OperatorSymbol& b, int B) {
  if (a.t == b.t)
    throw CoincidenceLimit("spinor propagator at equal times");
  const CavityField& f = ctx.field;
  const int eps = (a.t > b.t) ? +1 : -1;
  const double fsign = (eps > 0) ? 1.0 : -1.0;
  cplx acc = 0.0;
  for_each_mode(f.n, ctx.cutoff, [&](const IVec& l) {
    const double w = f.dispersion(l);
    const DVec k = f.momentum(l);
    // sum_s psi_{k,s,eps}(a) psibar_{k,s,eps}(b) = norm^2 spin_sum * phases
    const double n2 = (f.m > 0.0) ? f.m / (w * f.volume()) : 1.0 / f.volume();
    const Mat4 ss = spin_sum(f, l, eps) * n2;
    const cplx phase = std::exp(-I * static_cast<double>(eps) * w * (a.t - b.t)) *
                       plane_factor(ctx, a, k, eps) *
                       plane_factor(ctx, b, k, -eps);
    acc += phase * ss(A, B);
  });
  return fsign * acc;
}

bool is_field(SymKind k) {
  return k == SymKind::ScalarField || k == SymKind::SpinorField;
}

}  // namespace

std::vector<FlatSymbol> flatten(const OperatorWord& w) {
  std::vector<FlatSymbol> out;
  for (const auto& s : w.prefix) out.push_back({s, -1, false});
  for (size_t g = 0; g < w.groups.size(); ++g)
    for (const auto& s : w.groups[g].syms)
      out.push_back({s, static_cast<int>(g), w.groups[g].normal});
  for (const auto& s : w.suffix) out.push_back({s, -2, false});
  return out;
}

bool symbol_fermionic(const OperatorSymbol& s, const CavityField& f) {
  switch (s.kind) {
    case SymKind::SigmaMinus:
    case SymKind::SigmaPlus:
    case SymKind::Monopole:
    case SymKind::SpinorField:
      return true;
    case SymKind::LadderA:
    case SymKind::LadderB:
      return f.kind == FieldKind::Spinor;
    default:
      return false;
  }
}

namespace {

// Whether the ordered pair (i, j) can carry a nonvanishing contraction.
bool admissible(const WickContext& ctx, const std::vector<FlatSymbol>& fl,
                int i, int j) {
  const FlatSymbol& a = fl[i];
  const FlatSymbol& b = fl[j];
  // No contractions inside one normal-ordered group.
  if (a.group >= 0 && a.group == b.group && a.normal) return false;

  const OperatorSymbol& s = a.sym;
  const OperatorSymbol& t = b.sym;
  const FieldKind fk = ctx.field.kind;

  auto same_mode = [&] { return s.l == t.l && s.s2 == t.s2; };

  switch (s.kind) {
    case SymKind::SigmaMinus:
      if (t.det_id != s.det_id) return false;
      return t.kind == SymKind::SigmaPlus || t.kind == SymKind::Monopole;
    case SymKind::Monopole:
      if ((t.kind == SymKind::SigmaPlus || t.kind == SymKind::Monopole) &&
          t.det_id == s.det_id)
        return true;
      return false;
    case SymKind::SigmaPlus:
      return false;
    case SymKind::LadderA:
      if (s.dagger) return false;  // creator first annihilates the bra: zero
      if (t.kind == SymKind::LadderA) return t.dagger && same_mode();
      if (fk == FieldKind::RealScalar)
        return t.kind == SymKind::ScalarField && !t.dagger;
      if (fk == FieldKind::ComplexScalar)
        return t.kind == SymKind::ScalarField && t.dagger;
      return t.kind == SymKind::SpinorField && t.dagger;  // a with Psibar
    case SymKind::LadderB:
      if (s.dagger) return false;
      if (t.kind == SymKind::LadderB) return t.dagger && same_mode();
      if (fk == FieldKind::ComplexScalar)
        return t.kind == SymKind::ScalarField && !t.dagger;
      if (fk == FieldKind::Spinor)
        return t.kind == SymKind::SpinorField && !t.dagger;  // b with Psi
      return false;
    case SymKind::ScalarField:
      if (t.kind == SymKind::LadderA)
        return t.dagger && !s.dagger;  // Phi a†
      if (t.kind == SymKind::LadderB)
        return t.dagger && s.dagger && fk == FieldKind::ComplexScalar;
      if (t.kind == SymKind::ScalarField) {
        if (fk == FieldKind::RealScalar) return true;
        return s.dagger != t.dagger;  // charge conservation
      }
      return false;
    case SymKind::SpinorField:
      if (t.kind == SymKind::LadderA) return t.dagger && !s.dagger;  // Psi a†
      if (t.kind == SymKind::LadderB) return t.dagger && s.dagger;   // Psibar b†
      if (t.kind == SymKind::SpinorField) return s.dagger != t.dagger;
      return false;
  }
  return false;
}

void dfs_pairings(const WickContext& ctx, const std::vector<FlatSymbol>& fl,
                  std::vector<int>& partner, Pairing& cur,
                  std::vector<Pairing>& out) {
  int i = -1;
  const int n = static_cast<int>(fl.size());
  for (int p = 0; p < n; ++p)
    if (partner[p] < 0) {
      i = p;
      break;
    }
  if (i < 0) {
    out.push_back(cur);
    return;
  }
  for (int j = i + 1; j < n; ++j) {
    if (partner[j] >= 0) continue;
    if (!admissible(ctx, fl, i, j)) continue;
    partner[i] = j;
    partner[j] = i;
    cur.emplace_back(i, j);
    dfs_pairings(ctx, fl, partner, cur, out);
    cur.pop_back();
    partner[i] = partner[j] = -1;
  }
}

}  // namespace

std::vector<Pairing> enumerate_full_contractions(const OperatorWord& w,
                                                 const WickContext& ctx) {
  const auto fl = flatten(w);
  std::vector<Pairing> out;
  if (fl.size() % 2 != 0) return out;
  std::vector<int> partner(fl.size(), -1);
  Pairing cur;
  dfs_pairings(ctx, fl, partner, cur, out);
  return out;
}

int fermion_sign(const std::vector<FlatSymbol>& fl, const CavityField& f,
                 const Pairing& p) {
  std::vector<std::pair<int, int>> fpairs;
  for (const auto& [i, j] : p)
    if (symbol_fermionic(fl[i].sym, f)) fpairs.emplace_back(i, j);
  int crossings = 0;
  for (size_t a = 0; a < fpairs.size(); ++a)
    for (size_t b = a + 1; b < fpairs.size(); ++b) {
      const auto [i1, j1] = fpairs[a];
      const auto [i2, j2] = fpairs[b];
      const auto [lo, hi] = (i1 < i2) ? std::make_pair(fpairs[a], fpairs[b])
                                      : std::make_pair(fpairs[b], fpairs[a]);
      if (lo.first < hi.first && hi.first < lo.second && lo.second < hi.second)
        ++crossings;
    }
  return (crossings % 2 == 0) ? +1 : -1;
}

namespace {

cplx contraction_value(const WickContext& ctx, const std::vector<FlatSymbol>& fl,
                       int i, int j, const std::map<int, int>& asg) {
  const OperatorSymbol& s = fl[i].sym;
  const OperatorSymbol& t = fl[j].sym;
  const CavityField& f = ctx.field;

  auto gap = [&](int id) { return ctx.gaps.at(static_cast<size_t>(id)); };
  auto idx = [&](const OperatorSymbol& q) { return asg.at(q.spin_label); };

  // Scalar mode factors with full time dependence.
  auto mode_dag = [&](const IVec& l, const OperatorSymbol& q) {
    // phitilde*_l(q) = e^{+i w t} e^{-i k.x} / sqrt(2 w L^n)
    const double w = f.dispersion(l);
    return std::exp(I * w * q.t) * plane_factor(ctx, q, f.momentum(l), -1) /
           std::sqrt(2.0 * w * f.volume());
  };
  auto mode_fwd = [&](const IVec& l, const OperatorSymbol& q) {
    const double w = f.dispersion(l);
    return std::exp(-I * w * q.t) * plane_factor(ctx, q, f.momentum(l), +1) /
           std::sqrt(2.0 * w * f.volume());
  };
  // Spinor mode component, eps = +1 (u) / -1 (v); barred uses bar(amp).
  auto smode = [&](const IVec& l, int s2, int eps, const OperatorSymbol& q,
                   bool barred) {
    const double w = f.dispersion(l);
    const cplx phase =
        std::exp(-I * static_cast<double>(eps) * w * q.t) *
        plane_factor(ctx, q, f.momentum(l), eps);
    const double nrm = spinor_mode_norm(f, l);
    const Spinor amp = spinor_amp(f, l, s2, eps);
    const int A = idx(q);
    if (barred) return nrm * std::conj(phase) * bar(amp)(A);
    return nrm * phase * amp(A);
  };

  switch (s.kind) {
    case SymKind::SigmaMinus:
      if (t.kind == SymKind::SigmaPlus) return 1.0;
      return std::exp(I * gap(t.det_id) * t.t);  // sigma- mu(t)
    case SymKind::Monopole:
      if (t.kind == SymKind::SigmaPlus)
        return std::exp(-I * gap(s.det_id) * s.t);  // mu(t) sigma+
      return detector_propagator(gap(s.det_id), s.t - t.t);
    case SymKind::LadderA:
      if (t.kind == SymKind::LadderA) return 1.0;
      if (t.kind == SymKind::ScalarField) return mode_dag(s.l, t);
      return smode(s.l, s.s2, +1, t, true);  // a Psibar -> psibar_{k,s,+}
    case SymKind::LadderB:
      if (t.kind == SymKind::LadderB) return 1.0;
      if (t.kind == SymKind::ScalarField) return mode_dag(s.l, t);
      return smode(s.l, s.s2, -1, t, false);  // b Psi -> psi_{k,s,-}
    case SymKind::ScalarField:
      if (t.kind == SymKind::LadderA || t.kind == SymKind::LadderB)
        return mode_fwd(t.l, s);
      return scalar_feynman(ctx, s, t);
    case SymKind::SpinorField:
      if (t.kind == SymKind::LadderA) return smode(t.l, t.s2, +1, s, false);
      if (t.kind == SymKind::LadderB) return smode(t.l, t.s2, -1, s, true);
      if (!s.dagger)  // Psi(i) Psibar(j) -> +S(i-j)
        return spinor_feynman(ctx, s, idx(s), t, idx(t));
      // Psibar(i) Psi(j) -> -S(j-i)
      return -spinor_feynman(ctx, t, idx(t), s, idx(s));
    default:
      throw std::logic_error("unexpected contraction");
  }
}

std::vector<int> spin_labels(const std::vector<FlatSymbol>& fl) {
  std::map<int, int> count;
  for (const auto& f : fl)
    if (f.sym.kind == SymKind::SpinorField) ++count[f.sym.spin_label];
  std::vector<int> labels;
  for (const auto& [lab, c] : count) {
    if (c != 2)
      throw std::invalid_argument("spinor index label must appear exactly twice");
    labels.push_back(lab);
  }
  return labels;
}

}  // namespace

cplx pairing_product(const OperatorWord& w, const WickContext& ctx,
                     const Pairing& p) {
  const auto fl = flatten(w);
  const auto labels = spin_labels(fl);
  const int sign = fermion_sign(fl, ctx.field, p);

  const size_t nasg = static_cast<size_t>(1) << (2 * labels.size());
  cplx total = 0.0;
  for (size_t a = 0; a < nasg; ++a) {
    std::map<int, int> asg;
    size_t rest = a;
    for (int lab : labels) {
      asg[lab] = static_cast<int>(rest & 3);
      rest >>= 2;
    }
    cplx prod = 1.0;
    for (const auto& [i, j] : p) {
      prod *= contraction_value(ctx, fl, i, j, asg);
      if (prod == 0.0) break;
    }
    total += prod;
  }
  return static_cast<double>(sign) * total;
}

VevResult evaluate_vev(const OperatorWord& w, const WickContext& ctx) {
  VevResult r;
  const auto pairings = enumerate_full_contractions(w, ctx);
  r.n_pairings = pairings.size();
  for (const auto& p : pairings) r.value += pairing_product(w, ctx, p);
  return r;
}

ScalarPropagator scalar_propagator_timedomain(const CavityField& f, int cutoff,
                                              double dt, const DVec& dx) {
  WickContext ctx{f, {}, cutoff, {}};
  OperatorSymbol a = OperatorSymbol::scalar(dt, dx);
  OperatorSymbol b = OperatorSymbol::scalar(0.0, DVec{});
  ScalarPropagator out;
  if (dt == 0.0 && dx == DVec{}) {
    out.coincident = true;
    out.value = scalar_wightman(ctx, a, b);  // finite in truncation only
    return out;
  }
  out.value = scalar_feynman(ctx, a, b);
  return out;
}

SpinorPropagator spinor_propagator_timedomain(const CavityField& f, int cutoff,
                                              double dt, const DVec& dx) {
  WickContext ctx{f, {}, cutoff, {}};
  OperatorSymbol a = OperatorSymbol::spinor(dt, dx, false, 0);
  OperatorSymbol b = OperatorSymbol::spinor(0.0, DVec{}, true, 1);
  SpinorPropagator out;
  if (dt == 0.0) {
    out.coincident = true;
    return out;
  }
  for (int A = 0; A < 4; ++A)
    for (int B = 0; B < 4; ++B)
      out.value(A, B) = spinor_feynman(ctx, a, A, b, B);
  return out;
}

// ---------------------------------------------------------------------------
// Text grammar (see docs/word-grammar.md).

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_char(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("word parse error: " + what);
}

IVec parse_ivec(const std::string& s) {
  IVec l;
  const auto parts = split_char(s, ',');
  if (parts.empty() || parts.size() > 3) bad("mode '" + s + "'");
  for (size_t i = 0; i < parts.size(); ++i) l[static_cast<int>(i)] = std::stoi(parts[i]);
  return l;
}

DVec parse_dvec(const std::string& s) {
  DVec x;
  if (s.empty()) return x;
  const auto parts = split_char(s, ',');
  if (parts.size() > 3) bad("position '" + s + "'");
  for (size_t i = 0; i < parts.size(); ++i) x[static_cast<int>(i)] = std::stod(parts[i]);
  return x;
}

// One symbol token, e.g. a{1;-}  A{2}  s-{0}  mu{0}@{0.25}
// phi@{0.5;0.1}  phi+@{t;x}  psi#1@{t;x}  psibar#1@{t;x}
OperatorSymbol parse_symbol(const std::string& tok) {
  auto brace = [&](const std::string& t) -> std::pair<std::string, std::string> {
    const auto o = t.find('{');
    const auto c = t.rfind('}');
    if (o == std::string::npos || c == std::string::npos || c < o)
      bad("token '" + t + "'");
    return {t.substr(0, o), t.substr(o + 1, c - o - 1)};
  };

  const auto at = tok.find("@{");
  std::string head = (at == std::string::npos) ? tok : tok.substr(0, at);
  std::string arg;
  if (at != std::string::npos) {
    if (tok.back() != '}') bad("token '" + tok + "'");
    arg = tok.substr(at + 2, tok.size() - at - 3);
  }

  auto parse_spacetime = [&](OperatorSymbol& s) {
    const auto parts = split_char(arg, ';');
    if (parts.empty() || parts.size() > 2) bad("argument '" + arg + "'");
    s.t = std::stod(parts[0]);
    if (parts.size() == 2) s.x = parse_dvec(parts[1]);
  };

  if (head.rfind("phi", 0) == 0 || head.rfind("psi", 0) == 0) {
    OperatorSymbol s;
    std::string name = head;
    if (name.rfind("psibar", 0) == 0) {
      s.kind = SymKind::SpinorField;
      s.dagger = true;
      name = name.substr(6);
    } else if (name.rfind("psi", 0) == 0) {
      s.kind = SymKind::SpinorField;
      name = name.substr(3);
    } else if (name.rfind("phi+", 0) == 0) {
      s.kind = SymKind::ScalarField;
      s.dagger = true;
      name = name.substr(4);
    } else {
      s.kind = SymKind::ScalarField;
      name = name.substr(3);
    }
    if (!name.empty()) {
      if (name[0] != '#') bad("token '" + tok + "'");
      s.spin_label = std::stoi(name.substr(1));
    }
    if (arg.empty()) bad("field needs @{t;x}: '" + tok + "'");
    parse_spacetime(s);
    return s;
  }

  const auto [name, body] = brace(head);
  if (name == "s-" || name == "s+") {
    OperatorSymbol s = OperatorSymbol::sigma(name == "s+", std::stoi(body));
    return s;
  }
  if (name == "mu") {
    if (arg.empty()) bad("mu needs @{t}: '" + tok + "'");
    OperatorSymbol s = OperatorSymbol::monopole(std::stod(arg), std::stoi(body));
    return s;
  }
  if (name == "a" || name == "A" || name == "b" || name == "B") {
    const auto parts = split_char(body, ';');
    IVec l = parse_ivec(parts[0]);
    int s2 = 0;
    if (parts.size() == 2) {
      if (parts[1] == "+") s2 = +1;
      else if (parts[1] == "-") s2 = -1;
      else bad("spin '" + parts[1] + "'");
    }
    const bool dag = (name == "A" || name == "B");
    if (name == "a" || name == "A") return OperatorSymbol::ladder_a(l, dag, s2);
    return OperatorSymbol::ladder_b(l, dag, s2);
  }
  bad("token '" + tok + "'");
}

std::string format_symbol(const OperatorSymbol& s) {
  auto ivec = [&](const IVec& l) {
    std::string out = std::to_string(l[0]);
    if (l[1] || l[2]) out += "," + std::to_string(l[1]);
    if (l[2]) out += "," + std::to_string(l[2]);
    return out;
  };
  auto spacetime = [&](const OperatorSymbol& q) {
    std::string out = "@{" + fmt_num(q.t) + ";" + fmt_num(q.x[0]);
    if (q.x[1] != 0.0 || q.x[2] != 0.0) out += "," + fmt_num(q.x[1]);
    if (q.x[2] != 0.0) out += "," + fmt_num(q.x[2]);
    return out + "}";
  };
  auto spin = [&](int s2) {
    return s2 == 0 ? std::string{} : (s2 > 0 ? std::string(";+") : std::string(";-"));
  };
  switch (s.kind) {
    case SymKind::LadderA:
      return (s.dagger ? "A{" : "a{") + ivec(s.l) + spin(s.s2) + "}";
    case SymKind::LadderB:
      return (s.dagger ? "B{" : "b{") + ivec(s.l) + spin(s.s2) + "}";
    case SymKind::SigmaMinus:
      return "s-{" + std::to_string(s.det_id) + "}";
    case SymKind::SigmaPlus:
      return "s+{" + std::to_string(s.det_id) + "}";
    case SymKind::Monopole:
      return "mu{" + std::to_string(s.det_id) + "}@{" + fmt_num(s.t) + "}";
    case SymKind::ScalarField:
      return (s.dagger ? std::string("phi+") : std::string("phi")) + spacetime(s);
    case SymKind::SpinorField:
      return (s.dagger ? std::string("psibar#") : std::string("psi#")) +
             std::to_string(s.spin_label) + spacetime(s);
  }
  return {};
}

}  // namespace

OperatorWord parse_word(const std::string& text) {
  const auto sections = split_char(text, '|');
  if (sections.size() != 3) bad("expected 'prefix | T[ ... ] | suffix'");

  OperatorWord w;
  for (const auto& tok : split_ws(sections[0]))
    w.prefix.push_back(parse_symbol(tok));

  std::string mid = sections[1];
  const auto open = mid.find("T[");
  const auto close = mid.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open)
    bad("middle section must be T[ ... ]");
  mid = mid.substr(open + 2, close - open - 2);

  bool in_normal = false;
  OpGroup cur;
  for (auto tok : split_ws(mid)) {
    bool opens = false, closes = false;
    if (!tok.empty() && tok.front() == ':') {
      opens = true;
      tok = tok.substr(1);
    }
    if (!tok.empty() && tok.back() == ':') {
      closes = true;
      tok = tok.substr(0, tok.size() - 1);
    }
    if (opens) {
      if (in_normal) bad("nested ':'");
      in_normal = true;
      cur = OpGroup{{}, true};
    }
    if (tok.empty()) bad("empty token");
    if (in_normal) {
      cur.syms.push_back(parse_symbol(tok));
      if (closes) {
        in_normal = false;
        w.groups.push_back(cur);
      }
    } else {
      if (closes) bad("unmatched ':'");
      w.groups.push_back({{parse_symbol(tok)}, false});
    }
  }
  if (in_normal) bad("unterminated ':'");

  for (const auto& tok : split_ws(sections[2]))
    w.suffix.push_back(parse_symbol(tok));
  return w;
}

std::string format_word(const OperatorWord& w) {
  std::string out;
  for (const auto& s : w.prefix) out += format_symbol(s) + " ";
  out += "| T[";
  for (const auto& g : w.groups) {
    out += " ";
    if (g.normal) out += ":";
    for (size_t i = 0; i < g.syms.size(); ++i) {
      if (i) out += " ";
      out += format_symbol(g.syms[i]);
    }
    if (g.normal) out += ":";
  }
  out += " ] |";
  for (const auto& s : w.suffix) out += " " + format_symbol(s);
  return out;
}

}  // namespace udw
