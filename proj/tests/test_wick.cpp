#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "udw/wick.hpp"

using namespace udw;

namespace {

const DVec kOrigin{};

OperatorWord word(std::vector<OperatorSymbol> pre, std::vector<OpGroup> groups,
                  std::vector<OperatorSymbol> suf) {
  OperatorWord w;
  w.prefix = std::move(pre);
  w.groups = std::move(groups);
  w.suffix = std::move(suf);
  return w;
}

bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("detector two-point word: three pairings, one crossing sign") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  const double Om = 1.7;
  WickContext ctx{f, {Om}, 2, {}};

  const double t1 = 0.8, t2 = 0.3;
  auto w = word({OperatorSymbol::sigma(false)},
                {{{OperatorSymbol::monopole(t1)}, false},
                 {{OperatorSymbol::monopole(t2)}, false}},
                {OperatorSymbol::sigma(true)});

  auto r = evaluate_vev(w, ctx);
  CHECK(r.n_pairings == 3);
  const double dt = t1 - t2;
  const cplx expect = std::exp(I * Om * dt) - std::exp(-I * Om * dt) +
                      detector_propagator(Om, dt);
  CHECK(close(r.value, expect));

  // t1 < t2 flips the detector propagator branch
  auto w2 = word({OperatorSymbol::sigma(false)},
                 {{{OperatorSymbol::monopole(t2)}, false},
                  {{OperatorSymbol::monopole(t1)}, false}},
                 {OperatorSymbol::sigma(true)});
  auto r2 = evaluate_vev(w2, ctx);
  const cplx expect2 = std::exp(-I * Om * dt) - std::exp(I * Om * dt) +
                       detector_propagator(Om, -dt);
  CHECK(close(r2.value, expect2));
}

TEST_CASE("two quanta against two field insertions") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  WickContext ctx{f, {1.0}, 3, {}};
  const IVec k{{1, 0, 0}}, p{{-2, 0, 0}};
  const double t1 = 0.4, t2 = -0.2;
  const DVec x1{{0.1, 0, 0}}, x2{{0.7, 0, 0}};

  auto w = word({OperatorSymbol::ladder_a(k, false),
                 OperatorSymbol::ladder_a(p, false)},
                {{{OperatorSymbol::scalar(t1, x1)}, false},
                 {{OperatorSymbol::scalar(t2, x2)}, false}},
                {});
  auto r = evaluate_vev(w, ctx);
  CHECK(r.n_pairings == 2);
  auto ms = [&](const IVec& l, double t, const DVec& x) {
    return std::conj(scalar_mode_full(f, l, t, x));
  };
  const cplx expect =
      ms(k, t1, x1) * ms(p, t2, x2) + ms(k, t2, x2) * ms(p, t1, x1);
  CHECK(close(r.value, expect));
}

TEST_CASE("pair creation from two normal-ordered squares") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  WickContext ctx{f, {1.0}, 3, {}};
  const IVec k{{1, 0, 0}}, p{{2, 0, 0}};
  const double t1 = 0.6, t2 = -0.1;
  const DVec y1{{0.2, 0, 0}}, y2{{0.9, 0, 0}};

  auto sq = [&](double t, const DVec& y) {
    return OpGroup{{OperatorSymbol::scalar(t, y), OperatorSymbol::scalar(t, y)},
                   true};
  };
  auto w = word({OperatorSymbol::ladder_a(k, false),
                 OperatorSymbol::ladder_a(p, false)},
                {sq(t1, y1), sq(t2, y2)}, {});
  auto r = evaluate_vev(w, ctx);
  CHECK(r.n_pairings == 8);

  const cplx G = scalar_propagator_timedomain(
      f, ctx.cutoff, t1 - t2, DVec{{y1[0] - y2[0], 0, 0}}).value;
  auto ms = [&](const IVec& l, double t, const DVec& x) {
    return std::conj(scalar_mode_full(f, l, t, x));
  };
  const cplx expect = 4.0 * G *
                      (ms(k, t1, y1) * ms(p, t2, y2) +
                       ms(k, t2, y2) * ms(p, t1, y1));
  CHECK(close(r.value, expect));
}

TEST_CASE("complex scalar vacuum loop and charge conservation") {
  CavityField f{FieldKind::ComplexScalar, 1, 1.0, 0.0};
  WickContext ctx{f, {1.0}, 3, {}};
  const double t1 = 0.5, t2 = -0.3;
  const DVec y1{{0.2, 0, 0}}, y2{{0.8, 0, 0}};

  auto density = [&](double t, const DVec& y) {
    return OpGroup{{OperatorSymbol::scalar(t, y, true),
                    OperatorSymbol::scalar(t, y, false)},
                   true};
  };

  SUBCASE("vacuum two-point word is the squared propagator") {
    auto w = word({}, {density(t1, y1), density(t2, y2)}, {});
    auto r = evaluate_vev(w, ctx);
    CHECK(r.n_pairings == 1);
    const DVec dy{{y1[0] - y2[0], 0, 0}};
    const DVec myd{{y2[0] - y1[0], 0, 0}};
    const cplx G12 =
        scalar_propagator_timedomain(f, ctx.cutoff, t1 - t2, dy).value;
    const cplx G21 =
        scalar_propagator_timedomain(f, ctx.cutoff, t2 - t1, myd).value;
    CHECK(close(r.value, G12 * G21));
  }

  SUBCASE("two same-charge quanta cannot come out of the charge-neutral vertices") {
    auto w = word({OperatorSymbol::ladder_a(IVec{{1, 0, 0}}, false),
                   OperatorSymbol::ladder_a(IVec{{2, 0, 0}}, false)},
                  {density(t1, y1), density(t2, y2)}, {});
    auto r = evaluate_vev(w, ctx);
    CHECK(r.n_pairings == 0);
    CHECK(r.value == cplx{0.0, 0.0});
  }
}

TEST_CASE("spinor vacuum bubble is minus the propagator trace loop") {
  for (double m : {0.0, 0.8}) {
    CavityField f{FieldKind::Spinor, 1, 1.0, m};
    WickContext ctx{f, {1.0}, 2, {}};
    const double t1 = 0.45, t2 = -0.15;
    const DVec y1{{0.3, 0, 0}}, y2{{0.85, 0, 0}};

    auto dens = [&](double t, const DVec& y, int label) {
      return OpGroup{{OperatorSymbol::spinor(t, y, true, label),
                      OperatorSymbol::spinor(t, y, false, label)},
                     true};
    };
    auto w = word({}, {dens(t1, y1, 1), dens(t2, y2, 2)}, {});
    auto r = evaluate_vev(w, ctx);
    CHECK(r.n_pairings == 1);

    const DVec dy{{y1[0] - y2[0], 0, 0}};
    const DVec myd{{y2[0] - y1[0], 0, 0}};
    const Mat4 S12 =
        spinor_propagator_timedomain(f, ctx.cutoff, t1 - t2, dy).value;
    const Mat4 S21 =
        spinor_propagator_timedomain(f, ctx.cutoff, t2 - t1, myd).value;
    const cplx expect = -(S12 * S21).trace();
    CHECK(close(r.value, expect));
  }
}

TEST_CASE("ladder exchange statistics through the crossing sign") {
  const IVec k{{1, 0, 0}}, p{{2, 0, 0}};

  SUBCASE("bosons") {
    CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
    WickContext ctx{f, {1.0}, 2, {}};
    auto w = word({OperatorSymbol::ladder_a(k, false),
                   OperatorSymbol::ladder_a(p, false)},
                  {},
                  {OperatorSymbol::ladder_a(k, true),
                   OperatorSymbol::ladder_a(p, true)});
    auto r = evaluate_vev(w, ctx);
    CHECK(r.n_pairings == 1);  // distinct modes force the crossed pairing
    CHECK(close(r.value, cplx{1.0, 0.0}));
  }

  SUBCASE("fermions pick up a minus sign") {
    CavityField f{FieldKind::Spinor, 1, 1.0, 0.5};
    WickContext ctx{f, {1.0}, 2, {}};
    auto w = word({OperatorSymbol::ladder_a(k, false, +1),
                   OperatorSymbol::ladder_a(p, false, +1)},
                  {},
                  {OperatorSymbol::ladder_a(k, true, +1),
                   OperatorSymbol::ladder_a(p, true, +1)});
    auto r = evaluate_vev(w, ctx);
    CHECK(r.n_pairings == 1);
    CHECK(close(r.value, cplx{-1.0, 0.0}));

    // uncrossed layout stays +1
    auto w2 = word({OperatorSymbol::ladder_a(k, false, +1),
                    OperatorSymbol::ladder_a(p, false, +1)},
                   {},
                   {OperatorSymbol::ladder_a(p, true, +1),
                    OperatorSymbol::ladder_a(k, true, +1)});
    CHECK(close(evaluate_vev(w2, ctx).value, cplx{1.0, 0.0}));

    // spin mismatch kills the contraction entirely
    auto w3 = word({OperatorSymbol::ladder_a(k, false, +1)}, {},
                   {OperatorSymbol::ladder_a(k, true, -1)});
    CHECK(evaluate_vev(w3, ctx).n_pairings == 0);
  }
}

TEST_CASE("propagator coincidence handling") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  CHECK(scalar_propagator_timedomain(f, 4, 0.0, kOrigin).coincident);
  auto g = scalar_propagator_timedomain(f, 4, 0.0, DVec{{0.3, 0, 0}});
  CHECK(!g.coincident);
  // equal-time distinct points: both orderings agree, value is real
  CHECK(std::abs(g.value.imag()) < 1e-14);

  CavityField sf{FieldKind::Spinor, 1, 1.0, 0.5};
  CHECK(spinor_propagator_timedomain(sf, 4, 0.0, kOrigin).coincident);

  // time-ordering branches differ by a sign structure, not magnitude
  auto spl = spinor_propagator_timedomain(sf, 4, 0.4, kOrigin).value;
  auto smi = spinor_propagator_timedomain(sf, 4, -0.4, kOrigin).value;
  CHECK(spl.norm() > 0.0);
  CHECK(smi.norm() > 0.0);

  // detector propagator inside a word rejects coincident monopoles
  WickContext ctx{f, {1.0}, 2, {}};
  auto w = word({OperatorSymbol::sigma(false)},
                {{{OperatorSymbol::monopole(0.5)}, false},
                 {{OperatorSymbol::monopole(0.5)}, false}},
                {OperatorSymbol::sigma(true)});
  CHECK_THROWS_AS(evaluate_vev(w, ctx), CoincidenceLimit);
}

TEST_CASE("odd words and unsaturated detectors vanish") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  WickContext ctx{f, {1.0}, 2, {}};
  auto odd = word({OperatorSymbol::sigma(false)},
                  {{{OperatorSymbol::monopole(0.3)}, false},
                   {{OperatorSymbol::monopole(0.1)}, false}},
                  {});
  CHECK(evaluate_vev(odd, ctx).n_pairings == 0);
  CHECK(evaluate_vev(odd, ctx).value == cplx{0.0, 0.0});

  // a single normal-ordered group has no admissible full contraction
  auto norm = word({}, {OpGroup{{OperatorSymbol::scalar(0.2, kOrigin),
                                 OperatorSymbol::scalar(0.2, kOrigin)},
                                true}},
                   {});
  CHECK(evaluate_vev(norm, ctx).n_pairings == 0);
}

TEST_CASE("smeared symbols use the profile fourier transform") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  SpatialProfile gp = SpatialProfile::gaussian(0.08, DVec{{0.2, 0, 0}});
  WickContext ctx{f, {1.0}, 3, {gp}};

  const IVec k{{2, 0, 0}};
  OperatorSymbol phi = OperatorSymbol::scalar(0.7, kOrigin);
  phi.prof = 0;
  auto w = word({OperatorSymbol::ladder_a(k, false)}, {{{phi}, false}}, {});
  auto r = evaluate_vev(w, ctx);
  CHECK(r.n_pairings == 1);

  const double wk = f.dispersion(k);
  // smeared annihilator contraction: e^{+i w t} ptilde(k) / sqrt(2 w L^n)
  const cplx expect = std::exp(I * wk * 0.7) * gp.fourier(f.momentum(k)) /
                      std::sqrt(2.0 * wk * f.volume());
  CHECK(close(r.value, expect));
}

TEST_CASE("word grammar round trip") {
  const std::string text =
      "a{1;-} s-{0} | T[ mu{0}@{0.25} :phi@{0.5;0.125} phi+@{0.5;0.125}: "
      "psi#1@{-0.75;0.5} psibar#1@{0.25;0} ] | s+{0} A{2,-1}";
  OperatorWord w = parse_word(text);
  CHECK(w.prefix.size() == 2);
  CHECK(w.groups.size() == 4);
  CHECK(w.groups[1].normal);
  CHECK(w.groups[1].syms.size() == 2);
  CHECK(w.groups[1].syms[1].dagger);
  CHECK(w.suffix.size() == 2);
  CHECK(w.suffix[1].l == IVec{{2, -1, 0}});
  CHECK(w.prefix[0].s2 == -1);

  const std::string once = format_word(w);
  CHECK(format_word(parse_word(once)) == once);

  CHECK_THROWS_AS(parse_word("a{1}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("| T[ :phi@{0;0} ] |"), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("| T[ zz{1} ] |"), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("| T[ mu{0} ] |"), std::invalid_argument);
}

TEST_CASE("vertex time reassignment reaches tagged symbols only") {
  OperatorSymbol mu = OperatorSymbol::monopole(-1.0);
  mu.vertex = 0;
  OperatorSymbol phi = OperatorSymbol::scalar(-1.0, kOrigin);
  phi.vertex = 0;
  OperatorSymbol other = OperatorSymbol::scalar(0.5, kOrigin);
  other.vertex = 1;
  auto w = word({}, {{{mu}, false}, {{phi, other}, true}}, {});
  w.set_vertex_time(0, 2.5);
  CHECK(w.groups[0].syms[0].t == 2.5);
  CHECK(w.groups[1].syms[0].t == 2.5);
  CHECK(w.groups[1].syms[1].t == 0.5);
}
