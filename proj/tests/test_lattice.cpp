#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "udw/dirac.hpp"
#include "udw/lattice.hpp"

using namespace udw;

TEST_CASE("mode enumeration excludes the zero mode and is lexicographic") {
  auto modes = mode_list(1, 3);
  CHECK(modes.size() == 6);
  CHECK(modes.front() == IVec{{-3, 0, 0}});
  CHECK(modes.back() == IVec{{3, 0, 0}});
  for (const auto& l : modes) CHECK(!l.zero());

  auto m2 = mode_list(2, 2);
  CHECK(m2.size() == 24);  // 5^2 - 1
  CHECK(std::is_sorted(m2.begin(), m2.end()));

  auto m3 = mode_list(3, 1);
  CHECK(m3.size() == 26);  // 3^3 - 1
}

TEST_CASE("dispersion relation") {
  CavityField f(FieldKind::RealScalar, 1, 2.0, 0.5);
  const IVec l{{3, 0, 0}};
  const double k = 2.0 * M_PI * 3 / 2.0;
  CHECK(f.dispersion(l) == doctest::Approx(std::sqrt(k * k + 0.25)).epsilon(1e-15));
  CHECK_THROWS_AS(f.dispersion(IVec{}), std::invalid_argument);
  CHECK_THROWS_AS(CavityField(FieldKind::Spinor, 2, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("scalar mode function normalization and phase") {
  CavityField f(FieldKind::RealScalar, 1, 1.0, 0.0);
  const IVec l{{2, 0, 0}};
  const double w = f.dispersion(l);
  const DVec x{{0.3, 0, 0}};
  const cplx v = scalar_mode_full(f, l, 0.7, x);
  const cplx expect =
      std::exp(-I * (w * 0.7 - 2.0 * 2.0 * M_PI * 0.3)) / std::sqrt(2.0 * w);
  CHECK(std::abs(v - expect) < 1e-15);
}

TEST_CASE("gamma matrices satisfy the Clifford algebra") {
  auto anti = [](const Mat4& a, const Mat4& b) { return a * b + b * a; };
  CHECK((anti(gamma0(), gamma0()) - 2.0 * Mat4::Identity()).norm() < 1e-15);
  for (int i = 1; i <= 3; ++i) {
    CHECK((anti(gamma_sp(i), gamma_sp(i)) + 2.0 * Mat4::Identity()).norm() <
          1e-15);
    CHECK(anti(gamma0(), gamma_sp(i)).norm() < 1e-15);
    for (int j = i + 1; j <= 3; ++j)
      CHECK(anti(gamma_sp(i), gamma_sp(j)).norm() < 1e-15);
  }
}

TEST_CASE("massive spinor amplitudes: normalization and Dirac equation") {
  for (int n : {1, 3}) {
    CavityField f(FieldKind::Spinor, n, 1.3, 0.7);
    const IVec l = (n == 1) ? IVec{{2, 0, 0}} : IVec{{1, -2, 3}};
    for (int s2 : {+1, -1}) {
      const Spinor u = spinor_amp(f, l, s2, +1);
      const Spinor v = spinor_amp(f, l, s2, -1);
      // ubar u = 1, vbar v = -1, u†u = omega/m
      CHECK(std::abs((bar(u) * u).value() - cplx(1.0)) < 1e-12);
      CHECK(std::abs((bar(v) * v).value() - cplx(-1.0)) < 1e-12);
      CHECK(std::abs(u.squaredNorm() - f.dispersion(l) / f.m) < 1e-12);
      // (slash(k) - m) u = 0 and (slash(k) + m) v = 0
      const Mat4 ks = momentum_slash(f, l);
      CHECK((ks * u - f.m * u).norm() < 1e-12);
      CHECK((ks * v + f.m * v).norm() < 1e-12);
    }
  }
}

TEST_CASE("equal-momentum spinor products") {
  // massive: ubar_{k,s,eps} u_{k,r,delta} = eps delta_{sr} delta_{eps delta}
  CavityField f(FieldKind::Spinor, 1, 1.0, 0.4);
  for (const IVec l : {IVec{{1, 0, 0}}, IVec{{-3, 0, 0}}})
    for (int s2 : {+1, -1})
      for (int r2 : {+1, -1})
        for (int eps : {+1, -1})
          for (int del : {+1, -1}) {
            const cplx prod =
                (bar(spinor_amp(f, l, s2, eps)) * spinor_amp(f, l, r2, del)).value();
            const cplx expect =
                (s2 == r2 && eps == del) ? cplx(eps) : cplx(0.0);
            CHECK(std::abs(prod - expect) < 1e-12);
          }
  // massless: all equal-momentum bar products vanish
  CavityField g(FieldKind::Spinor, 1, 1.0, 0.0);
  for (const IVec l : {IVec{{1, 0, 0}}, IVec{{-2, 0, 0}}})
    for (int s2 : {+1, -1})
      for (int r2 : {+1, -1})
        for (int eps : {+1, -1})
          for (int del : {+1, -1}) {
            const cplx prod =
                (bar(spinor_amp(g, l, s2, eps)) * spinor_amp(g, l, r2, del)).value();
            CHECK(std::abs(prod) < 1e-12);
          }
}

TEST_CASE("massless n=1 pair products") {
  CavityField f(FieldKind::Spinor, 1, 1.0, 0.0);
  const IVec k{{2, 0, 0}}, p{{-3, 0, 0}};
  for (int s2 : {+1, -1})
    for (int r2 : {+1, -1}) {
      const cplx uu = (bar(spinor_amp(f, k, s2, +1)) * spinor_amp(f, p, r2, +1)).value();
      const cplx uv = (bar(spinor_amp(f, k, s2, +1)) * spinor_amp(f, p, r2, -1)).value();
      const double sk = 1.0, sp = -1.0;  // sgn of momenta
      const double s = 0.5 * s2;
      if (s2 == r2) {
        CHECK(std::abs(uu - 0.5 * (1.0 - sk * sp)) < 1e-12);
        CHECK(std::abs(uv - s * (sp - sk)) < 1e-12);
      } else {
        CHECK(std::abs(uu) < 1e-12);
        CHECK(std::abs(uv) < 1e-12);
      }
    }
}

TEST_CASE("completeness sums match (slash(k) +- m)/2m elementwise") {
  // the criterion-8 sweep over |l| <= 5 in both dimensions runs in the
  // acceptance binary; spot-check here
  for (int n : {1, 3})
    for (double m : {0.0, 0.9}) {
      CavityField f(FieldKind::Spinor, n, 1.0, m);
      const IVec l = (n == 1) ? IVec{{4, 0, 0}} : IVec{{2, 1, -1}};
      for (int eps : {+1, -1}) {
        Mat4 s = Mat4::Zero();
        for (int s2 : {+1, -1}) {
          const Spinor a = spinor_amp(f, l, s2, eps);
          s += a * bar(a);
        }
        CHECK((s - spin_sum(f, l, eps)).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
}
