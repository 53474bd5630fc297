#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "udw/response.hpp"

using namespace udw;

namespace {

// Independent closed-form partial sums used as regression pins. They sum
// the positive-quadrant reductions directly and must match the lattice
// sums at the same sup-norm cutoff for pointlike profiles.

// Model 1, n=1 massless, sudden + pointlike:
//   (lambda^2 L^2 / 2 pi^3) sum_l [l (A+l)^2]^-1 sin^2(pi (A+l) T / L),
//   A = Omega L / 2 pi.
double m1_sudden_1d(double lam, double Om, double L, double T, int cut) {
  const double A = Om * L / (2.0 * M_PI);
  double s = 0.0;
  for (int l = cut; l >= 1; --l) {
    const double sn = std::sin(M_PI * (A + l) * T / L);
    s += sn * sn / (l * (A + l) * (A + l));
  }
  return lam * lam * L * L / (2.0 * M_PI * M_PI * M_PI) * s;
}

// Models 2/3, (1,1) massless, sudden + pointlike:
//   (lambda^2 L^2 / 4 pi^4) sum_{l1,l2} [l1 l2 (A+l1+l2)^2]^-1
//   sin^2(pi (A+l1+l2) T / L)
double m23_sudden_1d(double lam, double Om, double L, double T, int cut) {
  const double A = Om * L / (2.0 * M_PI);
  double s = 0.0;
  for (int l1 = cut; l1 >= 1; --l1)
    for (int l2 = cut; l2 >= 1; --l2) {
      const double u = A + l1 + l2;
      const double sn = std::sin(M_PI * u * T / L);
      s += sn * sn / (l1 * l2 * u * u);
    }
  return lam * lam * L * L / (4.0 * std::pow(M_PI, 4)) * s;
}

// Model 4, (1,1) massless, sudden + pointlike:
//   (4 lambda^2 / pi^2) sum_{l1,l2} (A+l1+l2)^-2 sin^2(pi (A+l1+l2) T / L)
double m4_sudden_1d(double lam, double Om, double L, double T, int cut) {
  const double A = Om * L / (2.0 * M_PI);
  double s = 0.0;
  for (int l1 = cut; l1 >= 1; --l1)
    for (int l2 = cut; l2 >= 1; --l2) {
      const double u = A + l1 + l2;
      const double sn = std::sin(M_PI * u * T / L);
      s += sn * sn / (u * u);
    }
  return 4.0 * lam * lam / (M_PI * M_PI) * s;
}

// Model 4, (1,1) massless, Gaussian switching + pointlike:
//   (8 pi T^2 lambda^2 / L^2) sum exp[-(4 pi^2 T^2 / L^2)(A+l1+l2)^2]
double m4_gauss_1d(double lam, double Om, double L, double T, int cut) {
  const double A = Om * L / (2.0 * M_PI);
  const double a = 4.0 * M_PI * M_PI * T * T / (L * L);
  double s = 0.0;
  for (int l1 = cut; l1 >= 1; --l1)
    for (int l2 = cut; l2 >= 1; --l2) {
      const double u = A + l1 + l2;
      s += std::exp(-a * u * u);
    }
  return 8.0 * M_PI * T * T * lam * lam / (L * L) * s;
}

// Model 3, (1,1) massless, Gaussian switching + pointlike:
//   (T^2 lambda^2 / 2 pi) sum (l1 l2)^-1 exp[same]
double m3_gauss_1d(double lam, double Om, double L, double T, int cut) {
  const double A = Om * L / (2.0 * M_PI);
  const double a = 4.0 * M_PI * M_PI * T * T / (L * L);
  double s = 0.0;
  for (int l1 = cut; l1 >= 1; --l1)
    for (int l2 = cut; l2 >= 1; --l2) {
      const double u = A + l1 + l2;
      s += std::exp(-a * u * u) / (l1 * l2);
    }
  return T * T * lam * lam / (2.0 * M_PI) * s;
}

std::vector<int> sched4(int top) { return cutoff_schedule(top); }

}  // namespace

TEST_CASE("linear response matches the one-dimensional sudden closed form") {
  for (double L : {1.0, 2.3}) {
    CavityField f{FieldKind::RealScalar, 1, L, 0.0};
    DetectorSpec det;
    det.Omega = 1.7;
    det.lambda = 0.31;
    det.model = 1;
    det.switching = Switching::sudden(0.8);
    auto s = vep_linear(f, det, sched4(64), 1e-4);
    for (size_t j = 0; j < s.cutoffs.size(); ++j) {
      const double ref =
          m1_sudden_1d(det.lambda, det.Omega, L, 0.8, s.cutoffs[j]);
      CHECK(s.values[j] == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(s.diagnosis.verdict == Verdict::Converged);
  }
}

TEST_CASE("linear response agrees with a direct mode sum off the pinned cases") {
  CavityField f{FieldKind::RealScalar, 2, 1.4, 0.5};
  DetectorSpec det;
  det.Omega = 0.9;
  det.lambda = 0.2;
  det.model = 1;
  det.switching = Switching::gaussian(0.6);
  det.profile = SpatialProfile::gaussian(0.1, DVec{{0.2, -0.1, 0.0}});

  const int cut = 8;
  double ref = 0.0;
  for (const auto& l : mode_list(f.n, cut)) {
    const double w = f.dispersion(l);
    ref += det.switching.sq_fourier(det.Omega + w) *
           det.profile.sq_fourier(f.momentum(l)) / w;
  }
  ref *= det.lambda * det.lambda / (2.0 * f.volume());

  auto s = vep_linear(f, det, sched4(cut), 1e-10, 3);
  CHECK(s.values.back() == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("pair response matches the scalar sudden closed form, models 2 and 3 agree exactly") {
  for (double L : {1.0, 1.7}) {
    CavityField fr{FieldKind::RealScalar, 1, L, 0.0};
    CavityField fc{FieldKind::ComplexScalar, 1, L, 0.0};
    DetectorSpec det;
    det.Omega = 1.0;
    det.lambda = 0.1;
    det.switching = Switching::sudden(0.5);

    det.model = 2;
    auto s2 = vep_pair(fr, det, sched4(32), 1e-4);
    det.model = 3;
    auto s3 = vep_pair(fc, det, sched4(32), 1e-4);

    for (size_t j = 0; j < s2.cutoffs.size(); ++j) {
      const double ref =
          m23_sudden_1d(det.lambda, det.Omega, L, 0.5, s2.cutoffs[j]);
      CHECK(s2.values[j] == doctest::Approx(ref).epsilon(1e-12));
      CHECK(s2.values[j] == s3.values[j]);  // bitwise
    }
    CHECK(s2.diagnosis.verdict == Verdict::Converged);
  }
}

TEST_CASE("spinor pair response matches its closed forms") {
  CavityField f{FieldKind::Spinor, 1, 1.0, 0.0};
  DetectorSpec det;
  det.Omega = 1.0;
  det.lambda = 0.1;
  det.model = 4;

  SUBCASE("sudden switching is log divergent with the pinned summand") {
    det.switching = Switching::sudden(1.0);
    auto s = vep_pair(f, det, sched4(256), 1e-8, 4);
    for (size_t j = 0; j < s.cutoffs.size(); ++j) {
      const double ref =
          m4_sudden_1d(det.lambda, det.Omega, 1.0, 1.0, s.cutoffs[j]);
      CHECK(s.values[j] == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(s.diagnosis.verdict == Verdict::LogDivergent);
    CHECK(s.diagnosis.slope > 0.0);
  }

  SUBCASE("gaussian switching regularizes the sum") {
    det.switching = Switching::gaussian(0.5);
    auto s = vep_pair(f, det, sched4(32), 1e-10);
    const double ref = m4_gauss_1d(det.lambda, det.Omega, 1.0, 0.5, 32);
    CHECK(s.values.back() == doctest::Approx(ref).epsilon(1e-12));
    CHECK(s.diagnosis.verdict == Verdict::Converged);
  }
}

TEST_CASE("complex scalar gaussian switching closed form") {
  CavityField f{FieldKind::ComplexScalar, 1, 1.3, 0.0};
  DetectorSpec det;
  det.Omega = 0.8;
  det.lambda = 0.2;
  det.model = 3;
  det.switching = Switching::gaussian(0.4);
  auto s = vep_pair(f, det, sched4(24), 1e-10);
  const double ref = m3_gauss_1d(det.lambda, det.Omega, 1.3, 0.4, 24);
  CHECK(s.values.back() == doctest::Approx(ref).epsilon(1e-12));
  CHECK(s.diagnosis.verdict == Verdict::Converged);
}

TEST_CASE("tadpole term grows without bound and matches its formula") {
  DetectorSpec det;
  det.Omega = 1.0;
  det.lambda = 0.1;
  det.switching = Switching::sudden(1.0);

  SUBCASE("scalar") {
    CavityField f{FieldKind::RealScalar, 1, 1.0, 0.4};
    det.model = 2;
    auto s = vep_tadpole(f, det, {4, 16, 64, 256, 1024}, 1e-8);
    for (size_t j = 1; j < s.values.size(); ++j)
      CHECK(s.values[j] > s.values[j - 1]);

    double inv = 0.0;
    for (const auto& l : mode_list(1, 4)) inv += 1.0 / f.dispersion(l);
    const double ref = det.lambda * det.lambda / 4.0 * inv * inv *
                       det.switching.sq_fourier(det.Omega);
    CHECK(s.values.front() == doctest::Approx(ref).epsilon(1e-12));
  }

  SUBCASE("spinor carries the 8 m^2 weight and vanishes when massless") {
    CavityField f{FieldKind::Spinor, 1, 1.0, 0.4};
    det.model = 4;
    auto s = vep_tadpole(f, det, {4, 16, 64, 256, 1024}, 1e-8);
    for (size_t j = 1; j < s.values.size(); ++j)
      CHECK(s.values[j] > s.values[j - 1]);

    double inv = 0.0;
    for (const auto& l : mode_list(1, 4)) inv += 1.0 / f.dispersion(l);
    const double ref = det.lambda * det.lambda * 8.0 * f.m * f.m / 2.0 * inv *
                       inv * det.switching.sq_fourier(det.Omega);
    CHECK(s.values.front() == doctest::Approx(ref).epsilon(1e-12));

    CavityField f0{FieldKind::Spinor, 1, 1.0, 0.0};
    auto z = vep_tadpole(f0, det, sched4(16), 1e-8);
    for (double v : z.values) CHECK(v == 0.0);
  }
}

TEST_CASE("renormalized dispatch and the cubic tail bound") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  DetectorSpec det;
  det.Omega = 1.0;
  det.lambda = 0.1;
  det.model = 1;
  det.switching = Switching::sudden(1.0);

  auto a = vep_renormalized(f, det, sched4(32), 1e-8);
  auto b = vep_linear(f, det, sched4(32), 1e-8);
  CHECK(a.values == b.values);

  const double bound = vep_linear_sudden_point_bound(f, det, 1000000);
  const double c = det.lambda * det.lambda /
                   (2.0 * M_PI * M_PI * M_PI);  // L = 1
  CHECK(bound == doctest::Approx(c * 1.2020569031595942).epsilon(1e-9));
  CHECK(a.values.back() <= bound);

  CavityField fm{FieldKind::RealScalar, 1, 1.0, 0.3};
  CHECK_THROWS_AS(vep_linear_sudden_point_bound(fm, det, 100),
                  std::invalid_argument);
  det.switching = Switching::gaussian(1.0);
  CHECK_THROWS_AS(vep_linear_sudden_point_bound(f, det, 100),
                  std::invalid_argument);
}

TEST_CASE("three-dimensional verdicts at modest cutoffs") {
  DetectorSpec det;
  det.Omega = 1.0;
  det.lambda = 0.1;
  det.model = 1;

  SUBCASE("sudden + pointlike is log divergent in three dimensions") {
    CavityField f{FieldKind::RealScalar, 3, 1.0, 0.0};
    det.switching = Switching::sudden(1.0);
    auto s = vep_linear(f, det, sched4(48), 1e-8, 4);
    CHECK(s.diagnosis.verdict == Verdict::LogDivergent);
  }

  SUBCASE("gaussian switching restores convergence") {
    CavityField f{FieldKind::RealScalar, 3, 1.0, 0.0};
    det.switching = Switching::gaussian(0.5);
    auto s = vep_linear(f, det, sched4(16), 1e-10, 4);
    CHECK(s.diagnosis.verdict == Verdict::Converged);
  }
}

TEST_CASE("results are bit-identical across thread counts") {
  CavityField f{FieldKind::Spinor, 1, 1.0, 0.25};
  DetectorSpec det;
  det.Omega = 1.1;
  det.lambda = 0.15;
  det.model = 4;
  det.switching = Switching::gaussian(0.7);
  det.profile = SpatialProfile::gaussian(0.05);

  auto s1 = vep_pair(f, det, sched4(40), 1e-8, 1);
  auto s4 = vep_pair(f, det, sched4(40), 1e-8, 4);
  CHECK(s1.values == s4.values);

  CavityField f2{FieldKind::RealScalar, 3, 1.0, 0.0};
  det.model = 1;
  auto l1 = vep_linear(f2, det, sched4(12), 1e-8, 1);
  auto l7 = vep_linear(f2, det, sched4(12), 1e-8, 7);
  CHECK(l1.values == l7.values);
}

TEST_CASE("schedule validation") {
  CavityField f{FieldKind::RealScalar, 1, 1.0, 0.0};
  DetectorSpec det;
  det.model = 1;
  CHECK_THROWS_AS(vep_linear(f, det, {1, 2, 3}, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(vep_linear(f, det, {1, 2, 2, 3}, 1e-8),
                  std::invalid_argument);
  det.model = 2;
  CHECK_THROWS_AS(vep_linear(f, det, sched4(8), 1e-8), std::invalid_argument);
  // model / kind mismatch caught by validation
  det.model = 3;
  CHECK_THROWS_AS(vep_pair(f, det, sched4(8), 1e-8), std::invalid_argument);
}
