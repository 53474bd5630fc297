#include "udw/response.hpp"

#include <atomic>
#include <thread>

namespace udw {
namespace {

// Deterministic parallel reduction: each outer index gets its own
// compensated partial sum; partials are combined sequentially in index
// order, so the result does not depend on the thread count.
double reduce_outer(size_t count, int threads,
                    const std::function<double(size_t)>& term) {
  std::vector<double> partial(count);
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) partial[i] = term(i);
  } else {
    std::atomic<size_t> next{0};
    auto work = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= count) return;
        partial[i] = term(i);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  NeumaierSum acc;
  for (double v : partial) acc.add(v);
  return acc.value();
}

void check_schedule(const std::vector<int>& sched) {
  if (sched.size() < 4)
    throw std::invalid_argument("schedule needs >= 4 cutoffs");
  for (size_t j = 1; j < sched.size(); ++j)
    if (sched[j] <= sched[j - 1])
      throw std::invalid_argument("schedule must be strictly increasing");
  if (sched.front() < 1) throw std::invalid_argument("cutoffs must be >= 1");
}

PartialSumSeries finish(std::vector<int> sched, std::vector<double> vals,
                        double tol) {
  PartialSumSeries s;
  s.cutoffs = std::move(sched);
  s.values = std::move(vals);
  s.tail_bounds = tail_estimates(s.values);
  s.diagnosis = convergence_diagnose(s.cutoffs, s.values, tol);
  return s;
}

double one_over_omega_sum(const CavityField& f, int cutoff) {
  NeumaierSum acc;
  for_each_mode(f.n, cutoff,
                [&](const IVec& l) { acc.add(1.0 / f.dispersion(l)); });
  return acc.value();
}

}  // namespace

PartialSumSeries vep_linear(const CavityField& f, const DetectorSpec& det,
                            const std::vector<int>& schedule, double tol,
                            int threads) {
  det.validate(f);
  if (det.model != 1) throw std::invalid_argument("vep_linear needs model 1");
  check_schedule(schedule);
  const double pref = det.lambda * det.lambda / (2.0 * f.volume());

  std::vector<double> vals;
  for (int cut : schedule) {
    if (f.n == 1) {
      NeumaierSum acc;
      for_each_mode(f.n, cut, [&](const IVec& l) {
        const double w = f.dispersion(l);
        acc.add(det.switching.sq_fourier(det.Omega + w) *
                det.profile.sq_fourier(f.momentum(l)) / w);
      });
      vals.push_back(pref * acc.value());
    } else {
      // Parallel over the leading mode component.
      const size_t rows = 2 * cut + 1;
      const double v = reduce_outer(rows, threads, [&](size_t row) {
        const int a = static_cast<int>(row) - cut;
        NeumaierSum acc;
        const int lo2 = -cut, hi2 = cut;
        const int lo3 = (f.n >= 3) ? -cut : 0, hi3 = (f.n >= 3) ? cut : 0;
        IVec l;
        l[0] = a;
        for (int b = lo2; b <= hi2; ++b)
          for (int c = lo3; c <= hi3; ++c) {
            if (a == 0 && b == 0 && c == 0) continue;
            l[1] = b;
            l[2] = c;
            const double w = f.dispersion(l);
            acc.add(det.switching.sq_fourier(det.Omega + w) *
                    det.profile.sq_fourier(f.momentum(l)) / w);
          }
        return acc.value();
      });
      vals.push_back(pref * v);
    }
  }
  return finish(schedule, std::move(vals), tol);
}

PartialSumSeries vep_pair(const CavityField& f, const DetectorSpec& det,
                          const std::vector<int>& schedule, double tol,
                          int threads) {
  det.validate(f);
  if (det.model < 2) throw std::invalid_argument("vep_pair needs model 2..4");
  check_schedule(schedule);
  const double L2n = f.volume() * f.volume();
  const double pref = (det.model == 4)
                          ? det.lambda * det.lambda / (2.0 * L2n)
                          : det.lambda * det.lambda / (4.0 * L2n);
  const bool spinor = det.model == 4;
  const double m = f.m;

  std::vector<double> vals;
  for (int cut : schedule) {
    const auto modes = mode_list(f.n, cut);
    const size_t M = modes.size();
    std::vector<double> omega(M);
    std::vector<DVec> mom(M);
    for (size_t i = 0; i < M; ++i) {
      omega[i] = f.dispersion(modes[i]);
      mom[i] = f.momentum(modes[i]);
    }
    const double v = reduce_outer(M, threads, [&](size_t i) {
      NeumaierSum acc;
      const double wk = omega[i];
      const DVec k = mom[i];
      for (size_t j = 0; j < M; ++j) {
        const double wp = omega[j];
        const DVec p = mom[j];
        const DVec kp = {{k[0] + p[0], k[1] + p[1], k[2] + p[2]}};
        const double chi2 = det.switching.sq_fourier(det.Omega + wk + wp);
        const double prof2 = det.profile.sq_fourier(kp);
        double weight;
        if (spinor) {
          const double ak = wk + m, ap = wp + m;
          const DVec d = {{k[0] / ak - p[0] / ap, k[1] / ak - p[1] / ap,
                           k[2] / ak - p[2] / ap}};
          weight = (ak * ap / (wk * wp)) * d.norm2();
        } else {
          weight = 1.0 / (wk * wp);
        }
        acc.add(weight * prof2 * chi2);
      }
      return acc.value();
    });
    vals.push_back(pref * v);
  }
  return finish(schedule, std::move(vals), tol);
}

PartialSumSeries vep_tadpole(const CavityField& f, const DetectorSpec& det,
                             const std::vector<int>& schedule, double tol) {
  det.validate(f);
  if (det.model < 2)
    throw std::invalid_argument("tadpole exists for models 2..4 only");
  check_schedule(schedule);
  const double L2n = f.volume() * f.volume();
  const double chi2 = det.switching.sq_fourier(det.Omega);
  const double pref = (det.model == 4)
                          ? det.lambda * det.lambda * 8.0 * f.m * f.m /
                                (2.0 * L2n)
                          : det.lambda * det.lambda / (4.0 * L2n);
  std::vector<double> vals;
  for (int cut : schedule) {
    const double s = one_over_omega_sum(f, cut);
    vals.push_back(pref * s * s * chi2);
  }
  return finish(schedule, std::move(vals), tol);
}

PartialSumSeries vep_renormalized(const CavityField& f,
                                  const DetectorSpec& det,
                                  const std::vector<int>& schedule, double tol,
                                  int threads) {
  if (det.model == 1) return vep_linear(f, det, schedule, tol, threads);
  return vep_pair(f, det, schedule, tol, threads);
}

double vep_linear_sudden_point_bound(const CavityField& f,
                                     const DetectorSpec& det, long lmax) {
  if (f.n != 1 || f.m != 0.0 ||
      det.switching.kind != Switching::Kind::Sudden ||
      det.profile.kind != SpatialProfile::Kind::PointLike)
    throw std::invalid_argument(
        "bound applies to n=1 massless sudden pointlike only");
  NeumaierSum acc;
  for (long l = lmax; l >= 1; --l) {
    const double d = static_cast<double>(l);
    acc.add(1.0 / (d * d * d));
  }
  const double c = det.lambda * det.lambda * f.L * f.L /
                   (2.0 * M_PI * M_PI * M_PI);
  return c * acc.value();
}

}  // namespace udw
