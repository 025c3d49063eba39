#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/kernels.hpp"
#include "isinglab/parallel.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/stats.hpp"

namespace isinglab {

// One realization of the telegraph path X(t) = B (-1)^{N(t)} restricted to
// [-T, T]: an initial fair sign and the Poisson jump times.
struct JumpPath {
  double horizon = 1.0;            // T
  int initial_sign = 1;            // B
  std::vector<double> jump_times;  // strictly increasing, inside (-T, T)

  JumpPath(double T, int B, std::vector<double> jumps)
      : horizon(T), initial_sign(B), jump_times(std::move(jumps)) {
    if (!(T > 0.0)) throw std::invalid_argument("JumpPath: horizon must be > 0");
    if (B != 1 && B != -1) throw std::invalid_argument("JumpPath: initial sign must be +-1");
    for (std::size_t k = 0; k < jump_times.size(); ++k) {
      if (!(jump_times[k] > -T && jump_times[k] < T))
        throw std::invalid_argument("JumpPath: jump outside (-T, T)");
      if (k > 0 && !(jump_times[k] > jump_times[k - 1]))
        throw std::invalid_argument("JumpPath: jump times must be strictly increasing");
    }
  }

  // Right-continuous evaluation: counts jumps in (-T, t].
  int value_at(double t) const {
    const auto n = std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin();
    return (n & 1) ? -initial_sign : initial_sign;
  }
};

// Exact draw of X on [-T, T]: Poisson(2 T intensity) jumps placed uniformly.
inline JumpPath sample_path(double T, double intensity, CounterRng& rng) {
  if (!(T > 0.0)) throw std::invalid_argument("sample_path: T must be > 0");
  if (!(intensity > 0.0)) throw std::invalid_argument("sample_path: intensity must be > 0");
  while (true) {
    const long long count = rng.poisson(2.0 * T * intensity);
    std::vector<double> jumps(static_cast<std::size_t>(count));
    for (auto& t : jumps) {
      do {
        t = rng.uniform(-T, T);
      } while (!(t > -T && t < T));
    }
    std::sort(jumps.begin(), jumps.end());
    if (std::adjacent_find(jumps.begin(), jumps.end()) == jumps.end())
      return JumpPath(T, rng.fair_sign(), std::move(jumps));
    // colliding jump times have probability ~2^-53 per pair; redraw
  }
}

// E[X(t_1) ... X(t_N)] in closed form: zero for odd N, else
// exp(-2 sum_k |t_{2k} - t_{2k-1}|) over consecutive pairs of the sorted
// times (disjoint increments pair up two by two).
inline double moment_closed(std::span<const double> sorted_times) {
  if (!std::is_sorted(sorted_times.begin(), sorted_times.end()))
    throw std::invalid_argument("moment_closed: times must be sorted");
  if (sorted_times.size() % 2 != 0) return 0.0;
  double gaps = 0.0;
  for (std::size_t k = 0; k + 1 < sorted_times.size(); k += 2)
    gaps += sorted_times[k + 1] - sorted_times[k];
  return std::exp(-2.0 * gaps);
}

inline double moment_closed(std::initializer_list<double> sorted_times) {
  return moment_closed(std::span<const double>(sorted_times.begin(), sorted_times.size()));
}

// int_{-T}^{T} X(t) dt, evaluated exactly over the constant segments.
inline double time_integral(const JumpPath& path) {
  double acc = 0.0;
  double prev = -path.horizon;
  double sign = path.initial_sign;
  for (double t : path.jump_times) {
    acc += sign * (t - prev);
    prev = t;
    sign = -sign;
  }
  acc += sign * (path.horizon - prev);
  return acc;
}

// int int W(t-s) X(t) X(s) dt ds over [-T,T]^2, as a sum of exact (or
// per-pair quadrature) rectangle integrals over segment pairs.
inline double interaction_double_integral(const JumpPath& path, const Kernel& W,
                                          double pair_tol = 1e-10) {
  if (W.is_zero()) return 0.0;
  const std::size_t n_seg = path.jump_times.size() + 1;
  std::vector<double> lo(n_seg), hi(n_seg);
  std::vector<double> sgn(n_seg);
  {
    double prev = -path.horizon;
    double s = path.initial_sign;
    for (std::size_t k = 0; k < n_seg; ++k) {
      lo[k] = prev;
      hi[k] = k + 1 < n_seg ? path.jump_times[k] : path.horizon;
      sgn[k] = s;
      prev = hi[k];
      s = -s;
    }
  }
  double total = 0.0;
  for (std::size_t a = 0; a < n_seg; ++a) {
    total += W.segment_double_integral(lo[a], hi[a], lo[a], hi[a], pair_tol);
    for (std::size_t b = 0; b < a; ++b)
      total += 2.0 * sgn[a] * sgn[b] * W.segment_double_integral(lo[a], hi[a], lo[b], hi[b], pair_tol);
  }
  return total;
}

// chi(W=0, T) = (1/T) int int e^{-2|u-v|} du dv = 2 - (1 - e^{-4T}) / (2T).
inline double susceptibility_zero_kernel(double T) {
  return 2.0 - (1.0 - std::exp(-4.0 * T)) / (2.0 * T);
}

struct SusceptibilityEstimate {
  MCEstimate value;        // ratio with delta-method standard error
  MCEstimate numerator;    // (1/T) (int X)^2 e^(exponent)
  MCEstimate denominator;  // e^(exponent), the partition estimate
};

struct FieldDerivativeEstimate {
  MCEstimate value;  // second mu-derivative of (1/T) ln Z_mu at 0
  double first_difference = 0.0;
  double first_difference_std_error = 0.0;
  bool cancellation_warning = false;
};

namespace detail {

template <typename Acc, typename PerPath>
Acc mc_over_paths(const Kernel& W, double T, double intensity, long long samples,
                  std::uint64_t seed, int shards, int workers, PerPath&& per_path) {
  if (samples < 1) throw std::invalid_argument("monte carlo: samples must be >= 1");
  return shard_map_reduce<Acc>(
      shards,
      [&](int shard) {
        Acc acc;
        auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(shard));
        const long long n = shard_size(samples, std::max(shards, 1), shard);
        for (long long k = 0; k < n; ++k) {
          const JumpPath path = sample_path(T, intensity, rng);
          per_path(acc, path, interaction_double_integral(path, W));
        }
        return acc;
      },
      workers);
}

}  // namespace detail

// Z(W, T): sample mean of exp(double-integral exponent).
inline MCEstimate mc_partition(const Kernel& W, double T, long long samples, std::uint64_t seed,
                               int shards = 1, int workers = -1, double intensity = 1.0) {
  const auto acc = detail::mc_over_paths<RunningMoments>(
      W, T, intensity, samples, seed, shards, workers,
      [](RunningMoments& a, const JumpPath&, double exponent) { a.add(std::exp(exponent)); });
  MCEstimate e;
  e.mean = acc.mean;
  e.std_error = acc.std_error();
  e.samples = acc.count;
  e.seed = seed;
  return e;
}

// The susceptibility ratio E[(1/T)(int X)^2 e^O] / E[e^O] over one common
// path ensemble, with delta-method standard error.
inline SusceptibilityEstimate mc_susceptibility(const Kernel& W, double T, long long samples,
                                                std::uint64_t seed, int shards = 1,
                                                int workers = -1, double intensity = 1.0) {
  if (samples < 2) throw std::invalid_argument("mc_susceptibility: samples must be >= 2");
  const auto acc = detail::mc_over_paths<RunningMomentsK<2>>(
      W, T, intensity, samples, seed, shards, workers,
      [T](RunningMomentsK<2>& a, const JumpPath& p, double exponent) {
        const double s = time_integral(p);
        const double w = std::exp(exponent);
        a.add({s * s / T * w, w});
      });
  SusceptibilityEstimate out;
  out.value = ratio_estimate(acc, seed);
  out.numerator = {acc.mean[0], std::sqrt(acc.covariance(0, 0) / static_cast<double>(acc.count)),
                   acc.count, seed};
  out.denominator = {acc.mean[1], std::sqrt(acc.covariance(1, 1) / static_cast<double>(acc.count)),
                     acc.count, seed};
  if (!(out.denominator.mean > 0.0))
    throw numerical_error("mc_susceptibility: degenerate partition estimate");
  return out;
}

// E[X(t_1)...X(t_N) e^O] / E[e^O] over a common ensemble: the jump-process
// side of the continuum-limit statement.
inline MCEstimate mc_weighted_moment(const Kernel& W, double T, std::span<const double> times,
                                     long long samples, std::uint64_t seed, int shards = 1,
                                     int workers = -1, double intensity = 1.0) {
  if (samples < 2) throw std::invalid_argument("mc_weighted_moment: samples must be >= 2");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("mc_weighted_moment: times must be sorted");
  std::vector<double> ts(times.begin(), times.end());
  const auto acc = detail::mc_over_paths<RunningMomentsK<2>>(
      W, T, intensity, samples, seed, shards, workers,
      [&ts](RunningMomentsK<2>& a, const JumpPath& p, double exponent) {
        double prod = 1.0;
        for (double t : ts) prod *= p.value_at(t);
        const double w = std::exp(exponent);
        a.add({prod * w, w});
      });
  return ratio_estimate(acc, seed);
}

// Z_mu(W, T): mean of exp(exponent + mu int X).
inline MCEstimate mc_partition_with_field(const Kernel& W, double T, double mu, long long samples,
                                          std::uint64_t seed, int shards = 1, int workers = -1,
                                          double intensity = 1.0) {
  const auto acc = detail::mc_over_paths<RunningMoments>(
      W, T, intensity, samples, seed, shards, workers,
      [mu](RunningMoments& a, const JumpPath& p, double exponent) {
        a.add(std::exp(exponent + mu * time_integral(p)));
      });
  MCEstimate e;
  e.mean = acc.mean;
  e.std_error = acc.std_error();
  e.samples = acc.count;
  e.seed = seed;
  return e;
}

// Central second difference of (1/T) ln Z_mu at mu = 0 with step h. The
// three field values share one path ensemble (common random numbers), so
// the difference variance comes from the joint covariance, not three
// independent runs.
inline FieldDerivativeEstimate fd_susceptibility(const Kernel& W, double T, double h,
                                                 long long samples, std::uint64_t seed,
                                                 int shards = 1, int workers = -1,
                                                 double intensity = 1.0) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_susceptibility: h must be > 0");
  if (samples < 2) throw std::invalid_argument("fd_susceptibility: samples must be >= 2");
  const auto acc = detail::mc_over_paths<RunningMomentsK<3>>(
      W, T, intensity, samples, seed, shards, workers,
      [h](RunningMomentsK<3>& a, const JumpPath& p, double exponent) {
        const double s = time_integral(p);
        a.add({std::exp(exponent + h * s), std::exp(exponent), std::exp(exponent - h * s)});
      });

  const double n = static_cast<double>(acc.count);
  const double mp = acc.mean[0], m0 = acc.mean[1], mm = acc.mean[2];
  if (!(mp > 0.0 && m0 > 0.0 && mm > 0.0))
    throw numerical_error("fd_susceptibility: nonpositive partition estimate");

  const double log_diff = std::log(mp) - 2.0 * std::log(m0) + std::log(mm);
  const double scale = 1.0 / (T * h * h);

  // delta method for g = (log x - 2 log y + log z) * scale
  const double g[3] = {scale / mp, -2.0 * scale / m0, scale / mm};
  double var = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var += g[i] * g[j] * acc.covariance(i, j);

  FieldDerivativeEstimate out;
  out.value = {log_diff * scale, var > 0.0 ? std::sqrt(var / n) : 0.0, acc.count, seed};

  const double g1[3] = {1.0 / (2.0 * h * mp), 0.0, -1.0 / (2.0 * h * mm)};
  double var1 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var1 += g1[i] * g1[j] * acc.covariance(i, j);
  out.first_difference = (std::log(mp) - std::log(mm)) / (2.0 * h);
  out.first_difference_std_error = var1 > 0.0 ? std::sqrt(var1 / n) : 0.0;

  // floating-point noise floor of the second difference, not MC noise
  const double floor = 1e-13 * (std::abs(std::log(mp)) + 2.0 * std::abs(std::log(m0)) +
                                std::abs(std::log(mm)) + 1.0);
  out.cancellation_warning = std::abs(log_diff) < floor;
  return out;
}

}  // namespace isinglab
