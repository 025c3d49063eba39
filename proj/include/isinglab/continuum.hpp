#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/exact.hpp"
#include "isinglab/kernels.hpp"
#include "isinglab/lattice.hpp"
#include "isinglab/nearest_neighbor.hpp"
#include "isinglab/parallel.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/stats.hpp"

namespace isinglab {

// i_delta(t) = floor(t/delta + 1/2): the site whose cell
// [(i-1/2) delta, (i+1/2) delta) contains t.
inline long long lattice_index(double t, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("lattice_index: delta must lie in (0, 1)");
  return static_cast<long long>(std::floor(t / delta + 0.5));
}

// Lattice spacing delta and horizon T of one scaling step. The nearest
// neighbor coupling j_delta = -ln(delta)/2 makes tanh(j_delta) = (1-delta)/(1+delta),
// which is the form used throughout (it never needs the exponential).
struct ScalingParams {
  double delta = 0.1;
  double T = 1.0;

  ScalingParams(double delta_, double T_) : delta(delta_), T(T_) {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("ScalingParams: delta must lie in (0, 1)");
    if (!(T > 0.0)) throw std::invalid_argument("ScalingParams: T must be > 0");
  }

  double j_delta() const { return -0.5 * std::log(delta); }
  double tanh_j_delta() const { return (1.0 - delta) / (1.0 + delta); }
  int L_delta() const { return static_cast<int>(lattice_index(T, delta)); }
  int site_count() const { return 2 * L_delta() + 1; }
  // P(sigma_i sigma_{i+1} = -1) = 1/(1 + e^{2 j_delta}) = delta/(1+delta).
  double flip_probability() const { return delta / (1.0 + delta); }
};

// w^(delta)_k = delta^2 W(delta k), truncated where the value drops below
// the threshold. All kernel families are nonincreasing in |t|, so the scan
// stops at the first sub-threshold entry.
struct ScaledCoupling {
  PairCoupling w;
  double threshold = 1e-16;
  long long truncated_at = 0;  // first distance dropped (0 = nothing dropped)
};

inline ScaledCoupling scaled_pair_coupling(const Kernel& W, double delta, double threshold = 1e-16,
                                           long long max_range = 1 << 24) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("scaled_pair_coupling: delta must lie in (0, 1)");
  ScaledCoupling out;
  out.threshold = threshold;
  std::vector<double> w;
  for (long long k = 1;; ++k) {
    if (k > max_range) throw capacity_error("scaled_pair_coupling: support exceeds range cap");
    const double v = delta * delta * W(delta * static_cast<double>(k));
    if (!(v >= threshold)) {
      out.truncated_at = v > 0.0 ? k : 0;
      break;
    }
    w.push_back(v);
  }
  out.w = PairCoupling(std::move(w));
  return out;
}

// <sigma_{i(t_1)} ... sigma_{i(t_N)}> for the pure nearest-neighbor chain at
// spacing delta, in closed form.
inline double discrete_moment_nn(const ScalingParams& params, std::span<const double> times) {
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("discrete_moment_nn: times must be sorted");
  if (times.size() % 2 != 0) return 0.0;
  long long gaps = 0;
  for (std::size_t k = 0; k + 1 < times.size(); k += 2)
    gaps += lattice_index(times[k + 1], params.delta) - lattice_index(times[k], params.delta);
  if (gaps == 0) return 1.0;
  return std::pow(params.tanh_j_delta(), static_cast<double>(gaps));
}

inline double discrete_moment_nn(const ScalingParams& params,
                                 std::initializer_list<double> times) {
  return discrete_moment_nn(params, std::span<const double>(times.begin(), times.size()));
}

namespace detail {

// Exponent of the reweighting factor, the ordered double sum
// sum_{i,j in Lambda} w_{|i-j|} sigma_i sigma_j: the diagonal contributes
// n * delta^2 W(0) and each unordered pair enters twice.
inline double pair_exponent(const int8_t* s, int n, const PairCoupling& w, double diag) {
  double total = diag * static_cast<double>(n);
  const int K = std::min(w.range(), n - 1);
  for (int k = 1; k <= K; ++k) {
    long long corr = 0;
    for (int i = 0; i + k < n; ++i) corr += s[i] * s[i + k];
    total += 2.0 * w.w(k) * static_cast<double>(corr);
  }
  return total;
}

// The full interaction as an InteractionMap: nearest-neighbor j_delta plus
// pair strength 2 w_k (the ordered double sum counts each pair twice; the
// diagonal shifts every weight equally and cancels from expectations).
inline InteractionMap full_interaction(const ScalingParams& params, const PairCoupling& w) {
  const int L = params.L_delta();
  InteractionMap J{Lattice(L)};
  for (int i = -L; i < L; ++i) J.add({i, i + 1}, params.j_delta());
  const int K = std::min(w.range(), 2 * L);
  for (int i = -L; i <= L; ++i)
    for (int k = 1; k <= std::min(K, L - i); ++k)
      if (w.w(k) > 0.0) J.add({i, i + k}, 2.0 * w.w(k));
  return J;
}

// Collapses mapped time indices to the set of odd-multiplicity sites.
inline std::vector<int> mapped_sites(const ScalingParams& params, std::span<const double> times) {
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("times must be sorted");
  std::vector<int> sites;
  for (double t : times) {
    if (std::abs(t) > params.T)
      throw std::invalid_argument("time outside [-T, T]");
    sites.push_back(static_cast<int>(lattice_index(t, params.delta)));
  }
  std::sort(sites.begin(), sites.end());
  std::vector<int> reduced;
  for (std::size_t k = 0; k < sites.size();) {
    std::size_t m = k;
    while (m < sites.size() && sites[m] == sites[k]) ++m;
    if ((m - k) % 2 != 0) reduced.push_back(sites[k]);
    k = m;
  }
  return reduced;
}

}  // namespace detail

enum class DiscreteMethod { Exact, ReweightedMC };

struct DiscreteEstimate {
  MCEstimate value;
  double ess = 0.0;         // effective sample size of the weights (MC only)
  bool ess_warning = false; // ESS below 100
  bool exact = false;
};

// <sigma_{i(t_1)} ... sigma_{i(t_N)}> under the nearest-neighbor measure
// reweighted by exp(sum_{i,j} w^(delta)_{|i-j|} sigma_i sigma_j): exactly by
// enumeration, or as a ratio of weighted means over exact nearest-neighbor
// samples. A zero kernel short-circuits to the closed form (weight == 1).
inline DiscreteEstimate discrete_moment_full(const ScalingParams& params,
                                             std::span<const double> times, const Kernel& W,
                                             DiscreteMethod method, long long samples = 0,
                                             std::uint64_t seed = 0, int shards = 1,
                                             int workers = -1,
                                             int site_cap = kDefaultEnumerationCap) {
  DiscreteEstimate out;
  if (W.is_zero()) {
    out.value = {discrete_moment_nn(params, times), 0.0, 0, seed};
    out.exact = true;
    return out;
  }
  const auto sites = detail::mapped_sites(params, times);
  const auto scaled = scaled_pair_coupling(W, params.delta);
  const int L = params.L_delta();
  const int n = params.site_count();

  if (method == DiscreteMethod::Exact) {
    const auto J = detail::full_interaction(params, scaled.w);
    out.value = {expectation_exact(J, L, sites, site_cap), 0.0, 0, seed};
    out.exact = true;
    return out;
  }

  if (samples < 1) throw std::invalid_argument("discrete_moment_full: samples must be >= 1");
  const double diag = params.delta * params.delta * W(0.0);
  const double jd = params.j_delta();

  struct Acc {
    RunningMomentsK<2> mom;
    WeightDiagnostics wd;
    void merge(const Acc& o) {
      mom.merge(o.mom);
      wd.merge(o.wd);
    }
  };
  const auto acc = shard_map_reduce<Acc>(
      shards,
      [&](int shard) {
        Acc a;
        auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(shard));
        std::vector<int8_t> spins;
        const long long count = shard_size(samples, std::max(shards, 1), shard);
        for (long long k = 0; k < count; ++k) {
          sample_nn_spins(jd, n, rng, spins);
          const double weight =
              std::exp(detail::pair_exponent(spins.data(), n, scaled.w, diag));
          double prod = 1.0;
          for (int s : sites) prod *= spins[static_cast<std::size_t>(s + L)];
          a.mom.add({prod * weight, weight});
          a.wd.add(weight);
        }
        return a;
      },
      workers);

  if (!(acc.wd.sum_w > 0.0) || !std::isfinite(acc.wd.sum_w))
    throw numerical_error("discrete_moment_full: degenerate importance weights");
  out.value = ratio_estimate(acc.mom, seed);
  out.ess = acc.wd.ess();
  out.ess_warning = out.ess < 100.0;
  return out;
}

inline DiscreteEstimate discrete_moment_full(const ScalingParams& params,
                                             std::initializer_list<double> times, const Kernel& W,
                                             DiscreteMethod method, long long samples = 0,
                                             std::uint64_t seed = 0, int shards = 1,
                                             int workers = -1) {
  return discrete_moment_full(params, std::span<const double>(times.begin(), times.size()), W,
                              method, samples, seed, shards, workers);
}

// (1/T) sum_{i,j} delta^2 <sigma_i sigma_j> under the same measure. The
// double sum collapses to E[(delta sum_i sigma_i)^2] / T.
inline DiscreteEstimate susceptibility_discrete(const ScalingParams& params, const Kernel& W,
                                                DiscreteMethod method, long long samples = 0,
                                                std::uint64_t seed = 0, int shards = 1,
                                                int workers = -1,
                                                int site_cap = kDefaultEnumerationCap) {
  DiscreteEstimate out;
  const int L = params.L_delta();
  const int n = params.site_count();
  const double d2_over_T = params.delta * params.delta / params.T;

  if (W.is_zero()) {
    // closed form: sum_{i,j} rho^{|i-j|} with rho = tanh j_delta
    const double rho = params.tanh_j_delta();
    double sum = static_cast<double>(n);
    double pw = 1.0;
    for (int d = 1; d < n; ++d) {
      pw *= rho;
      sum += 2.0 * static_cast<double>(n - d) * pw;
    }
    out.value = {d2_over_T * sum, 0.0, 0, seed};
    out.exact = true;
    return out;
  }

  const auto scaled = scaled_pair_coupling(W, params.delta);

  if (method == DiscreteMethod::Exact) {
    const auto J = detail::full_interaction(params, scaled.w);
    const auto mat = pair_correlations_exact(J, L, site_cap);
    double sum = 0.0;
    for (double v : mat) sum += v;
    out.value = {d2_over_T * sum, 0.0, 0, seed};
    out.exact = true;
    return out;
  }

  if (samples < 1) throw std::invalid_argument("susceptibility_discrete: samples must be >= 1");
  const double diag = params.delta * params.delta * W(0.0);
  const double jd = params.j_delta();

  struct Acc {
    RunningMomentsK<2> mom;
    WeightDiagnostics wd;
    void merge(const Acc& o) {
      mom.merge(o.mom);
      wd.merge(o.wd);
    }
  };
  const auto acc = shard_map_reduce<Acc>(
      shards,
      [&](int shard) {
        Acc a;
        auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(shard));
        std::vector<int8_t> spins;
        const long long count = shard_size(samples, std::max(shards, 1), shard);
        for (long long k = 0; k < count; ++k) {
          sample_nn_spins(jd, n, rng, spins);
          const double weight =
              std::exp(detail::pair_exponent(spins.data(), n, scaled.w, diag));
          long long mag = 0;
          for (int8_t s : spins) mag += s;
          const double x = static_cast<double>(mag);
          a.mom.add({d2_over_T * x * x * weight, weight});
          a.wd.add(weight);
        }
        return a;
      },
      workers);

  if (!(acc.wd.sum_w > 0.0) || !std::isfinite(acc.wd.sum_w))
    throw numerical_error("susceptibility_discrete: degenerate importance weights");
  out.value = ratio_estimate(acc.mom, seed);
  out.ess = acc.wd.ess();
  out.ess_warning = out.ess < 100.0;
  return out;
}

// ---------------------------------------------------------------------------
// Tightness diagnostic: the probability that the induced step path has two
// sign changes closer than epsilon_gap, against the combinatorial bound
//   T s (eps + delta) e^{2T + delta} + sum_{k > floor(T s)} (2T+delta)^k / k!
// with the default choice s = eps^{-1/2}.
// ---------------------------------------------------------------------------

struct TightnessReport {
  double delta = 0.0;
  double epsilon_gap = 0.0;
  long long sample_count = 0;
  double empirical_probability = 0.0;
  double empirical_std_error = 0.0;
  double analytic_bound = 0.0;
};

namespace detail {

inline double poisson_tail(double x, long long k0) {  // sum_{k > k0} x^k / k!
  double term = std::exp(static_cast<double>(k0 + 1) * std::log(x) -
                         std::lgamma(static_cast<double>(k0 + 2)));
  double sum = 0.0;
  for (long long k = k0 + 1; k < k0 + 100000; ++k) {
    sum += term;
    term *= x / static_cast<double>(k + 1);
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace detail

inline double tightness_analytic_bound(double T, double epsilon_gap, double delta,
                                       double s_eps = -1.0) {
  if (s_eps < 0.0) s_eps = 1.0 / std::sqrt(epsilon_gap);
  if (s_eps > 1.0 / epsilon_gap)
    throw std::invalid_argument("tightness bound: s_eps must lie in [0, 1/epsilon]");
  const double x = 2.0 * T + delta;
  return T * s_eps * (epsilon_gap + delta) * std::exp(x) +
         detail::poisson_tail(x, static_cast<long long>(std::floor(T * s_eps)));
}

inline TightnessReport tightness_probability(const ScalingParams& params, double epsilon_gap,
                                             long long samples, std::uint64_t seed, int shards = 1,
                                             int workers = -1, double s_eps = -1.0) {
  if (!(epsilon_gap > params.delta))
    throw std::invalid_argument("tightness_probability: epsilon_gap must exceed delta");
  if (samples < 1) throw std::invalid_argument("tightness_probability: samples must be >= 1");

  const int n = params.site_count();
  const double jd = params.j_delta();

  struct Acc {
    long long hits = 0;
    long long total = 0;
    void merge(const Acc& o) {
      hits += o.hits;
      total += o.total;
    }
  };
  const auto acc = shard_map_reduce<Acc>(
      shards,
      [&](int shard) {
        Acc a;
        auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(shard));
        std::vector<int8_t> spins;
        const long long count = shard_size(samples, std::max(shards, 1), shard);
        for (long long k = 0; k < count; ++k) {
          sample_nn_spins(jd, n, rng, spins);
          // sign changes at bonds b1 < b2 are (b2 - b1) * delta apart
          long long prev_bond = -1;
          bool hit = false;
          for (int b = 0; b + 1 < n && !hit; ++b) {
            if (spins[static_cast<std::size_t>(b)] == spins[static_cast<std::size_t>(b + 1)])
              continue;
            if (prev_bond >= 0 &&
                static_cast<double>(b - prev_bond) * params.delta < epsilon_gap)
              hit = true;
            prev_bond = b;
          }
          a.hits += hit ? 1 : 0;
          ++a.total;
        }
        return a;
      },
      workers);

  TightnessReport r;
  r.delta = params.delta;
  r.epsilon_gap = epsilon_gap;
  r.sample_count = acc.total;
  r.empirical_probability = static_cast<double>(acc.hits) / static_cast<double>(acc.total);
  r.empirical_std_error = std::sqrt(r.empirical_probability * (1.0 - r.empirical_probability) /
                                    static_cast<double>(acc.total));
  r.analytic_bound = tightness_analytic_bound(params.T, epsilon_gap, params.delta, s_eps);
  return r;
}

}  // namespace isinglab
