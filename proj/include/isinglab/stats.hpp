#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace isinglab {

// Streaming (count, mean, M2) in Welford form. merge() uses Chan's parallel
// update, so shard results combined in a fixed order are bit-reproducible.
struct RunningMoments {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n1 = static_cast<double>(count);
    const double n2 = static_cast<double>(o.count);
    const double d = o.mean - mean;
    const double n = n1 + n2;
    mean += d * n2 / n;
    m2 += o.m2 + d * d * n1 * n2 / n;
    count += o.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// K-variate version carrying the full covariance M2 matrix (upper triangle).
template <int K>
struct RunningMomentsK {
  static_assert(K >= 1);
  long long count = 0;
  std::array<double, K> mean{};
  std::array<double, K*(K + 1) / 2> m2{};  // row-major upper triangle

  static constexpr int tri(int i, int j) {  // i <= j
    return i * K - i * (i - 1) / 2 + (j - i);
  }

  void add(const std::array<double, K>& x) {
    ++count;
    const double inv_n = 1.0 / static_cast<double>(count);
    std::array<double, K> d_before;
    for (int i = 0; i < K; ++i) d_before[i] = x[i] - mean[i];
    for (int i = 0; i < K; ++i) mean[i] += d_before[i] * inv_n;
    for (int i = 0; i < K; ++i)
      for (int j = i; j < K; ++j) m2[tri(i, j)] += d_before[i] * (x[j] - mean[j]);
  }

  void merge(const RunningMomentsK& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n1 = static_cast<double>(count);
    const double n2 = static_cast<double>(o.count);
    const double n = n1 + n2;
    std::array<double, K> d;
    for (int i = 0; i < K; ++i) d[i] = o.mean[i] - mean[i];
    for (int i = 0; i < K; ++i)
      for (int j = i; j < K; ++j)
        m2[tri(i, j)] += o.m2[tri(i, j)] + d[i] * d[j] * n1 * n2 / n;
    for (int i = 0; i < K; ++i) mean[i] += d[i] * n2 / n;
    count += o.count;
  }

  double covariance(int i, int j) const {
    if (count < 2) return 0.0;
    return (i <= j ? m2[tri(i, j)] : m2[tri(j, i)]) / static_cast<double>(count - 1);
  }
};

// A Monte Carlo point estimate. std_error is the SE of the mean; ratio and
// finite-difference estimators fill it via the delta method.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
};

// R = mean(num)/mean(den) with delta-method standard error from the joint
// covariance of (num, den) over a common ensemble.
inline MCEstimate ratio_estimate(const RunningMomentsK<2>& acc, std::uint64_t seed) {
  if (acc.count < 2) throw std::invalid_argument("ratio_estimate: needs at least 2 samples");
  const double num = acc.mean[0];
  const double den = acc.mean[1];
  if (!(den > 0.0)) throw std::runtime_error("ratio_estimate: nonpositive denominator mean");
  const double r = num / den;
  const double n = static_cast<double>(acc.count);
  const double var = (acc.covariance(0, 0) - 2.0 * r * acc.covariance(0, 1) +
                      r * r * acc.covariance(1, 1)) /
                     (den * den);
  MCEstimate e;
  e.mean = r;
  e.std_error = var > 0.0 ? std::sqrt(var / n) : 0.0;
  e.samples = acc.count;
  e.seed = seed;
  return e;
}

// Effective sample size of an importance-weight stream: (sum w)^2 / sum w^2.
struct WeightDiagnostics {
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  long long count = 0;

  void add(double w) {
    sum_w += w;
    sum_w2 += w * w;
    ++count;
  }
  void merge(const WeightDiagnostics& o) {
    sum_w += o.sum_w;
    sum_w2 += o.sum_w2;
    count += o.count;
  }
  double ess() const { return sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0; }
};

}  // namespace isinglab
