#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/lattice.hpp"

namespace isinglab {

// Full enumeration is capped at this many sites by default (2^24 states).
inline constexpr int kDefaultEnumerationCap = 24;

namespace detail {

// Re-expresses couplings of J as bitmasks over the index space of Lambda_L.
inline std::vector<InteractionMap::Coupling> couplings_on(const InteractionMap& J, int L) {
  const int Lj = J.lattice().half_width;
  std::vector<InteractionMap::Coupling> out;
  out.reserve(J.couplings().size());
  for (const auto& c : J.couplings()) {
    std::uint32_t mask = 0;
    for (int idx = 0; idx < J.lattice().site_count(); ++idx) {
      if (!((c.mask >> idx) & 1u)) continue;
      const int site = idx - Lj;
      if (site < -L || site > L)
        throw std::invalid_argument("interaction subset leaves the requested lattice");
      mask |= 1u << (site + L);
    }
    out.push_back({mask, c.strength});
  }
  return out;
}

inline void check_enumeration_cap(int L, int site_cap) {
  const int n = 2 * L + 1;
  if (site_cap > 31) site_cap = 31;
  if (n > site_cap)
    throw capacity_error("enumeration over " + std::to_string(n) + " sites exceeds cap of " +
                         std::to_string(site_cap));
}

// sigma_A for an enumeration mask (bit set = spin up): parity of down spins
// inside the subset.
inline double subset_sign(std::uint32_t subset, std::uint32_t up_mask) {
  return (std::popcount(subset & ~up_mask) & 1) ? -1.0 : 1.0;
}

}  // namespace detail

inline double energy(const SpinConfiguration& config, const InteractionMap& J) {
  const int Lj = J.lattice().half_width;
  double e = 0.0;
  for (const auto& c : J.couplings()) {
    int p = 1;
    for (int idx = 0; idx < J.lattice().site_count(); ++idx) {
      if (!((c.mask >> idx) & 1u)) continue;
      const int site = idx - Lj;
      if (!config.lattice().contains(site))
        throw std::invalid_argument("energy: interaction subset outside configuration lattice");
      p *= config.spin(site);
    }
    e -= c.strength * static_cast<double>(p);
  }
  return e;
}

struct EnumerationResult {
  double log_partition = 0.0;
  std::vector<double> expectations;  // one per requested subset mask
};

// One pass over all spin configurations of Lambda_L with a running
// log-sum-exp shift; Z and every requested numerator share the shift, which
// keeps large couplings (j_delta grows like -ln(delta)/2) from overflowing.
inline EnumerationResult enumerate_expectations(const InteractionMap& J, int L,
                                                std::span<const std::uint32_t> subsets,
                                                int site_cap = kDefaultEnumerationCap) {
  detail::check_enumeration_cap(L, site_cap);
  const auto couplings = detail::couplings_on(J, L);
  const int n = 2 * L + 1;
  const std::uint64_t total = 1ull << n;

  double shift = -std::numeric_limits<double>::infinity();
  double z = 0.0;
  std::vector<double> nums(subsets.size(), 0.0);

  for (std::uint64_t m = 0; m < total; ++m) {
    const auto mask = static_cast<std::uint32_t>(m);
    double log_w = 0.0;
    for (const auto& c : couplings)
      log_w += c.strength * detail::subset_sign(c.mask, mask);
    if (log_w > shift) {
      const double rescale = std::exp(shift - log_w);
      z *= rescale;
      for (double& v : nums) v *= rescale;
      shift = log_w;
    }
    const double w = std::exp(log_w - shift);
    z += w;
    for (std::size_t k = 0; k < subsets.size(); ++k)
      nums[k] += detail::subset_sign(subsets[k], mask) * w;
  }

  EnumerationResult r;
  r.log_partition = shift + std::log(z);
  r.expectations.resize(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k) r.expectations[k] = nums[k] / z;
  return r;
}

inline double log_partition_exact(const InteractionMap& J, int L,
                                  int site_cap = kDefaultEnumerationCap) {
  return enumerate_expectations(J, L, {}, site_cap).log_partition;
}

inline double partition_exact(const InteractionMap& J, int L,
                              int site_cap = kDefaultEnumerationCap) {
  return std::exp(log_partition_exact(J, L, site_cap));
}

// <sigma_A> by enumeration. A is a set of sites; repeated entries cancel.
inline double expectation_exact(const InteractionMap& J, int L, std::span<const int> A,
                                int site_cap = kDefaultEnumerationCap) {
  const Lattice lat(L);
  const std::uint32_t subset = subset_mask(lat, A);
  return enumerate_expectations(J, L, std::span(&subset, 1), site_cap)
      .expectations[0];
}

inline double expectation_exact(const InteractionMap& J, int L, std::initializer_list<int> A,
                                int site_cap = kDefaultEnumerationCap) {
  return expectation_exact(J, L, std::span<const int>(A.begin(), A.size()), site_cap);
}

// All two-point functions <sigma_i sigma_j> in one enumeration sweep,
// returned as a (2L+1) x (2L+1) row-major matrix (diagonal = 1).
inline std::vector<double> pair_correlations_exact(const InteractionMap& J, int L,
                                                   int site_cap = kDefaultEnumerationCap) {
  const int n = 2 * L + 1;
  std::vector<std::uint32_t> subsets;
  subsets.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) subsets.push_back((1u << a) | (1u << b));
  const auto res = enumerate_expectations(J, L, subsets, site_cap);

  std::vector<double> mat(static_cast<std::size_t>(n) * n, 1.0);
  std::size_t k = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b, ++k) {
      mat[static_cast<std::size_t>(a) * n + b] = res.expectations[k];
      mat[static_cast<std::size_t>(b) * n + a] = res.expectations[k];
    }
  }
  return mat;
}

}  // namespace isinglab
