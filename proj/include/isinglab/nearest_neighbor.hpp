#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "isinglab/lattice.hpp"
#include "isinglab/rng.hpp"

namespace isinglab {

// Closed forms for the nearest-neighbor chain on Lambda_L with coupling j.

inline double nn_log_partition_closed(double j, int L) {
  if (j < 0.0) throw std::invalid_argument("nn_log_partition_closed: j must be >= 0");
  if (L < 0) throw std::invalid_argument("nn_log_partition_closed: L must be >= 0");
  // ln 2 + 2L ln(e^j + e^-j), evaluated as j + log1p(e^{-2j}) to stay finite
  // for the large couplings the scaling limit produces.
  return std::log(2.0) + 2.0 * L * (j + std::log1p(std::exp(-2.0 * j)));
}

inline double nn_partition_closed(double j, int L) {
  return std::exp(nn_log_partition_closed(j, L));
}

// <sigma_{i_1} ... sigma_{i_n}> for the nearest-neighbor chain: zero for odd
// n, else tanh(j) to the power sum_k |i_{2k} - i_{2k-1}| over consecutive
// pairs of the sorted index list. Repeated indices are allowed (they cancel)
// and the value does not depend on L.
inline double nn_correlation_closed(double j, std::span<const int> sorted_sites) {
  if (j < 0.0) throw std::invalid_argument("nn_correlation_closed: j must be >= 0");
  if (!std::is_sorted(sorted_sites.begin(), sorted_sites.end()))
    throw std::invalid_argument("nn_correlation_closed: indices must be sorted");
  if (sorted_sites.size() % 2 != 0) return 0.0;
  long long gap = 0;
  for (std::size_t k = 0; k + 1 < sorted_sites.size(); k += 2)
    gap += static_cast<long long>(sorted_sites[k + 1]) - sorted_sites[k];
  if (gap == 0) return 1.0;
  return std::pow(std::tanh(j), static_cast<double>(gap));
}

inline double nn_correlation_closed(double j, std::initializer_list<int> sorted_sites) {
  return nn_correlation_closed(j, std::span<const int>(sorted_sites.begin(), sorted_sites.size()));
}

// Probability that a bond variable sigma_i' = sigma_i sigma_{i+1} is -1:
// e^{-j} / (e^j + e^{-j}) = 1 / (1 + e^{2j}).
inline double nn_bond_flip_probability(double j) { return 1.0 / (1.0 + std::exp(2.0 * j)); }

// Exact sample of the nearest-neighbor chain via the bond change of
// variables: the boundary spin is a fair sign, bond variables are
// independent, and spins are rebuilt by cumulative products from the right.
inline SpinConfiguration sample_nn_chain(double j, int L, CounterRng& rng) {
  if (j < 0.0) throw std::invalid_argument("sample_nn_chain: j must be >= 0");
  const Lattice lat(L);
  const int n = lat.site_count();
  const double p_flip = nn_bond_flip_probability(j);
  std::vector<int8_t> spins(static_cast<std::size_t>(n));
  int8_t s = static_cast<int8_t>(rng.fair_sign());
  spins[static_cast<std::size_t>(n - 1)] = s;
  for (int k = n - 2; k >= 0; --k) {
    if (rng.bernoulli(p_flip)) s = static_cast<int8_t>(-s);
    spins[static_cast<std::size_t>(k)] = s;
  }
  return SpinConfiguration(lat, std::move(spins));
}

// Same sample as a raw +-1 buffer, for the hot Monte Carlo paths.
inline void sample_nn_spins(double j, int site_count, CounterRng& rng, std::vector<int8_t>& out) {
  const double p_flip = nn_bond_flip_probability(j);
  out.resize(static_cast<std::size_t>(site_count));
  int8_t s = static_cast<int8_t>(rng.fair_sign());
  out[static_cast<std::size_t>(site_count - 1)] = s;
  for (int k = site_count - 2; k >= 0; --k) {
    if (rng.bernoulli(p_flip)) s = static_cast<int8_t>(-s);
    out[static_cast<std::size_t>(k)] = s;
  }
}

}  // namespace isinglab
