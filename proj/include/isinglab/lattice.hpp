#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/rng.hpp"

namespace isinglab {

// Symmetric 1D lattice: the integer sites in [-L, L].
struct Lattice {
  int half_width = 0;

  explicit Lattice(int L) : half_width(L) {
    if (L < 0) throw std::invalid_argument("Lattice: half_width must be >= 0");
  }

  int site_count() const { return 2 * half_width + 1; }
  bool contains(int site) const { return site >= -half_width && site <= half_width; }
  // Array/bit index of a site, 0-based from the left end.
  int index(int site) const { return site + half_width; }
  int site_at(int idx) const { return idx - half_width; }
};

// Spin configuration on a Lattice; entries are exactly +1 or -1.
class SpinConfiguration {
 public:
  SpinConfiguration(Lattice lat, std::vector<int8_t> spins)
      : lattice_(lat), spins_(std::move(spins)) {
    if (spins_.size() != static_cast<std::size_t>(lattice_.site_count()))
      throw std::invalid_argument("SpinConfiguration: spin count != 2L+1");
    for (int8_t s : spins_)
      if (s != 1 && s != -1)
        throw std::invalid_argument("SpinConfiguration: spins must be +1 or -1");
  }

  static SpinConfiguration all_up(Lattice lat) {
    return SpinConfiguration(lat, std::vector<int8_t>(static_cast<std::size_t>(lat.site_count()), 1));
  }

  // Configuration from an enumeration bitmask; bit k set means spin +1 at
  // array index k.
  static SpinConfiguration from_mask(Lattice lat, std::uint32_t mask) {
    std::vector<int8_t> s(static_cast<std::size_t>(lat.site_count()));
    for (int k = 0; k < lat.site_count(); ++k)
      s[static_cast<std::size_t>(k)] = (mask >> k) & 1u ? int8_t{1} : int8_t{-1};
    return SpinConfiguration(lat, std::move(s));
  }

  const Lattice& lattice() const { return lattice_; }
  int spin(int site) const { return spins_[static_cast<std::size_t>(lattice_.index(site))]; }
  const std::vector<int8_t>& spins() const { return spins_; }

  // sigma_A: product over a set of sites; empty set gives 1.
  double product(std::span<const int> sites) const {
    int p = 1;
    for (int s : sites) p *= spin(s);
    return static_cast<double>(p);
  }

 private:
  Lattice lattice_;
  std::vector<int8_t> spins_;
};

// Converts a site list to a subset bitmask over array indices. Repeated
// sites cancel pairwise (sigma_i^2 = 1).
inline std::uint32_t subset_mask(const Lattice& lat, std::span<const int> sites) {
  std::uint32_t mask = 0;
  for (int s : sites) {
    if (!lat.contains(s))
      throw std::invalid_argument("subset: site " + std::to_string(s) + " outside lattice");
    mask ^= (1u << lat.index(s));
  }
  return mask;
}

// Ferromagnetic interaction J: finitely many subsets of the lattice with
// nonnegative strengths. Subsets are stored as bitmasks over array indices.
class InteractionMap {
 public:
  struct Coupling {
    std::uint32_t mask;
    double strength;
  };

  explicit InteractionMap(Lattice lat) : lattice_(lat) {}

  const Lattice& lattice() const { return lattice_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }

  void add(std::span<const int> sites, double strength) {
    if (strength < 0.0)
      throw std::invalid_argument("InteractionMap: negative coupling strength");
    if (strength == 0.0) return;
    const std::uint32_t mask = raw_mask(sites);
    for (auto& c : couplings_) {
      if (c.mask == mask) {
        c.strength += strength;
        return;
      }
    }
    couplings_.push_back({mask, strength});
  }

  void add(std::initializer_list<int> sites, double strength) {
    add(std::span<const int>(sites.begin(), sites.size()), strength);
  }

  double strength_of(std::span<const int> sites) const {
    const std::uint32_t mask = raw_mask(sites);
    for (const auto& c : couplings_)
      if (c.mask == mask) return c.strength;
    return 0.0;
  }

  // The truncated map I_{A}: identical couplings with J(B) set to zero.
  InteractionMap truncated(std::span<const int> subset) const {
    const std::uint32_t mask = raw_mask(subset);
    InteractionMap out(lattice_);
    for (const auto& c : couplings_)
      if (c.mask != mask) out.couplings_.push_back(c);
    return out;
  }

  InteractionMap truncated(std::initializer_list<int> subset) const {
    return truncated(std::span<const int>(subset.begin(), subset.size()));
  }

  // True if no coupling contains the given site.
  bool site_uncoupled(int site) const {
    const std::uint32_t bit = 1u << lattice_.index(site);
    for (const auto& c : couplings_)
      if (c.mask & bit) return false;
    return true;
  }

 private:
  std::uint32_t raw_mask(std::span<const int> sites) const {
    std::uint32_t mask = 0;
    for (int s : sites) {
      if (!lattice_.contains(s))
        throw std::invalid_argument("InteractionMap: site " + std::to_string(s) +
                                    " outside lattice [-" + std::to_string(lattice_.half_width) +
                                    "," + std::to_string(lattice_.half_width) + "]");
      const std::uint32_t bit = 1u << lattice_.index(s);
      if (mask & bit)
        throw std::invalid_argument("InteractionMap: repeated site in subset");
      mask |= bit;
    }
    return mask;
  }

  Lattice lattice_;
  std::vector<Coupling> couplings_;
};

// Distance-indexed pair strengths (w_k)_{k>=1} with finite support. tanh
// values are cached since every bound works with tau_k = tanh(w_k).
class PairCoupling {
 public:
  PairCoupling() = default;

  explicit PairCoupling(std::vector<double> w) : w_(std::move(w)) {
    for (double x : w_)
      if (!(x >= 0.0)) throw std::invalid_argument("PairCoupling: strengths must be >= 0");
    while (!w_.empty() && w_.back() == 0.0) w_.pop_back();
    tau_.resize(w_.size());
    std::transform(w_.begin(), w_.end(), tau_.begin(), [](double x) { return std::tanh(x); });
  }

  static PairCoupling nearest_neighbor(double j) { return PairCoupling(std::vector<double>{j}); }

  // Largest distance with nonzero strength (0 for the empty coupling).
  int range() const { return static_cast<int>(w_.size()); }
  bool empty() const { return w_.empty(); }

  double w(int k) const {
    return (k >= 1 && k <= range()) ? w_[static_cast<std::size_t>(k - 1)] : 0.0;
  }
  double tau(int k) const {
    return (k >= 1 && k <= range()) ? tau_[static_cast<std::size_t>(k - 1)] : 0.0;
  }

  double tail_tau_sum() const {  // sum_{l>=2} tanh(w_l)
    double s = 0.0;
    for (int l = 2; l <= range(); ++l) s += tau(l);
    return s;
  }

  const std::vector<double>& values() const { return w_; }

 private:
  std::vector<double> w_;
  std::vector<double> tau_;
};

// The pair interaction J_w: strength w_{|i-j|} on every unordered pair
// {i, j} of lattice sites, zero on every other subset.
inline InteractionMap pair_interaction(const PairCoupling& w, int L) {
  InteractionMap J{Lattice(L)};
  for (int i = -L; i <= L; ++i) {
    const int kmax = std::min(w.range(), L - i);
    for (int k = 1; k <= kmax; ++k) {
      if (w.w(k) > 0.0) J.add({i, i + k}, w.w(k));
    }
  }
  return J;
}

}  // namespace isinglab
