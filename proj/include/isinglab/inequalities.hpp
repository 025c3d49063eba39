#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isinglab/exact.hpp"
#include "isinglab/lattice.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/transfer_matrix.hpp"

namespace isinglab {

// Outcome of a single inequality evaluation: lhs <= rhs is asserted, slack
// is rhs - lhs, and passed means slack >= -tolerance. status records the
// hypothesis-violated case of the susceptibility-sum bound, which is a
// non-result rather than a failure.
struct InequalityReport {
  std::string name;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string status = "ok";  // "ok" | "hypothesis_violated"
  std::string note;
};

namespace detail {

inline InequalityReport make_report(std::string name, std::string instance, double lhs, double rhs,
                                    double tol) {
  InequalityReport r;
  r.name = std::move(name);
  r.instance = std::move(instance);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = tol;
  r.passed = r.slack >= -tol;
  return r;
}

inline std::string sites_str(std::span<const int> s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
  os << '}';
  return os.str();
}

}  // namespace detail

enum class GksVariant {
  Griffiths1,   // 0 <= <sigma_A>
  Griffiths2,   // <sigma_A><sigma_B> <= <sigma_AB>
  Griffiths3,   // <sigma_A> <= <sigma_A>_{J;{B}} + tanh(J(B)) <sigma_AB>_{J;{B}}
  CutMonotone,  // <sigma_A>_{J;{B}} <= <sigma_A>
  Thompson,     // <sigma_A> <= tanh(J(B)) <sigma_AB> + (1 - tanh^2 J(B)) <sigma_A>_{J;{B}}
};

inline const char* gks_variant_name(GksVariant v) {
  switch (v) {
    case GksVariant::Griffiths1: return "griffiths1";
    case GksVariant::Griffiths2: return "griffiths2";
    case GksVariant::Griffiths3: return "griffiths3";
    case GksVariant::CutMonotone: return "cut_monotone";
    case GksVariant::Thompson: return "thompson";
  }
  return "?";
}

// Evaluates one GKS/Thompson inequality by enumeration. A and B are site
// lists; sigma_AB uses the symmetric set difference.
inline InequalityReport check_gks(const InteractionMap& J, int L, std::span<const int> A,
                                  std::span<const int> B, GksVariant variant,
                                  double tolerance = 1e-12,
                                  int site_cap = kDefaultEnumerationCap) {
  const Lattice lat(L);
  const std::uint32_t mask_a = subset_mask(lat, A);
  const std::uint32_t mask_b = subset_mask(lat, B);
  const std::uint32_t mask_ab = mask_a ^ mask_b;
  const double tanh_jb = std::tanh(J.strength_of(B));

  const std::uint32_t subsets[3] = {mask_a, mask_b, mask_ab};
  const auto full = enumerate_expectations(J, L, subsets, site_cap);

  double lhs = 0.0, rhs = 0.0;
  if (variant == GksVariant::Griffiths1) {
    lhs = 0.0;
    rhs = full.expectations[0];
  } else if (variant == GksVariant::Griffiths2) {
    lhs = full.expectations[0] * full.expectations[1];
    rhs = full.expectations[2];
  } else {
    const auto cut = enumerate_expectations(J.truncated(B), L, subsets, site_cap);
    if (variant == GksVariant::Griffiths3) {
      lhs = full.expectations[0];
      rhs = cut.expectations[0] + tanh_jb * cut.expectations[2];
    } else if (variant == GksVariant::CutMonotone) {
      lhs = cut.expectations[0];
      rhs = full.expectations[0];
    } else {  // Thompson
      lhs = full.expectations[0];
      rhs = tanh_jb * full.expectations[2] + (1.0 - tanh_jb * tanh_jb) * cut.expectations[0];
    }
  }

  std::ostringstream inst;
  inst << "L=" << L << " A=" << detail::sites_str(A) << " B=" << detail::sites_str(B)
       << " J(B)=" << J.strength_of(B);
  return detail::make_report(gks_variant_name(variant), inst.str(), lhs, rhs, tolerance);
}

// Uncoupled Ising spins always vanish: <sigma_B> = 0 whenever some site of
// B appears in no coupling.
inline InequalityReport check_uncoupled_zero(const InteractionMap& J, int L, int site,
                                             std::span<const int> B, double tolerance = 1e-12,
                                             int site_cap = kDefaultEnumerationCap) {
  if (!J.site_uncoupled(site))
    throw std::invalid_argument("check_uncoupled_zero: site appears in a coupling");
  bool in_b = false;
  for (int s : B) in_b |= (s == site);
  if (!in_b) throw std::invalid_argument("check_uncoupled_zero: site must belong to B");

  const double v = expectation_exact(J, L, B, site_cap);
  std::ostringstream inst;
  inst << "L=" << L << " i=" << site << " B=" << detail::sites_str(B);
  auto r = detail::make_report("uncoupled_zero", inst.str(), std::abs(v), 0.0, tolerance);
  return r;
}

namespace detail {

// Lazy <sigma_i sigma_k> provider over one lattice: full enumeration matrix
// for small chains, cached transfer-matrix queries otherwise. Out-of-lattice
// indices evaluate to zero.
class PairCorrelationLookup {
 public:
  PairCorrelationLookup(const PairCoupling& w, int L, int site_cap = 16)
      : L_(L), n_(2 * L + 1) {
    if (n_ <= site_cap) {
      matrix_ = pair_correlations_exact(pair_interaction(w, L), L);
    } else {
      chain_.emplace(w, L);
      cache_.assign(static_cast<std::size_t>(n_) * n_,
                    std::numeric_limits<double>::quiet_NaN());
    }
  }

  double operator()(int i, int k) const {
    if (i < -L_ || i > L_ || k < -L_ || k > L_) return 0.0;
    const std::size_t at = static_cast<std::size_t>(i + L_) * n_ + (k + L_);
    if (!matrix_.empty()) return matrix_[at];
    if (std::isnan(cache_[at])) {
      const double v = chain_->correlation(i, k);
      cache_[at] = v;
      cache_[static_cast<std::size_t>(k + L_) * n_ + (i + L_)] = v;
    }
    return cache_[at];
  }

 private:
  int L_;
  int n_;
  std::vector<double> matrix_;
  mutable std::optional<TransferChain> chain_;
  mutable std::vector<double> cache_;
};

}  // namespace detail

// The recursive two-point bound: for i != j,
//   <sigma_i sigma_j> <= tau_1 <sigma_i sigma_{j -+ 1}>
//                      + sum_{l>=2} sum_{s=+-1} tau_l <sigma_i sigma_{j+sl}>
//                      + (1 - tau_1^2) sum_{b>=1} tau_1^b sum_{l>=2} sum_{s=+-1}
//                            tau_l <sigma_i sigma_{j +- b + sl}>
// with the upper signs for i < j and out-of-lattice terms equal to zero.
// The b-sum is cut once its remaining geometric tail (all terms nonnegative)
// drops below 1e-14; dropping rhs terms only makes the check stricter.
inline InequalityReport lemma36_check(const PairCoupling& w, int L, int i, int j,
                                      double tolerance = 1e-10) {
  if (i == j) throw std::invalid_argument("lemma36_check: needs i != j");
  const Lattice lat(L);
  if (!lat.contains(i) || !lat.contains(j))
    throw std::invalid_argument("lemma36_check: sites outside lattice");

  const detail::PairCorrelationLookup corr(w, L);
  const int dir = i < j ? 1 : -1;  // direction from j away from i
  const double tau1 = w.tau(1);
  const int R = w.range();

  const double lhs = corr(i, j);

  double rhs = tau1 * corr(i, j - dir);
  double inner_mass = 0.0;  // bound on each inner l-sum, correlations <= 1
  for (int l = 2; l <= R; ++l) {
    rhs += w.tau(l) * (corr(i, j + l) + corr(i, j - l));
    inner_mass += 2.0 * w.tau(l);
  }

  int b_used = 0;
  double tail_bound = 0.0;
  if (tau1 > 0.0 && inner_mass > 0.0) {
    double tau1_pow = 1.0;
    for (int b = 1;; ++b) {
      tau1_pow *= tau1;
      // every remaining summand vanishes once the index closest to the
      // lattice, j + dir*b -+ R, has left it
      const bool exhausted = dir > 0 ? (j + b - R > L) : (j - b + R < -L);
      const double remaining = tau1_pow / (1.0 - tau1) * (1.0 - tau1 * tau1) * inner_mass;
      if (exhausted || remaining < 1e-14) {
        b_used = b - 1;
        tail_bound = exhausted ? 0.0 : remaining;
        break;
      }
      double inner = 0.0;
      for (int l = 2; l <= R; ++l)
        inner += w.tau(l) * (corr(i, j + dir * b + l) + corr(i, j + dir * b - l));
      rhs += (1.0 - tau1 * tau1) * tau1_pow * inner;
      b_used = b;
    }
  }

  std::ostringstream inst;
  inst << "L=" << L << " i=" << i << " j=" << j << " w=[";
  for (int k = 1; k <= R; ++k) inst << (k > 1 ? "," : "") << w.w(k);
  inst << "]";
  auto r = detail::make_report("lemma36", inst.str(), lhs, rhs, tolerance);
  std::ostringstream note;
  note << "b_terms=" << b_used << " dropped_tail<=" << tail_bound;
  r.note = note.str();
  return r;
}

// Configuration of the susceptibility-sum bound check.
struct CorBoundConfig {
  PairCoupling w;
  double epsilon = 0.05;  // must lie in (0, 1/10)
  double D = 1.01;        // the proof's free constant, any D > 1
  int N = 100;            // truncation of the correlation sum, N <= L
  int L = 200;
};

// Checks sum_{i=-N}^{N} <sigma_i sigma_0> <= 2 / ((1 - 10 D eps)(1 - tanh w_1))
// under the hypothesis sum_{l>=2} tanh(w_l) <= eps (1 - tanh w_1). Both
// truncations (finite N, finite L) only lower the lhs: terms are nonnegative
// and increase with L, so a pass is implied by the full bound.
inline InequalityReport corbound_check(const CorBoundConfig& cfg, double tolerance = 1e-12) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.1))
    throw std::invalid_argument("corbound_check: epsilon must lie in (0, 1/10)");
  if (!(cfg.D > 1.0)) throw std::invalid_argument("corbound_check: D must be > 1");
  if (!(10.0 * cfg.D * cfg.epsilon < 1.0))
    throw std::invalid_argument("corbound_check: need 10*D*epsilon < 1");
  if (cfg.N > cfg.L) throw std::invalid_argument("corbound_check: N must be <= L");

  const double tau1 = cfg.w.tau(1);
  const double tail = cfg.w.tail_tau_sum();

  std::ostringstream inst;
  inst << "w=[";
  for (int k = 1; k <= cfg.w.range(); ++k) inst << (k > 1 ? "," : "") << cfg.w.w(k);
  inst << "] eps=" << cfg.epsilon << " D=" << cfg.D << " L=" << cfg.L << " N=" << cfg.N;

  if (!(tail <= cfg.epsilon * (1.0 - tau1))) {
    InequalityReport r;
    r.name = "corbound";
    r.instance = inst.str();
    r.status = "hypothesis_violated";
    r.passed = true;  // a non-instance, not a failure
    r.tolerance = tolerance;
    std::ostringstream note;
    note << "sum_{l>=2} tanh w_l = " << tail << " > eps(1-tanh w_1) = "
         << cfg.epsilon * (1.0 - tau1);
    r.note = note.str();
    return r;
  }

  const TransferChain chain(cfg.w, cfg.L);
  const double lhs = chain.centered_correlation_sum(cfg.N);
  const double rhs = 2.0 / ((1.0 - 10.0 * cfg.D * cfg.epsilon) * (1.0 - tau1));
  auto r = detail::make_report("corbound", inst.str(), lhs, rhs, tolerance);
  return r;
}

// ---------------------------------------------------------------------------
// Randomized suites. Couplings are drawn log-uniform in [1e-3, 2] with range
// uniform in {1,2,3}; the master seed is recorded in every report.
// ---------------------------------------------------------------------------

namespace detail {

inline PairCoupling random_pair_coupling(CounterRng& rng, int max_range = 3) {
  const int range = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_range));
  std::vector<double> w(static_cast<std::size_t>(range));
  for (auto& x : w) x = std::exp(rng.uniform(std::log(1e-3), std::log(2.0)));
  return PairCoupling(std::move(w));
}

inline std::vector<int> random_subset(CounterRng& rng, int L, int max_size = 4) {
  const int n = 2 * L + 1;
  const int size = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(
                                        std::min(max_size, n) + 1));
  std::vector<int> sites;
  while (static_cast<int>(sites.size()) < size) {
    const int s = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    bool dup = false;
    for (int t : sites) dup |= (t == s);
    if (!dup) sites.push_back(s);
  }
  std::sort(sites.begin(), sites.end());
  return sites;
}

inline void tag_seed(InequalityReport& r, std::uint64_t seed, long long instance_idx) {
  std::ostringstream os;
  os << r.instance << " seed=" << seed << " k=" << instance_idx;
  r.instance = os.str();
}

}  // namespace detail

// All five correlation inequalities plus the uncoupled-spin identity on
// randomized ferromagnetic pair interactions.
inline std::vector<InequalityReport> run_gks_suite(long long instances, int L_max,
                                                   std::uint64_t seed, double tolerance = 1e-12) {
  std::vector<InequalityReport> out;
  out.reserve(static_cast<std::size_t>(instances) * 6);
  auto rng = CounterRng::stream(seed, 0);
  for (long long k = 0; k < instances; ++k) {
    const int L = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(L_max));
    const auto w = detail::random_pair_coupling(rng);
    const auto J = pair_interaction(w, L);
    const auto A = detail::random_subset(rng, L);
    // B is an existing bond so that tanh(J(B)) is informative.
    const int b0 = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(2 * L));
    const int gap = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(
                                             std::min(w.range(), L - b0)));
    const std::vector<int> B = {b0, b0 + gap};

    for (GksVariant v : {GksVariant::Griffiths1, GksVariant::Griffiths2, GksVariant::Griffiths3,
                         GksVariant::CutMonotone, GksVariant::Thompson}) {
      auto r = check_gks(J, L, A, B, v, tolerance);
      detail::tag_seed(r, seed, k);
      out.push_back(std::move(r));
    }

    // Lemma 3.4 instance: strip every coupling touching a chosen site.
    const int free_site = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(2 * L + 1));
    InteractionMap J_free{Lattice(L)};
    for (const auto& c : J.couplings()) {
      if (c.mask & (1u << (free_site + L))) continue;
      std::vector<int> sites;
      for (int idx = 0; idx < 2 * L + 1; ++idx)
        if ((c.mask >> idx) & 1u) sites.push_back(idx - L);
      J_free.add(sites, c.strength);
    }
    auto Bz = detail::random_subset(rng, L, 3);
    if (std::find(Bz.begin(), Bz.end(), free_site) == Bz.end()) Bz.push_back(free_site);
    std::sort(Bz.begin(), Bz.end());
    auto rz = check_uncoupled_zero(J_free, L, free_site, Bz, tolerance);
    detail::tag_seed(rz, seed, k);
    out.push_back(std::move(rz));
  }
  return out;
}

inline std::vector<InequalityReport> run_lemma36_suite(long long instances, int L_max,
                                                       std::uint64_t seed,
                                                       double tolerance = 1e-10) {
  std::vector<InequalityReport> out;
  out.reserve(static_cast<std::size_t>(instances));
  auto rng = CounterRng::stream(seed, 1);
  for (long long k = 0; k < instances; ++k) {
    const int L = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(L_max));
    const auto w = detail::random_pair_coupling(rng);
    const int n = 2 * L + 1;
    int i = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    int j = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    if (i == j) j = (j < L) ? j + 1 : j - 1;
    auto r = lemma36_check(w, L, i, j, tolerance);
    detail::tag_seed(r, seed, k);
    out.push_back(std::move(r));
  }
  return out;
}

// The thermodynamic-limit mechanism: two-point functions increase with L.
inline std::vector<InequalityReport> run_monotonicity_suite(long long instances, int L_max,
                                                            std::uint64_t seed,
                                                            double tolerance = 1e-12) {
  std::vector<InequalityReport> out;
  out.reserve(static_cast<std::size_t>(instances));
  auto rng = CounterRng::stream(seed, 2);
  for (long long k = 0; k < instances; ++k) {
    const int L = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(L_max));
    const auto w = detail::random_pair_coupling(rng);
    const int n = 2 * L + 1;
    const int i = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    int j = -L + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    if (i == j) j = (j < L) ? j + 1 : j - 1;
    const double small = expectation_exact(pair_interaction(w, L), L, {i, j});
    const double big = expectation_exact(pair_interaction(w, L + 1), L + 1, {i, j});
    std::ostringstream inst;
    inst << "L=" << L << " i=" << i << " j=" << j;
    auto r = detail::make_report("monotone_in_L", inst.str(), small, big, tolerance);
    detail::tag_seed(r, seed, k);
    out.push_back(std::move(r));
  }
  return out;
}

// The documented grid of hypothesis-satisfying couplings for the
// susceptibility-sum bound, including the large nearest-neighbor point
// tanh(2) ~ 0.964 that the bound is designed to accommodate.
inline std::vector<CorBoundConfig> default_corbound_grid() {
  std::vector<CorBoundConfig> grid;
  grid.push_back({PairCoupling{}, 0.05, 1.01, 8, 8});
  grid.push_back({PairCoupling({0.0, 0.05}), 0.06, 1.01, 8, 8});
  grid.push_back({PairCoupling({0.5, 0.001, 0.001}), 0.05, 1.01, 300, 400});
  grid.push_back({PairCoupling({1.0, 0.002}), 0.08, 1.01, 600, 800});
  grid.push_back({PairCoupling({2.0, 0.001, 0.001}), 0.09, 1.01, 1500, 2000});
  return grid;
}

}  // namespace isinglab
