#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "isinglab/errors.hpp"
#include "isinglab/quadrature.hpp"

namespace isinglab {

// Interaction kernels: even, continuous, nonnegative, integrable W. Each
// family is a small value type; the exponential families additionally carry
// a closed-form second antiderivative, which makes rectangle integrals of
// W(t - s) exact.

struct ZeroKernel {};

struct ExponentialKernel {  // a e^{-b|t|}
  double a = 1.0;
  double b = 1.0;
};

struct PowerLawKernel {  // c (1+|t|)^{-alpha}, optionally truncated at |t| > cutoff
  double c = 1.0;
  double alpha = 3.0;
  double cutoff = std::numeric_limits<double>::infinity();
};

struct BumpKernel {  // h cos^2(pi t / (2 s)) on |t| < s, zero outside
  double height = 1.0;
  double half_width = 1.0;
};

struct SpinBosonMode {
  double weight = 1.0;  // spectral mass |v|^2 at this rate
  double rate = 1.0;    // boson frequency
};

struct SpinBosonKernel {  // (lambda^2 / 8) sum_m weight_m e^{-rate_m |t|}
  double lambda = 1.0;
  std::vector<SpinBosonMode> modes;
};

class Kernel {
 public:
  using Variant = std::variant<ZeroKernel, ExponentialKernel, PowerLawKernel, BumpKernel,
                               SpinBosonKernel>;

  Kernel() : v_(ZeroKernel{}) {}

  static Kernel zero() { return Kernel(ZeroKernel{}); }

  static Kernel exponential(double a, double b) {
    if (!(a > 0.0)) throw std::invalid_argument("exponential kernel: a must be > 0");
    if (!(b > 0.0)) throw std::invalid_argument("exponential kernel: b must be > 0");
    return Kernel(ExponentialKernel{a, b});
  }

  static Kernel power_law(double c, double alpha,
                          double cutoff = std::numeric_limits<double>::infinity()) {
    if (!(c > 0.0)) throw std::invalid_argument("power-law kernel: c must be > 0");
    if (!(alpha > 2.0)) throw std::invalid_argument("power-law kernel: alpha must be > 2");
    if (!(cutoff > 0.0)) throw std::invalid_argument("power-law kernel: cutoff must be > 0");
    return Kernel(PowerLawKernel{c, alpha, cutoff});
  }

  static Kernel bump(double height, double half_width) {
    if (!(height >= 0.0)) throw std::invalid_argument("bump kernel: height must be >= 0");
    if (!(half_width > 0.0)) throw std::invalid_argument("bump kernel: half_width must be > 0");
    return Kernel(BumpKernel{height, half_width});
  }

  static Kernel spin_boson(double lambda, std::vector<SpinBosonMode> modes) {
    for (const auto& m : modes) {
      if (!(m.weight >= 0.0)) throw std::invalid_argument("spin-boson kernel: weight must be >= 0");
      if (!(m.rate > 0.0)) throw std::invalid_argument("spin-boson kernel: rate must be > 0");
    }
    return Kernel(SpinBosonKernel{lambda, std::move(modes)});
  }

  bool is_zero() const { return std::holds_alternative<ZeroKernel>(v_); }
  const Variant& variant() const { return v_; }

  double operator()(double t) const {
    const double x = std::abs(t);
    return std::visit(
        [x](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroKernel>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
            return k.a * std::exp(-k.b * x);
          } else if constexpr (std::is_same_v<T, PowerLawKernel>) {
            return x > k.cutoff ? 0.0 : k.c * std::pow(1.0 + x, -k.alpha);
          } else if constexpr (std::is_same_v<T, BumpKernel>) {
            if (x >= k.half_width) return 0.0;
            const double c = std::cos(0.5 * M_PI * x / k.half_width);
            return k.height * c * c;
          } else {
            double s = 0.0;
            for (const auto& m : k.modes) s += m.weight * std::exp(-m.rate * x);
            return k.lambda * k.lambda / 8.0 * s;
          }
        },
        v_);
  }

  // ||W||_1 over the whole line; closed form for every family.
  double l1_norm() const {
    return std::visit(
        [](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroKernel>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
            return 2.0 * k.a / k.b;
          } else if constexpr (std::is_same_v<T, PowerLawKernel>) {
            const double full = 2.0 * k.c / (k.alpha - 1.0);
            if (std::isinf(k.cutoff)) return full;
            return full * (1.0 - std::pow(1.0 + k.cutoff, 1.0 - k.alpha));
          } else if constexpr (std::is_same_v<T, BumpKernel>) {
            return k.height * k.half_width;
          } else {
            double s = 0.0;
            for (const auto& m : k.modes) s += m.weight / m.rate;
            return k.lambda * k.lambda / 4.0 * s;
          }
        },
        v_);
  }

  bool has_closed_second_antiderivative() const {
    return std::holds_alternative<ZeroKernel>(v_) ||
           std::holds_alternative<ExponentialKernel>(v_) ||
           std::holds_alternative<SpinBosonKernel>(v_);
  }

  // Even second antiderivative Phi with Phi(0) = 0 and Phi'' = W; only for
  // the exponential families.
  double second_antiderivative(double x) const {
    const double y = std::abs(x);
    return std::visit(
        [y](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ZeroKernel>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
            return phi_exp(k.a, k.b, y);
          } else if constexpr (std::is_same_v<T, SpinBosonKernel>) {
            double s = 0.0;
            for (const auto& m : k.modes)
              s += phi_exp(k.lambda * k.lambda / 8.0 * m.weight, m.rate, y);
            return s;
          } else {
            throw std::logic_error("second_antiderivative: no closed form for this family");
          }
        },
        v_);
  }

  // Integral of W(t - s) over [u1,u2] x [v1,v2]. Exact for the exponential
  // families; adaptive quadrature (absolute tolerance) otherwise.
  double segment_double_integral(double u1, double u2, double v1, double v2,
                                 double tol = 1e-10) const {
    if (u1 > u2 || v1 > v2)
      throw std::invalid_argument("segment_double_integral: intervals must be ordered");
    if (u1 == u2 || v1 == v2 || is_zero()) return 0.0;
    if (has_closed_second_antiderivative()) {
      return second_antiderivative(u2 - v1) + second_antiderivative(u1 - v2) -
             second_antiderivative(u1 - v1) - second_antiderivative(u2 - v2);
    }
    // Reduce to 1D: integral of W(x) * overlap(x), where overlap is the
    // cross-correlation of the two interval indicators (a trapezoid in x).
    const auto& self = *this;
    auto integrand = [&self, u1, u2, v1, v2](double x) {
      const double lo = std::max(u1, v1 + x);
      const double hi = std::min(u2, v2 + x);
      return hi > lo ? self(x) * (hi - lo) : 0.0;
    };
    std::vector<double> knots = {u1 - v1, u2 - v2, 0.0};
    if (const auto* p = std::get_if<PowerLawKernel>(&v_)) {
      knots.push_back(p->cutoff);
      knots.push_back(-p->cutoff);
    } else if (const auto* bk = std::get_if<BumpKernel>(&v_)) {
      knots.push_back(bk->half_width);
      knots.push_back(-bk->half_width);
    }
    return adaptive_simpson_with_knots(integrand, u1 - v2, u2 - v1, std::move(knots), tol);
  }

 private:
  explicit Kernel(Variant v) : v_(std::move(v)) {}

  static double phi_exp(double a, double b, double y) {
    // (a/b) * (y - (1 - e^{-b y})/b), written with expm1 to keep precision
    // near y = 0.
    return a / b * (y + std::expm1(-b * y) / b);
  }

  Variant v_;
};

// ---------------------------------------------------------------------------
// Kernel spec serialization: {"family": ..., parameters...}. Round-trips
// losslessly through nlohmann's shortest-round-trip double formatting.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Kernel& kernel) {
  using nlohmann::json;
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ZeroKernel>) {
          return json{{"family", "zero"}};
        } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
          return json{{"family", "exponential"}, {"a", k.a}, {"b", k.b}};
        } else if constexpr (std::is_same_v<T, PowerLawKernel>) {
          json j{{"family", "power_law"}, {"c", k.c}, {"alpha", k.alpha}};
          if (!std::isinf(k.cutoff)) j["cutoff"] = k.cutoff;
          return j;
        } else if constexpr (std::is_same_v<T, BumpKernel>) {
          return json{{"family", "bump"}, {"height", k.height}, {"half_width", k.half_width}};
        } else {
          json modes = json::array();
          for (const auto& m : k.modes)
            modes.push_back(json{{"weight", m.weight}, {"rate", m.rate}});
          return json{{"family", "spin_boson"}, {"lambda", k.lambda}, {"modes", modes}};
        }
      },
      kernel.variant());
}

inline Kernel kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw std::invalid_argument("kernel spec: expected an object with a \"family\" key");
  const std::string family = j.at("family").get<std::string>();
  if (family == "zero") return Kernel::zero();
  if (family == "exponential")
    return Kernel::exponential(j.at("a").get<double>(), j.at("b").get<double>());
  if (family == "power_law") {
    double cutoff = std::numeric_limits<double>::infinity();
    if (j.contains("cutoff") && !j.at("cutoff").is_null()) cutoff = j.at("cutoff").get<double>();
    return Kernel::power_law(j.at("c").get<double>(), j.at("alpha").get<double>(), cutoff);
  }
  if (family == "bump")
    return Kernel::bump(j.at("height").get<double>(), j.at("half_width").get<double>());
  if (family == "spin_boson") {
    std::vector<SpinBosonMode> modes;
    for (const auto& m : j.at("modes"))
      modes.push_back({m.at("weight").get<double>(), m.at("rate").get<double>()});
    return Kernel::spin_boson(j.at("lambda").get<double>(), std::move(modes));
  }
  throw std::invalid_argument("kernel spec: unknown family \"" + family + "\"");
}

}  // namespace isinglab
