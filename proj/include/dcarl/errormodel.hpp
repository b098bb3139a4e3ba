#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/latent.hpp"
#include "dcarl/params.hpp"
#include "dcarl/random.hpp"

namespace dcarl::errormodel {

inline constexpr double kDampingFactor = -0.5;
// sqrt(3)/9: peak of the leakage spline per unit T and unit incoming velocity.
inline const double kLeakagePeakCoefficient = std::sqrt(3.0) / 9.0;
inline constexpr double kDefaultDivergenceCap = 1e300;

// ---------------------------------------------------------------------------
// Pure autoregressive rollout

struct ArBound {
  double value = 0.0;
  bool diverged = false;
  std::optional<std::size_t> diverged_at;  // 1-based step where the cap was crossed
};

// sum_j L^(N-j) |eta_j| by Horner's rule. Saturates at `cap`.
inline ArBound ar_error_upper_bound(double lipschitz, std::span<const double> step_errors,
                                    double cap = kDefaultDivergenceCap) {
  require(lipschitz >= 0.0, "lipschitz must be >= 0");
  require(!step_errors.empty(), "need at least one step");
  ArBound out;
  double e = 0.0;
  for (std::size_t j = 0; j < step_errors.size(); ++j) {
    e = lipschitz * e + std::abs(step_errors[j]);
    if (!(e <= cap)) {
      out.value = cap;
      out.diverged = true;
      out.diverged_at = j + 1;
      return out;
    }
  }
  out.value = e;
  return out;
}

// Constant per-step error: N*eta for L = 1, eta*(L^N - 1)/(L - 1) otherwise.
inline ArBound ar_error_upper_bound(double lipschitz, double eta, std::size_t steps,
                                    double cap = kDefaultDivergenceCap) {
  require(lipschitz >= 0.0, "lipschitz must be >= 0");
  require(steps >= 1, "need at least one step");
  eta = std::abs(eta);
  ArBound out;
  const double n = static_cast<double>(steps);
  out.value = lipschitz == 1.0 ? n * eta
                               : eta * (std::pow(lipschitz, n) - 1.0) / (lipschitz - 1.0);
  if (!(out.value <= cap)) {
    out.value = cap;
    out.diverged = true;
    double e = 0.0;
    for (std::size_t j = 1; j <= steps; ++j) {
      e = lipschitz * e + eta;
      if (!(e <= cap)) {
        out.diverged_at = j;
        break;
      }
    }
    if (!out.diverged_at) out.diverged_at = steps;
  }
  return out;
}

// |E[e_N]| >= N*mu under non-contractive Jacobians.
inline double ar_bias_lower_bound(double mu, std::size_t steps) {
  require(mu >= 0.0, "mu must be >= 0");
  return static_cast<double>(steps) * mu;
}

// Per-dimension variance of the accumulated error; multiply by d for the trace.
inline double ar_variance(double step_variance, std::size_t steps) {
  require(step_variance >= 0.0, "variance must be >= 0");
  return static_cast<double>(steps) * step_variance;
}

// ---------------------------------------------------------------------------
// Momentum leakage

// Cubic d(t) = a t^3 + b t^2 + c t + d minimising the integral of d''^2 on
// [0, T] subject to d(0) = d(T) = 0, d'(0) = v_in, d''(T) = 0.
struct SplineSolution {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double interval = 1.0;
  double input_velocity = 0.0;

  double value(double t) const { return ((a * t + b) * t + c) * t + d; }
  double slope(double t) const { return (3.0 * a * t + 2.0 * b) * t + c; }
  double curvature(double t) const { return 6.0 * a * t + 2.0 * b; }
  // Closed-form integral of curvature^2 over [0, T].
  double energy() const {
    const double T = interval;
    return 12.0 * a * a * T * T * T + 12.0 * a * b * T * T + 4.0 * b * b * T;
  }
};

inline SplineSolution solve_damping_spline(double interval, double input_velocity) {
  require(interval > 0.0 && std::isfinite(interval), "interval T must be > 0");
  SplineSolution s;
  s.interval = interval;
  s.input_velocity = input_velocity;
  s.d = 0.0;
  s.c = input_velocity;
  s.a = input_velocity / (2.0 * interval * interval);
  s.b = -3.0 * s.a * interval;
  return s;
}

// Velocity error handed to the next segment.
inline double damping_step(double input_velocity) { return kDampingFactor * input_velocity; }

struct LeakagePeak {
  double tau_star = 0.0;
  double peak = 0.0;
};

inline LeakagePeak leakage_peak(double interval, double input_velocity) {
  require(interval > 0.0, "interval T must be > 0");
  return {interval * (1.0 - std::sqrt(3.0) / 3.0),
          kLeakagePeakCoefficient * interval * std::abs(input_velocity)};
}

// sup over segments and offsets of |d_i(t)|: twice the first-segment peak,
// since sum |gamma|^k <= 2.
inline double cumulative_leakage_bound(double interval, double initial_velocity) {
  require(interval > 0.0, "interval T must be > 0");
  return 2.0 * kLeakagePeakCoefficient * interval * std::abs(initial_velocity);
}

// ---------------------------------------------------------------------------
// Brownian bridge between keyframes

inline double bridge_variance(double tau, double interval, double sigma_int) {
  require(interval > 0.0, "interval T must be > 0");
  require(tau >= 0.0 && tau <= interval, "tau must lie in [0, T]");
  return tau * (interval - tau) / interval * sigma_int * sigma_int;
}

inline Latent bridge_mean(double tau, double interval, const Latent& k_from, const Latent& k_to) {
  require(interval > 0.0, "interval T must be > 0");
  require(tau >= 0.0 && tau <= interval, "tau must lie in [0, T]");
  require(k_from.size() == k_to.size(), "anchor dimension mismatch");
  const double w = tau / interval;
  return (1.0 - w) * k_from + w * k_to;
}

// Pinned Gaussian walk on [0, T] with `steps` equal steps: W is a random walk
// with increment variance sigma^2 * dt, and B_k = W_k - (k/steps) W_steps.
// Returns steps + 1 samples with B_0 = B_steps = 0.
inline std::vector<double> simulate_bridge(double interval, std::size_t steps, double sigma,
                                           Rng& rng) {
  require(interval > 0.0 && steps >= 1, "bridge needs T > 0 and steps >= 1");
  const double sd = sigma * std::sqrt(interval / static_cast<double>(steps));
  std::vector<double> w(steps + 1, 0.0);
  for (std::size_t k = 1; k <= steps; ++k) w[k] = w[k - 1] + sd * standard_normal(rng);
  const double end = w[steps];
  for (std::size_t k = 0; k <= steps; ++k)
    w[k] -= static_cast<double>(k) / static_cast<double>(steps) * end;
  return w;
}

// ---------------------------------------------------------------------------
// Unified bound

struct BoundBreakdown {
  double anchor = 0.0;
  double leakage = 0.0;
  double noise = 0.0;
  double total = 0.0;
};

// Keyframe drift scenarios for the anchor term.
struct ExplicitKeyframeErrors {
  std::vector<double> errors;
};
struct GlobalKeyframes {
  double cap = 0.0;  // C_kf
};
struct DownsampledArKeyframes {
  std::size_t steps = 0;  // N
  double step_error = 0.0;  // eta per keyframe step
};
using KeyframeDrift = std::variant<ExplicitKeyframeErrors, GlobalKeyframes, DownsampledArKeyframes>;

inline double anchor_term(const KeyframeDrift& drift, double interval) {
  struct Visitor {
    double interval;
    double operator()(const ExplicitKeyframeErrors& e) const {
      double m = 0.0;
      for (double v : e.errors) m = std::max(m, std::abs(v));
      return m;
    }
    double operator()(const GlobalKeyframes& g) const { return g.cap; }
    double operator()(const DownsampledArKeyframes& d) const {
      // N/T keyframe steps, each injecting eta.
      return std::ceil(static_cast<double>(d.steps) / interval) * d.step_error;
    }
  };
  return std::visit(Visitor{interval}, drift);
}

inline BoundBreakdown unified_bound(double interval, double initial_velocity, double sigma_int,
                                    double anchor) {
  require(interval >= 1.0, "keyframe interval T must be >= 1");
  BoundBreakdown b;
  b.anchor = anchor;
  b.leakage = cumulative_leakage_bound(interval, initial_velocity);
  b.noise = std::sqrt(interval) / 2.0 * sigma_int;
  b.total = b.anchor + b.leakage + b.noise;
  return b;
}

inline BoundBreakdown unified_bound(const ErrorModelParams& p, const KeyframeDrift& drift) {
  p.validate();
  return unified_bound(p.keyframe_interval, p.initial_velocity_error, p.interp_noise,
                       anchor_term(drift, p.keyframe_interval));
}

// Global-generation scenario read straight from the parameters (anchor = C_kf).
inline BoundBreakdown unified_bound(const ErrorModelParams& p) {
  return unified_bound(p, GlobalKeyframes{p.keyframe_error_cap});
}

// e = (1 - t/T) e(K_i) + (t/T) e(K_i+1) + d(t) + w(t)
inline Latent anchored_error_decomposition(const Latent& e_from, const Latent& e_to, double tau,
                                           double interval, const Latent& leakage,
                                           const Latent& noise) {
  require(e_from.size() == e_to.size() && e_from.size() == leakage.size() &&
              e_from.size() == noise.size(),
          "decomposition components must share one dimension");
  return bridge_mean(tau, interval, e_from, e_to) + leakage + noise;
}

}  // namespace dcarl::errormodel
