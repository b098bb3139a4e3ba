#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dcarl/error.hpp"

namespace dcarl {

// Every symbol of the AR-divergence / keyframe-interpolation error model.
struct ErrorModelParams {
  double lipschitz = 1.0;          // L
  double step_error = 0.0;         // eta, per-step injection norm
  double drift_bias = 0.0;         // mu
  double step_variance = 0.0;      // sigma^2 per latent dimension
  double keyframe_interval = 8.0;  // T, frames
  double interp_noise = 0.0;       // sigma_int
  double initial_velocity_error = 0.0;  // |dv0|
  double keyframe_error_cap = 0.0;      // C_kf

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto nonneg = [&](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be finite and >= 0");
    };
    nonneg(lipschitz, "lipschitz");
    nonneg(step_error, "step_error");
    nonneg(drift_bias, "drift_bias");
    nonneg(step_variance, "step_variance");
    nonneg(interp_noise, "interp_noise");
    nonneg(initial_velocity_error, "initial_velocity_error");
    nonneg(keyframe_error_cap, "keyframe_error_cap");
    if (!(keyframe_interval >= 1.0) || keyframe_interval != std::floor(keyframe_interval))
      out.emplace_back("keyframe_interval must be an integer >= 1");
    return out;
  }

  void validate() const {
    auto v = violations();
    if (!v.empty()) throw InvalidInput("error model: " + v.front());
  }
};

}  // namespace dcarl
