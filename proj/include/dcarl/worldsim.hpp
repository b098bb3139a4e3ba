#pragma once

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/errormodel.hpp"
#include "dcarl/latent.hpp"
#include "dcarl/parallel.hpp"
#include "dcarl/plan.hpp"
#include "dcarl/random.hpp"
#include "dcarl/trajectory.hpp"

namespace dcarl::worldsim {

// Linear controlled world x*_{t+1} = A x*_t + u_t. The AR generator adds a
// bias b and Gaussian noise of std `noise_std` per component and per step.
struct WorldConfig {
  Eigen::MatrixXd dynamics;
  Eigen::VectorXd bias;
  double noise_std = 0.0;
  Latent initial_state;
  std::vector<Latent> controls;  // u_t; the last entry is held past the end
  double synthetic_control = 0.0;  // amplitude of sin controls when `controls` is empty
  std::uint64_t seed = 0;

  Eigen::Index dim() const { return dynamics.rows(); }

  double lipschitz() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dynamics);
    return svd.singularValues()(0);
  }

  Latent control(FrameIndex t) const {
    if (!controls.empty())
      return controls[static_cast<std::size_t>(
          std::min<FrameIndex>(t, static_cast<FrameIndex>(controls.size()) - 1))];
    Latent u(dim());
    for (Eigen::Index k = 0; k < dim(); ++k)
      u[k] = synthetic_control * std::sin(0.07 * static_cast<double>(t) + 0.9 * static_cast<double>(k));
    return u;
  }

  void validate() const {
    require(dynamics.rows() >= 1 && dynamics.rows() == dynamics.cols(), "dynamics must be square, d >= 1");
    require(bias.size() == dim() && initial_state.size() == dim(), "bias/initial state dimension mismatch");
    require(noise_std >= 0.0, "noise std must be >= 0");
    for (const auto& u : controls) require(u.size() == dim(), "control dimension mismatch");
  }
};

enum class DynamicsKind { identity, orthogonal, random };

struct WorldParams {
  Eigen::Index dim = 4;
  double lipschitz = 1.0;
  double bias_norm = 0.01;
  double noise_std = 0.0;
  double control_amplitude = 0.1;
  DynamicsKind dynamics = DynamicsKind::identity;
  std::uint64_t seed = 0;
};

inline Latent unit_diagonal(Eigen::Index d) {
  return Latent::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
}

// Builds A with spectral norm exactly `lipschitz` (up to rounding).
inline WorldConfig make_world(const WorldParams& p) {
  require(p.dim >= 1, "dim must be >= 1");
  require(p.lipschitz >= 0.0 && p.bias_norm >= 0.0 && p.noise_std >= 0.0,
          "world parameters must be >= 0");
  WorldConfig cfg;
  const auto d = p.dim;
  Rng rng = make_rng(p.seed, "world-dynamics");
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = standard_normal(rng);
  switch (p.dynamics) {
    case DynamicsKind::identity:
      cfg.dynamics = p.lipschitz * Eigen::MatrixXd::Identity(d, d);
      break;
    case DynamicsKind::orthogonal: {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      cfg.dynamics = p.lipschitz * Eigen::MatrixXd(qr.householderQ());
      break;
    }
    case DynamicsKind::random: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
      cfg.dynamics = g * (p.lipschitz / svd.singularValues()(0));
      break;
    }
  }
  cfg.bias = p.bias_norm * unit_diagonal(d);
  cfg.noise_std = p.noise_std;
  cfg.initial_state = Latent::Zero(d);
  cfg.synthetic_control = p.control_amplitude;
  cfg.seed = p.seed;
  return cfg;
}

// u_t from the translation velocity of a dense camera path; latent component k
// follows velocity axis k mod 3.
inline std::vector<Latent> controls_from_trajectory(const Trajectory& traj, Eigen::Index dim) {
  require(traj.size() >= 2, "need at least two poses for velocities");
  std::vector<Latent> out;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const Eigen::Vector3d v = (traj[i + 1].translation - traj[i].translation) /
                              static_cast<double>(traj.index(i + 1) - traj.index(i));
    Latent u(dim);
    for (Eigen::Index k = 0; k < dim; ++k) u[k] = v[k % 3];
    out.push_back(std::move(u));
  }
  return out;
}

// Frames 0..steps of the noiseless controlled system.
inline LatentSeq simulate_ground_truth(const WorldConfig& cfg, FrameIndex steps) {
  cfg.validate();
  require(steps >= 0, "steps must be >= 0");
  std::vector<Latent> x;
  x.reserve(static_cast<std::size_t>(steps + 1));
  x.push_back(cfg.initial_state);
  for (FrameIndex t = 0; t < steps; ++t) x.push_back(cfg.dynamics * x.back() + cfg.control(t));
  return LatentSeq(std::move(x));
}

struct RolloutTrace {
  LatentSeq generated;
  LatentSeq ground_truth;
  std::vector<double> error_norms;
  std::vector<errormodel::BoundBreakdown> bounds;
  std::vector<FrameIndex> segment_boundaries;  // start frame of each segment
  std::vector<bool> is_keyframe;
  std::vector<int> segment_id;  // segment whose output the frame came from
  // Per-segment outputs after boundary substitution (DCAR only).
  std::vector<LatentSeq> segment_outputs;
  // Error components per frame (DCAR only): anchor interpolation, leakage,
  // bridge noise, and the interpolation deficit of the linear generator.
  std::vector<Latent> anchor_part, leakage_part, noise_part, deficit_part;

  std::vector<Latent> errors() const {
    std::vector<Latent> e;
    e.reserve(generated.size());
    for (std::size_t t = 0; t < generated.size(); ++t) e.push_back(generated[t] - ground_truth[t]);
    return e;
  }
};

inline void fill_error_norms(RolloutTrace& trace) {
  trace.error_norms.resize(trace.generated.size());
  for (std::size_t t = 0; t < trace.generated.size(); ++t)
    trace.error_norms[t] = (trace.generated[t] - trace.ground_truth[t]).norm();
}

// x_{t+1} = A x_t + u_t + b + sigma * eps_t from x_0 = x*_0. Bound column is
// the Lipschitz upper bound for eta = |b|.
inline RolloutTrace rollout_pure_ar(const WorldConfig& cfg, FrameIndex steps, Rng& rng) {
  cfg.validate();
  require(steps >= 0, "steps must be >= 0");
  RolloutTrace tr;
  tr.ground_truth = simulate_ground_truth(cfg, steps);
  std::vector<Latent> x;
  x.reserve(static_cast<std::size_t>(steps + 1));
  x.push_back(cfg.initial_state);
  const double L = cfg.lipschitz();
  const double eta = cfg.bias.norm();
  tr.bounds.resize(static_cast<std::size_t>(steps + 1));
  for (FrameIndex t = 0; t < steps; ++t) {
    Latent next = cfg.dynamics * x.back() + cfg.control(t) + cfg.bias;
    if (cfg.noise_std > 0.0)
      for (Eigen::Index k = 0; k < next.size(); ++k) next[k] += cfg.noise_std * standard_normal(rng);
    x.push_back(std::move(next));
    tr.bounds[static_cast<std::size_t>(t + 1)].total =
        errormodel::ar_error_upper_bound(L, eta, static_cast<std::size_t>(t + 1)).value;
  }
  tr.generated = LatentSeq(std::move(x));
  fill_error_norms(tr);
  tr.segment_boundaries = {0};
  tr.is_keyframe.assign(tr.generated.size(), false);
  tr.is_keyframe[0] = true;
  tr.segment_id.assign(tr.generated.size(), 0);
  return tr;
}

inline RolloutTrace rollout_pure_ar(const WorldConfig& cfg, FrameIndex steps) {
  Rng rng = make_rng(cfg.seed, "ar");
  return rollout_pure_ar(cfg, steps, rng);
}

// ---------------------------------------------------------------------------
// Keyframes

enum class KeyframeScenario { global, downsampled_ar };

inline const char* to_string(KeyframeScenario s) {
  return s == KeyframeScenario::global ? "global" : "downsampled_ar";
}

struct KeyframeOptions {
  KeyframeScenario scenario = KeyframeScenario::global;
  double error_cap = 0.0;             // C_kf for the global scenario
  std::optional<Latent> step_bias;     // per keyframe step; defaults to the world bias
  std::optional<double> step_noise;    // per keyframe step; defaults to the world noise std
};

// Frame 0 is the given initial frame and is always exact.
// global: keyframe = ground truth + perturbation of norm <= C_kf (uniform radius,
//   uniform direction).
// downsampled_ar: K_{j+1} = (exact gt transition over the gap applied to K_j)
//   + step bias + step noise, so errors follow e_{j+1} = A^gap e_j + b + sigma eps.
inline SparseLatents generate_keyframes(const WorldConfig& cfg, const LatentSeq& ground_truth,
                                        std::span<const FrameIndex> indices,
                                        const KeyframeOptions& opt, Rng& rng) {
  require(!indices.empty() && indices.front() == 0, "keyframe indices must start at 0");
  require(std::is_sorted(indices.begin(), indices.end()), "keyframe indices must be sorted");
  require(indices.back() < static_cast<FrameIndex>(ground_truth.size()),
          "keyframe index beyond ground truth");
  require(opt.error_cap >= 0.0, "keyframe error cap must be >= 0");
  const auto d = cfg.dim();
  SparseLatents out;
  out[0] = ground_truth[0];
  if (opt.scenario == KeyframeScenario::global) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 1; j < indices.size(); ++j) {
      Latent dir(d);
      for (Eigen::Index k = 0; k < d; ++k) dir[k] = standard_normal(rng);
      const double n = dir.norm();
      const double radius = opt.error_cap * unit(rng);
      Latent k = ground_truth[static_cast<std::size_t>(indices[j])];
      if (n > 0.0) k += (radius / n) * dir;
      out[indices[j]] = std::move(k);
    }
    return out;
  }
  const Latent bias = opt.step_bias.value_or(cfg.bias);
  require(bias.size() == d, "keyframe step bias dimension mismatch");
  const double sigma = opt.step_noise.value_or(cfg.noise_std);
  Latent k = ground_truth[0];
  for (std::size_t j = 1; j < indices.size(); ++j) {
    for (FrameIndex t = indices[j - 1]; t < indices[j]; ++t)
      k = cfg.dynamics * k + cfg.control(t);
    k += bias;
    if (sigma > 0.0)
      for (Eigen::Index c = 0; c < d; ++c) k[c] += sigma * standard_normal(rng);
    out[indices[j]] = k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Divide-and-conquer rollout

enum class LocalMotion {
  ground_truth,  // generator reproduces the ground truth's own deviation from its keyframe bridge
  linear,        // generator emits the pure bridge mean (interpolation deficit shows up as error)
};

struct DcarOptions {
  double interp_noise = 0.0;            // sigma_int
  double initial_velocity_error = 0.0;  // |dv0|, injected into the first keyframe interval
  bool momentum = true;                 // hand the damped velocity error to later intervals
  bool substitution = true;             // copy the first p frames from the predecessor
  LocalMotion local_motion = LocalMotion::ground_truth;
};

namespace detail {

struct Interval {
  FrameIndex from = 0, to = 0;
  errormodel::SplineSolution leak;
  double length() const { return static_cast<double>(to - from); }
};

inline std::size_t interval_of(const std::vector<Interval>& iv, FrameIndex t) {
  auto it = std::upper_bound(iv.begin(), iv.end(), t,
                             [](FrameIndex v, const Interval& i) { return v < i.from; });
  std::size_t j = static_cast<std::size_t>(std::distance(iv.begin(), it));
  return j == 0 ? 0 : j - 1;
}

}  // namespace detail

// Segment by segment: each frame is the bridge mean between its bracketing
// keyframes, plus the local motion term, plus the leakage spline of its
// keyframe interval, plus a Brownian-bridge noise draw owned by the segment.
// Keyframe frames are pinned to the keyframe latents.
inline RolloutTrace rollout_dcar(const WorldConfig& cfg, const RolloutPlan& plan,
                                 const SparseLatents& keyframes, const DcarOptions& opt, Rng& rng) {
  cfg.validate();
  if (auto v = validate_plan(plan); !v.empty()) throw InvalidInput("rollout_dcar: invalid plan: " + v.front());
  require(opt.interp_noise >= 0.0, "sigma_int must be >= 0");
  const auto d = cfg.dim();
  for (auto k : plan.keyframes) {
    auto it = keyframes.find(k);
    require(it != keyframes.end(), "rollout_dcar: missing keyframe latent for frame " + std::to_string(k));
    require(it->second.size() == d, "rollout_dcar: keyframe dimension mismatch");
  }

  const auto N = static_cast<std::size_t>(plan.total_frames);
  RolloutTrace tr;
  tr.ground_truth = simulate_ground_truth(cfg, plan.total_frames - 1);
  const auto& gt = tr.ground_truth;
  const Latent dir = unit_diagonal(d);
  const Latent zero = Latent::Zero(d);

  std::vector<detail::Interval> intervals;
  double v = opt.initial_velocity_error;
  for (std::size_t j = 0; j + 1 < plan.keyframes.size(); ++j) {
    detail::Interval iv{plan.keyframes[j], plan.keyframes[j + 1], {}};
    iv.leak = errormodel::solve_damping_spline(iv.length(), v);
    intervals.push_back(iv);
    v = opt.momentum ? errormodel::damping_step(v) : 0.0;
  }

  std::vector<Latent> gen(N, zero);
  tr.anchor_part.assign(N, zero);
  tr.leakage_part.assign(N, zero);
  tr.noise_part.assign(N, zero);
  tr.deficit_part.assign(N, zero);
  tr.segment_id.assign(N, -1);
  tr.is_keyframe.assign(N, false);
  for (auto k : plan.keyframes) tr.is_keyframe[static_cast<std::size_t>(k)] = true;

  auto kf_error = [&](FrameIndex k) -> Latent {
    return keyframes.at(k) - gt[static_cast<std::size_t>(k)];
  };

  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const auto& seg = plan.segments[i];
    tr.segment_boundaries.push_back(seg.start);
    const bool carry = (i == 0) || opt.substitution;
    const FrameIndex copied = (i > 0 && opt.substitution) ? plan.overlap : 0;
    // Bridge noise paths of this segment, one per touched interval.
    std::vector<std::optional<std::vector<Latent>>> noise(intervals.size());

    for (FrameIndex t = seg.start; t <= seg.end; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      if (t < seg.start + copied) continue;  // substituted from the predecessor
      tr.segment_id[ut] = static_cast<int>(i);
      if (tr.is_keyframe[ut] || intervals.empty()) {
        gen[ut] = keyframes.at(t);
        tr.anchor_part[ut] = kf_error(t);
        tr.leakage_part[ut] = zero;
        tr.noise_part[ut] = zero;
        tr.deficit_part[ut] = zero;
        continue;
      }
      const std::size_t j = detail::interval_of(intervals, t);
      const auto& iv = intervals[j];
      const double T = iv.length();
      const double tau = static_cast<double>(t - iv.from);
      const Latent& ka = keyframes.at(iv.from);
      const Latent& kb = keyframes.at(iv.to);
      const auto ua = static_cast<std::size_t>(iv.from), ub = static_cast<std::size_t>(iv.to);
      const Latent gt_bridge = errormodel::bridge_mean(tau, T, gt[ua], gt[ub]);
      const Latent local = opt.local_motion == LocalMotion::ground_truth ? Latent(gt[ut] - gt_bridge) : zero;
      const Latent leak = carry ? Latent(iv.leak.value(tau) * dir) : zero;
      Latent w = zero;
      if (opt.interp_noise > 0.0) {
        if (!noise[j]) {
          const auto steps = static_cast<std::size_t>(iv.to - iv.from);
          std::vector<Latent> path(steps + 1, zero);
          for (Eigen::Index c = 0; c < d; ++c) {
            auto b = errormodel::simulate_bridge(T, steps, opt.interp_noise, rng);
            for (std::size_t s = 0; s <= steps; ++s) path[s][c] = b[s];
          }
          noise[j] = std::move(path);
        }
        w = (*noise[j])[static_cast<std::size_t>(t - iv.from)];
      }
      gen[ut] = errormodel::bridge_mean(tau, T, ka, kb) + local + leak + w;
      tr.anchor_part[ut] = errormodel::bridge_mean(tau, T, kf_error(iv.from), kf_error(iv.to));
      tr.leakage_part[ut] = leak;
      tr.noise_part[ut] = w;
      tr.deficit_part[ut] = gt_bridge + local - gt[ut];
    }
    std::vector<Latent> out(gen.begin() + seg.start, gen.begin() + seg.end + 1);
    tr.segment_outputs.emplace_back(std::move(out), seg.start);
  }

  tr.generated = LatentSeq(std::move(gen));
  fill_error_norms(tr);

  // Local form of the unified bound: anchors of the bracketing interval.
  tr.bounds.resize(N);
  for (std::size_t t = 0; t < N; ++t) {
    if (intervals.empty()) {
      tr.bounds[t] = errormodel::unified_bound(1.0, 0.0, opt.interp_noise, kf_error(0).norm());
      continue;
    }
    const auto& iv = intervals[detail::interval_of(intervals, static_cast<FrameIndex>(t))];
    const double anchor = tr.is_keyframe[t]
                              ? kf_error(static_cast<FrameIndex>(t)).norm()
                              : std::max(kf_error(iv.from).norm(), kf_error(iv.to).norm());
    tr.bounds[t] = errormodel::unified_bound(iv.length(), opt.initial_velocity_error,
                                             opt.interp_noise, anchor);
  }
  return tr;
}

// Mean squared second difference of the error sequence at the given centers.
inline double junction_roughness(const std::vector<Latent>& errors,
                                 std::span<const FrameIndex> centers) {
  double sum = 0.0;
  std::size_t n = 0;
  for (auto c : centers) {
    if (c < 1 || c + 1 >= static_cast<FrameIndex>(errors.size())) continue;
    const auto u = static_cast<std::size_t>(c);
    sum += (errors[u + 1] - 2.0 * errors[u] + errors[u - 1]).squaredNorm();
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

// Roughness around every segment junction: centers start-1 .. start+p.
inline double boundary_roughness(const RolloutTrace& trace, FrameIndex overlap) {
  std::vector<FrameIndex> centers;
  for (std::size_t i = 1; i < trace.segment_boundaries.size(); ++i)
    for (FrameIndex c = trace.segment_boundaries[i] - 1; c <= trace.segment_boundaries[i] + overlap; ++c)
      centers.push_back(c);
  return junction_roughness(trace.errors(), centers);
}

// Frames whose measured error exceeds the per-frame bound (relative slack
// 1e-12 for rounding).
inline std::size_t count_violations(const RolloutTrace& trace) {
  std::size_t n = 0;
  for (std::size_t t = 0; t < trace.error_norms.size() && t < trace.bounds.size(); ++t) {
    const double b = trace.bounds[t].total;
    if (trace.error_norms[t] > b + 1e-12 * std::max(1.0, b)) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Monte-Carlo comparison

struct CompareOptions {
  std::vector<KeyframeScenario> scenarios{KeyframeScenario::global, KeyframeScenario::downsampled_ar};
  KeyframeOptions keyframes;  // scenario field is overridden per entry
  DcarOptions dcar;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

struct PipelineCurves {
  std::vector<double> mean_error;
  std::vector<double> mse;
};

struct ScenarioComparison {
  KeyframeScenario scenario = KeyframeScenario::global;
  PipelineCurves dcar;
  std::vector<double> ratio;  // mean AR error / mean DCAR error
  std::size_t violations = 0;  // counted only when sigma_int == 0
  double max_error = 0.0;
};

struct ComparisonReport {
  std::size_t trials = 0;
  PipelineCurves ar;
  std::vector<ScenarioComparison> scenarios;
  RolloutTrace ar_example;                 // trial 0
  std::vector<RolloutTrace> dcar_examples; // trial 0, one per scenario
};

inline double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

inline ComparisonReport compare_pipelines(const WorldConfig& cfg, const RolloutPlan& plan,
                                          const CompareOptions& opt) {
  require(opt.trials >= 1, "trials must be >= 1");
  const auto N = static_cast<std::size_t>(plan.total_frames);
  const std::size_t S = opt.scenarios.size();
  constexpr std::size_t kChunk = 16;
  const std::size_t chunks = (opt.trials + kChunk - 1) / kChunk;

  struct Partial {
    std::vector<double> ar_sum, ar_sq;
    std::vector<std::vector<double>> dc_sum, dc_sq;
    std::vector<std::size_t> violations;
    std::vector<double> max_error;
  };
  std::vector<Partial> partial(chunks);
  ComparisonReport report;
  report.trials = opt.trials;

  for_each_chunk(opt.trials, kChunk, [&](std::size_t c, std::size_t first, std::size_t last) {
    Partial p;
    p.ar_sum.assign(N, 0.0);
    p.ar_sq.assign(N, 0.0);
    p.dc_sum.assign(S, std::vector<double>(N, 0.0));
    p.dc_sq.assign(S, std::vector<double>(N, 0.0));
    p.violations.assign(S, 0);
    p.max_error.assign(S, 0.0);
    for (std::size_t trial = first; trial < last; ++trial) {
      Rng ar_rng = make_rng(opt.seed, "ar", trial);
      auto ar = rollout_pure_ar(cfg, plan.total_frames - 1, ar_rng);
      for (std::size_t t = 0; t < N; ++t) {
        p.ar_sum[t] += ar.error_norms[t];
        p.ar_sq[t] += ar.error_norms[t] * ar.error_norms[t];
      }
      for (std::size_t s = 0; s < S; ++s) {
        KeyframeOptions ko = opt.keyframes;
        ko.scenario = opt.scenarios[s];
        Rng kf_rng = make_rng(opt.seed, std::string("keyframes-") + to_string(ko.scenario), trial);
        auto kf = generate_keyframes(cfg, ar.ground_truth, plan.keyframes, ko, kf_rng);
        Rng dc_rng = make_rng(opt.seed, std::string("dcar-") + to_string(ko.scenario), trial);
        auto dc = rollout_dcar(cfg, plan, kf, opt.dcar, dc_rng);
        for (std::size_t t = 0; t < N; ++t) {
          p.dc_sum[s][t] += dc.error_norms[t];
          p.dc_sq[s][t] += dc.error_norms[t] * dc.error_norms[t];
          p.max_error[s] = std::max(p.max_error[s], dc.error_norms[t]);
        }
        if (opt.dcar.interp_noise == 0.0) p.violations[s] += count_violations(dc);
        if (trial == 0) {
          // Only chunk 0 touches trial 0.
          if (report.dcar_examples.size() < S) report.dcar_examples.resize(S);
          report.dcar_examples[s] = std::move(dc);
        }
      }
      if (trial == 0) report.ar_example = std::move(ar);
    }
    partial[c] = std::move(p);
  });

  const double n = static_cast<double>(opt.trials);
  report.ar.mean_error.assign(N, 0.0);
  report.ar.mse.assign(N, 0.0);
  report.scenarios.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    report.scenarios[s].scenario = opt.scenarios[s];
    report.scenarios[s].dcar.mean_error.assign(N, 0.0);
    report.scenarios[s].dcar.mse.assign(N, 0.0);
  }
  for (const auto& p : partial) {
    for (std::size_t t = 0; t < N; ++t) {
      report.ar.mean_error[t] += p.ar_sum[t];
      report.ar.mse[t] += p.ar_sq[t];
    }
    for (std::size_t s = 0; s < S; ++s) {
      auto& sc = report.scenarios[s];
      for (std::size_t t = 0; t < N; ++t) {
        sc.dcar.mean_error[t] += p.dc_sum[s][t];
        sc.dcar.mse[t] += p.dc_sq[s][t];
      }
      sc.violations += p.violations[s];
      sc.max_error = std::max(sc.max_error, p.max_error[s]);
    }
  }
  for (std::size_t t = 0; t < N; ++t) {
    report.ar.mean_error[t] /= n;
    report.ar.mse[t] /= n;
  }
  for (auto& sc : report.scenarios) {
    sc.ratio.resize(N);
    for (std::size_t t = 0; t < N; ++t) {
      sc.dcar.mean_error[t] /= n;
      sc.dcar.mse[t] /= n;
      sc.ratio[t] = safe_ratio(report.ar.mean_error[t], sc.dcar.mean_error[t]);
    }
  }
  return report;
}

}  // namespace dcarl::worldsim
