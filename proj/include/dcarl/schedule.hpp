#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/keyframes.hpp"
#include "dcarl/latent.hpp"
#include "dcarl/plan.hpp"
#include "dcarl/random.hpp"

namespace dcarl::schedule {

enum class StrideMode { train, test };

struct StridePolicy {
  StrideMode mode = StrideMode::test;
  std::vector<int> candidate_strides;
  int fixed_stride = 8;

  static StridePolicy test(int stride) { return {StrideMode::test, {}, stride}; }
  static StridePolicy train(std::vector<int> strides) {
    return {StrideMode::train, std::move(strides), 0};
  }

  void validate() const {
    if (mode == StrideMode::test) {
      require(fixed_stride >= 1, "stride must be >= 1");
    } else {
      require(!candidate_strides.empty(), "train mode needs candidate strides");
      for (int s : candidate_strides) require(s >= 1, "strides must be >= 1");
    }
  }

  // Strides recorded in a plan file.
  std::vector<int> recorded() const {
    return mode == StrideMode::test ? std::vector<int>{fixed_stride} : candidate_strides;
  }
};

inline int choose_stride(const StridePolicy& policy, Rng& rng) {
  policy.validate();
  if (policy.mode == StrideMode::test) return policy.fixed_stride;
  std::uniform_int_distribution<std::size_t> pick(0, policy.candidate_strides.size() - 1);
  return policy.candidate_strides[pick(rng)];
}

// 0, s, 2s, ... below N, with N-1 appended when it is not already on the grid.
inline std::vector<FrameIndex> keyframes_at_stride(FrameIndex N, FrameIndex stride) {
  require(N >= 1, "total frames must be >= 1");
  require(stride >= 1, "stride must be >= 1");
  std::vector<FrameIndex> out;
  for (FrameIndex k = 0; k < N; k += stride) out.push_back(k);
  if (out.back() != N - 1) out.push_back(N - 1);
  return out;
}

inline std::vector<FrameIndex> sample_keyframe_indices(FrameIndex N, const StridePolicy& policy,
                                                       Rng& rng) {
  require(N >= 1, "total frames must be >= 1");
  return keyframes_at_stride(N, choose_stride(policy, rng));
}

// Keeps the keyframes on the coarser grid (multiples of `stride`) and the last
// one. Used to derive interpolation anchors from generated keyframes.
inline std::vector<FrameIndex> filter_keyframes(std::span<const FrameIndex> keyframes,
                                                FrameIndex stride) {
  require(!keyframes.empty(), "filter_keyframes: empty keyframe list");
  require(stride >= 1, "stride must be >= 1");
  std::vector<FrameIndex> out;
  for (auto k : keyframes)
    if (k % stride == 0) out.push_back(k);
  if (out.empty() || out.back() != keyframes.back()) out.push_back(keyframes.back());
  return out;
}

inline std::vector<Segment> partition_segments(FrameIndex N, FrameIndex seg_len,
                                               FrameIndex overlap,
                                               std::span<const FrameIndex> keyframes) {
  require(N >= 1, "total frames must be >= 1");
  require(overlap >= 0, "overlap must be >= 0");
  require(seg_len > overlap, "segment length must exceed overlap");
  std::vector<Segment> out;
  FrameIndex start = 0;
  for (;;) {
    Segment s;
    s.start = start;
    s.end = std::min(start + seg_len - 1, N - 1);
    if (!out.empty())
      for (FrameIndex k = start; k < start + overlap; ++k) s.history_indices.push_back(k);
    s.keyframe_indices = select_keyframes(keyframes, s.start, s.end);
    out.push_back(std::move(s));
    if (out.back().end == N - 1) break;
    start = out.back().end - overlap + 1;
  }
  return out;
}

// z~ = alpha_c * z + sigma_c * eps, eps ~ N(0, I), drawn frame by frame and
// component by component from rng.
inline LatentSeq noisy_condition(const LatentSeq& z, double alpha_c, double sigma_c, Rng& rng) {
  require(sigma_c >= 0.0, "sigma_c must be >= 0");
  std::vector<Latent> out;
  out.reserve(z.size());
  for (const auto& f : z.frames()) {
    Latent g = alpha_c * f;
    if (sigma_c > 0.0)
      for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += sigma_c * standard_normal(rng);
    out.push_back(std::move(g));
  }
  return LatentSeq(std::move(out), z.start_index());
}

// Overwrites the first history.size() frames of `current` with the clean
// history latents.
inline LatentSeq substitute_boundary(const LatentSeq& current, const LatentSeq& history) {
  require(history.size() <= current.size(), "history longer than segment");
  if (history.empty()) return current;
  require(history.dim() == current.dim(), "history/segment dimension mismatch");
  std::vector<Latent> frames = current.frames();
  std::copy(history.frames().begin(), history.frames().end(), frames.begin());
  return LatentSeq(std::move(frames), current.start_index());
}

struct PlanOptions {
  FrameIndex total_frames = 321;
  StridePolicy policy = StridePolicy::test(8);
  FrameIndex segment_length = 9;
  FrameIndex overlap = 1;
  Conditioning conditioning;
};

inline RolloutPlan build_plan(const PlanOptions& opt, Rng& rng) {
  require(opt.segment_length > opt.overlap, "segment length must exceed overlap");
  RolloutPlan plan;
  plan.total_frames = opt.total_frames;
  plan.strides = opt.policy.recorded();
  plan.keyframes = sample_keyframe_indices(opt.total_frames, opt.policy, rng);
  plan.segments = partition_segments(opt.total_frames, opt.segment_length, opt.overlap,
                                     plan.keyframes);
  plan.overlap = opt.overlap;
  plan.conditioning = opt.conditioning;
  return plan;
}

// Plan over an explicit keyframe set (e.g. filtered generated keyframes).
inline RolloutPlan build_plan_with_keyframes(FrameIndex total_frames,
                                             std::vector<FrameIndex> keyframes,
                                             FrameIndex seg_len, FrameIndex overlap,
                                             Conditioning conditioning = {}) {
  RolloutPlan plan;
  plan.total_frames = total_frames;
  plan.keyframes = std::move(keyframes);
  plan.segments = partition_segments(total_frames, seg_len, overlap, plan.keyframes);
  plan.overlap = overlap;
  plan.conditioning = conditioning;
  return plan;
}

// Training-time sampling hooks. There is no training loop behind them; they
// only reproduce the randomized conditioning a learned interpolator would see.

// 1..max_count keyframes drawn from those within `window` frames of the segment.
inline std::vector<FrameIndex> sample_training_keyframes(std::span<const FrameIndex> keyframes,
                                                         const Segment& seg, Rng& rng,
                                                         int max_count = 10,
                                                         FrameIndex window = 10) {
  std::vector<FrameIndex> pool;
  for (auto k : keyframes)
    if (k >= seg.start - window && k <= seg.end + window) pool.push_back(k);
  if (pool.empty()) return pool;
  std::uniform_int_distribution<int> count(1, std::min<int>(max_count, static_cast<int>(pool.size())));
  const int n = count(rng);
  std::vector<FrameIndex> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), n, rng);
  return out;
}

inline double sample_training_alpha(Rng& rng, double lo = 0.1, double hi = 0.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace dcarl::schedule
