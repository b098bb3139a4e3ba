#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dcarl/keyframes.hpp"
#include "dcarl/pose.hpp"

namespace dcarl {

// One generation window [start, end] (inclusive). history_indices are the
// frames shared with the predecessor (its last `overlap` indices), which the
// segment receives verbatim; they are empty for the first segment.
struct Segment {
  FrameIndex start = 0;
  FrameIndex end = 0;
  std::vector<FrameIndex> history_indices;
  std::vector<FrameIndex> keyframe_indices;

  FrameIndex length() const { return end - start + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Conditioning {
  double alpha_c = 0.7;
  double sigma_c = 0.3;
  friend bool operator==(const Conditioning&, const Conditioning&) = default;
};

struct RolloutPlan {
  FrameIndex total_frames = 0;
  std::vector<int> strides;  // candidate strides of the policy that produced the plan
  std::vector<FrameIndex> keyframes;
  std::vector<Segment> segments;
  FrameIndex overlap = 0;
  Conditioning conditioning;

  friend bool operator==(const RolloutPlan&, const RolloutPlan&) = default;
};

// Empty iff every plan invariant holds.
inline std::vector<std::string> validate_plan(const RolloutPlan& plan) {
  std::vector<std::string> out;
  const auto N = plan.total_frames;
  if (N < 1) out.push_back("total_frames must be >= 1");
  if (plan.overlap < 0) out.push_back("overlap must be >= 0");

  const auto& kf = plan.keyframes;
  if (kf.empty()) {
    out.push_back("keyframes: empty");
  } else {
    if (kf.front() != 0) out.push_back("keyframes: frame 0 must be the first keyframe");
    for (std::size_t i = 1; i < kf.size(); ++i)
      if (kf[i] <= kf[i - 1]) {
        out.push_back("keyframes: not strictly increasing");
        break;
      }
    if (kf.back() > N - 1 || kf.front() < 0) out.push_back("keyframes: index out of range");
  }

  const auto& segs = plan.segments;
  if (segs.empty()) {
    out.push_back("coverage gap: no segments");
    return out;
  }
  if (segs.front().start != 0) out.push_back("coverage gap: first segment does not start at 0");
  if (segs.back().end != N - 1) out.push_back("coverage gap: last segment does not end at N-1");

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    const std::string tag = "segment " + std::to_string(i) + ": ";
    if (s.start > s.end) out.push_back(tag + "start > end");
    if (i > 0) {
      const auto& prev = segs[i - 1];
      const FrameIndex shared = prev.end - s.start + 1;
      if (shared < 0) {
        out.push_back(tag + "coverage gap before segment");
      } else {
        if (shared != plan.overlap)
          out.push_back(tag + "overlap " + std::to_string(shared) + " != " +
                        std::to_string(plan.overlap));
        std::vector<FrameIndex> expect;
        for (FrameIndex k = prev.end - plan.overlap + 1; k <= prev.end; ++k) expect.push_back(k);
        if (s.history_indices != expect)
          out.push_back(tag + "history is not the predecessor's last p frames");
      }
    } else if (!s.history_indices.empty()) {
      out.push_back(tag + "first segment must have empty history");
    }

    bool subset = true;
    for (auto k : s.keyframe_indices)
      if (!std::binary_search(kf.begin(), kf.end(), k)) subset = false;
    if (!subset) {
      out.push_back(tag + "keyframe subset violation (index not among global keyframes)");
    } else if (!kf.empty() && s.start <= s.end &&
               s.keyframe_indices != schedule::select_keyframes(kf, s.start, s.end)) {
      out.push_back(tag + "keyframe selection does not match the look-back/look-ahead policy");
    }
  }
  return out;
}

}  // namespace dcarl
