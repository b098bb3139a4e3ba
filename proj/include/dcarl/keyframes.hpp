#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/pose.hpp"

namespace dcarl::schedule {

// Keyframe subset for the segment [seg_start, seg_end]: every keyframe inside
// the span, plus the closest keyframe strictly before it (look-back anchor)
// and the closest strictly after it (look-ahead anchor). Either anchor is
// omitted when none exists; a missing look-ahead marks a tail segment.
inline std::vector<FrameIndex> select_keyframes(std::span<const FrameIndex> keyframes,
                                                FrameIndex seg_start, FrameIndex seg_end) {
  require(!keyframes.empty(), "select_keyframes: empty keyframe list");
  require(seg_start <= seg_end, "select_keyframes: seg_start > seg_end");
  require(std::is_sorted(keyframes.begin(), keyframes.end()),
          "select_keyframes: keyframes must be sorted");

  FrameIndex lo = seg_start;
  FrameIndex hi = seg_end;
  auto first_in = std::lower_bound(keyframes.begin(), keyframes.end(), seg_start);
  if (first_in != keyframes.begin()) lo = *std::prev(first_in);
  auto after = std::upper_bound(keyframes.begin(), keyframes.end(), seg_end);
  if (after != keyframes.end()) hi = *after;

  std::vector<FrameIndex> out;
  for (auto it = std::lower_bound(keyframes.begin(), keyframes.end(), lo);
       it != keyframes.end() && *it <= hi; ++it) {
    if (out.empty() || out.back() != *it) out.push_back(*it);
  }
  return out;
}

inline bool is_tail_segment(std::span<const FrameIndex> keyframes, FrameIndex seg_end) {
  return keyframes.empty() || keyframes.back() <= seg_end;
}

}  // namespace dcarl::schedule
