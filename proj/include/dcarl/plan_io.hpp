#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "dcarl/kv.hpp"
#include "dcarl/plan.hpp"
#include "dcarl/schedule.hpp"

namespace dcarl {

// Plan file keys: total_frames, strides, overlap, alpha_c, sigma_c, keyframes,
// segments ("start:end" pairs). Histories and keyframe subsets are derived on
// load from overlap and the selection policy.
inline void write_plan(std::ostream& out, const RolloutPlan& plan) {
  out << "# rollout plan\n";
  out << "total_frames = " << plan.total_frames << '\n';
  out << "strides =";
  for (int s : plan.strides) out << ' ' << s;
  out << '\n';
  out << "overlap = " << plan.overlap << '\n';
  out << "alpha_c = " << format_double(plan.conditioning.alpha_c) << '\n';
  out << "sigma_c = " << format_double(plan.conditioning.sigma_c) << '\n';
  out << "keyframes =";
  for (auto k : plan.keyframes) out << ' ' << k;
  out << '\n';
  out << "segments =";
  for (const auto& s : plan.segments) out << ' ' << s.start << ':' << s.end;
  out << '\n';
}

inline RolloutPlan read_plan(std::istream& in) {
  const auto kv = parse_key_values(in);
  auto get = [&](const char* key) -> const KeyValueEntry& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("plan: missing key '") + key + "'", 0);
    return it->second;
  };
  for (const auto& [key, entry] : kv) {
    static const char* known[] = {"total_frames", "strides", "overlap", "alpha_c",
                                  "sigma_c",      "keyframes", "segments"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ParseError("plan: unknown key '" + key + "'", entry.line);
  }

  RolloutPlan plan;
  const auto& tf = get("total_frames");
  plan.total_frames = parse_int(tf.value, tf.line);
  const auto& st = get("strides");
  for (const auto& s : split_list(st.value, ','))
    plan.strides.push_back(static_cast<int>(parse_int(s, st.line)));
  const auto& ov = get("overlap");
  plan.overlap = parse_int(ov.value, ov.line);
  plan.conditioning.alpha_c = parse_double(get("alpha_c").value, get("alpha_c").line);
  plan.conditioning.sigma_c = parse_double(get("sigma_c").value, get("sigma_c").line);
  const auto& kf = get("keyframes");
  for (const auto& s : split_list(kf.value, ',')) plan.keyframes.push_back(parse_int(s, kf.line));
  if (plan.keyframes.empty() || !std::is_sorted(plan.keyframes.begin(), plan.keyframes.end()))
    throw ParseError("plan: keyframes must be a nonempty sorted list", kf.line);

  const auto& sg = get("segments");
  for (const auto& item : split_list(sg.value, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("plan: segment '" + item + "' is not start:end", sg.line);
    Segment s;
    s.start = parse_int(item.substr(0, colon), sg.line);
    s.end = parse_int(item.substr(colon + 1), sg.line);
    if (s.start > s.end) throw ParseError("plan: segment '" + item + "' has start > end", sg.line);
    if (!plan.segments.empty()) {
      const auto& prev = plan.segments.back();
      for (FrameIndex k = prev.end - plan.overlap + 1; k <= prev.end; ++k)
        s.history_indices.push_back(k);
    }
    s.keyframe_indices = schedule::select_keyframes(plan.keyframes, s.start, s.end);
    plan.segments.push_back(std::move(s));
  }
  return plan;
}

}  // namespace dcarl
