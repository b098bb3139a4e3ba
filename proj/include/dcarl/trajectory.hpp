#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/pose.hpp"

namespace dcarl {

// Ordered camera path. Every pose carries a frame index and the indices are
// strictly increasing.
class Trajectory {
 public:
  explicit Trajectory(std::vector<Pose> poses) : poses_(std::move(poses)) {
    auto v = violations();
    if (!v.empty()) throw InvalidInput("trajectory: " + v.front());
  }

  const std::vector<Pose>& poses() const noexcept { return poses_; }
  std::size_t size() const noexcept { return poses_.size(); }
  const Pose& operator[](std::size_t i) const { return poses_[i]; }
  FrameIndex index(std::size_t i) const { return *poses_[i].frame_index; }
  FrameIndex first_index() const { return index(0); }
  FrameIndex last_index() const { return index(size() - 1); }

  std::vector<Eigen::Vector3d> positions() const {
    std::vector<Eigen::Vector3d> out;
    out.reserve(poses_.size());
    for (const auto& p : poses_) out.push_back(p.translation);
    return out;
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (poses_.empty()) {
      out.emplace_back("empty trajectory");
      return out;
    }
    for (std::size_t i = 0; i < poses_.size(); ++i) {
      if (!poses_[i].frame_index) {
        out.push_back("pose " + std::to_string(i) + " has no frame index");
        continue;
      }
      if (std::abs(poses_[i].rotation.norm() - 1.0) > 1e-9)
        out.push_back("pose " + std::to_string(i) + " quaternion not unit");
      if (i > 0 && poses_[i - 1].frame_index &&
          *poses_[i].frame_index <= *poses_[i - 1].frame_index)
        out.push_back("frame indices not strictly increasing at pose " + std::to_string(i));
    }
    return out;
  }

 private:
  std::vector<Pose> poses_;
};

// Lines: "index tx ty tz qx qy qz qw"; '#' starts a comment.
inline Trajectory read_trajectory(std::istream& in) {
  std::vector<Pose> poses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    FrameIndex index = 0;
    std::size_t used = 0;
    try {
      index = std::stoll(first, &used);
    } catch (const std::exception&) {
      throw ParseError("bad frame index '" + first + "'", lineno);
    }
    if (used != first.size() || index < 0)
      throw ParseError("bad frame index '" + first + "'", lineno);
    double v[7];
    for (double& x : v) {
      std::string tok;
      if (!(ss >> tok)) throw ParseError("expected 8 fields 'index tx ty tz qx qy qz qw'", lineno);
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(x))
        throw ParseError("not a finite number: '" + tok + "'", lineno);
    }
    std::string extra;
    if (ss >> extra) throw ParseError("trailing field '" + extra + "'", lineno);
    const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
    if (!(q.norm() > 1e-12) || !std::isfinite(q.norm()))
      throw ParseError("degenerate quaternion", lineno);
    if (!poses.empty() && index <= *poses.back().frame_index)
      throw ParseError("frame index not strictly increasing", lineno);
    poses.emplace_back(q, Eigen::Vector3d(v[0], v[1], v[2]), index);
  }
  if (poses.empty()) throw ParseError("no poses", 0);
  return Trajectory(std::move(poses));
}

inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "# index tx ty tz qx qy qz qw\n";
  out.precision(17);
  for (const auto& p : traj.poses()) {
    const auto& q = p.rotation;
    out << *p.frame_index << ' ' << p.translation.x() << ' ' << p.translation.y() << ' '
        << p.translation.z() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' ' << q.w()
        << '\n';
  }
}

}  // namespace dcarl
