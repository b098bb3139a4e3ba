#pragma once

#include <Eigen/Core>

#include <map>
#include <utility>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/pose.hpp"

namespace dcarl {

using Latent = Eigen::VectorXd;

// Dense run of latent frames [start_index, start_index + size()). Frames are
// the same objects as latents here (no encoder).
class LatentSeq {
 public:
  LatentSeq() = default;
  LatentSeq(std::vector<Latent> frames, FrameIndex start_index = 0)
      : frames_(std::move(frames)), start_index_(start_index) {
    if (frames_.empty()) return;
    const auto d = frames_.front().size();
    require(d >= 1, "latent dimension must be >= 1");
    for (const auto& f : frames_) {
      require(f.size() == d, "latent frames must share one dimension");
      require(f.allFinite(), "latent frames must be finite");
    }
  }

  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  Eigen::Index dim() const noexcept { return frames_.empty() ? 0 : frames_.front().size(); }
  FrameIndex start_index() const noexcept { return start_index_; }
  const Latent& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Latent>& frames() const noexcept { return frames_; }

  LatentSeq slice(std::size_t first, std::size_t count) const {
    require(first + count <= frames_.size(), "slice out of range");
    return LatentSeq({frames_.begin() + static_cast<std::ptrdiff_t>(first),
                      frames_.begin() + static_cast<std::ptrdiff_t>(first + count)},
                     start_index_ + static_cast<FrameIndex>(first));
  }

  friend bool operator==(const LatentSeq& a, const LatentSeq& b) {
    if (a.start_index_ != b.start_index_ || a.frames_.size() != b.frames_.size()) return false;
    for (std::size_t i = 0; i < a.frames_.size(); ++i)
      if (a.frames_[i].size() != b.frames_[i].size() || a.frames_[i] != b.frames_[i])
        return false;
    return true;
  }

 private:
  std::vector<Latent> frames_;
  FrameIndex start_index_ = 0;
};

// Keyframe latents keyed by frame index.
using SparseLatents = std::map<FrameIndex, Latent>;

}  // namespace dcarl
