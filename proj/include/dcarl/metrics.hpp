#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "dcarl/error.hpp"
#include "dcarl/image.hpp"
#include "dcarl/latent.hpp"
#include "dcarl/pose.hpp"
#include "dcarl/trajectory.hpp"

namespace dcarl::metrics {

// ---------------------------------------------------------------------------
// Pose densification

// Pose at fractional frame t: SLERP on rotation, lerp on translation between
// the bracketing sparse poses. Exact pass-through at sparse indices.
inline Pose interpolate_pose(const Trajectory& sparse, double t) {
  require(t >= static_cast<double>(sparse.first_index()) &&
              t <= static_cast<double>(sparse.last_index()),
          "interpolate_pose: query outside the sparse span");
  std::size_t hi = 0;
  while (hi < sparse.size() && static_cast<double>(sparse.index(hi)) < t) ++hi;
  if (hi < sparse.size() && static_cast<double>(sparse.index(hi)) == t) return sparse[hi];
  const std::size_t lo = hi - 1;
  const double t0 = static_cast<double>(sparse.index(lo));
  const double t1 = static_cast<double>(sparse.index(hi));
  const double u = (t - t0) / (t1 - t0);
  return Pose(slerp(sparse[lo].rotation, sparse[hi].rotation, u),
              (1.0 - u) * sparse[lo].translation + u * sparse[hi].translation);
}

inline Trajectory densify_trajectory(const Trajectory& sparse,
                                     std::span<const FrameIndex> targets) {
  require(sparse.size() >= 2, "densify_trajectory: need at least two sparse poses");
  require(!targets.empty(), "densify_trajectory: no target indices");
  std::vector<Pose> out;
  out.reserve(targets.size());
  for (auto t : targets) {
    require(t >= sparse.first_index() && t <= sparse.last_index(),
            "densify_trajectory: target " + std::to_string(t) + " outside sparse span");
    Pose p = interpolate_pose(sparse, static_cast<double>(t));
    p.frame_index = t;
    out.push_back(std::move(p));
  }
  return Trajectory(std::move(out));
}

// ---------------------------------------------------------------------------
// Alignment

struct AlignmentResult {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double rmse = 0.0;
  bool degenerate = false;  // rotation not unique (points collinear or coincident)

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return scale * rotation * p + translation; }
};

// Least-squares similarity (Umeyama) mapping est positions onto ref positions:
// argmin sum |s R p_i + t - q_i|^2. with_scale = false pins s = 1 (SE(3)).
inline AlignmentResult align_similarity(std::span<const Eigen::Vector3d> est,
                                        std::span<const Eigen::Vector3d> ref,
                                        bool with_scale = true) {
  require(est.size() == ref.size(), "align_similarity: length mismatch");
  require(est.size() >= 3, "align_similarity: need at least 3 poses");
  const double n = static_cast<double>(est.size());
  Eigen::Vector3d mu_p = Eigen::Vector3d::Zero(), mu_q = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < est.size(); ++i) {
    mu_p += est[i];
    mu_q += ref[i];
  }
  mu_p /= n;
  mu_q /= n;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_p = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    cov += (ref[i] - mu_q) * (est[i] - mu_p).transpose();
    var_p += (est[i] - mu_p).squaredNorm();
  }
  cov /= n;
  var_p /= n;

  AlignmentResult r;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  r.degenerate = !(sv(1) > 1e-12 * std::max(1.0, sv(0)));
  // identical point sets: the identity is the exact optimum, skip SVD round-off
  if (std::equal(est.begin(), est.end(), ref.begin())) {
    r.degenerate = r.degenerate || !(var_p > 0.0);
    return r;
  }
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) S(2, 2) = -1.0;
  if (var_p > 0.0) {
    r.rotation = svd.matrixU() * S * svd.matrixV().transpose();
    if (with_scale) r.scale = (sv.asDiagonal() * S).trace() / var_p;
  } else {
    r.degenerate = true;
  }
  r.translation = mu_q - r.scale * r.rotation * mu_p;
  double sq = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) sq += (r.apply(est[i]) - ref[i]).squaredNorm();
  r.rmse = std::sqrt(sq / n);
  return r;
}

inline AlignmentResult align_similarity(const Trajectory& est, const Trajectory& ref,
                                        bool with_scale = true) {
  require(est.size() == ref.size(), "align_similarity: length mismatch");
  const auto p = est.positions();
  const auto q = ref.positions();
  return align_similarity(p, q, with_scale);
}

// RMSE of aligned positions.
inline double ate(const Trajectory& est, const Trajectory& ref, bool with_scale = true) {
  return align_similarity(est, ref, with_scale).rmse;
}

enum class RotationAlignment {
  translation,  // apply the rotation of the position fit to orientations
  orientation,  // fit a separate world rotation on orientations (chordal L2)
  raw,          // no alignment
};

inline Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) S(2, 2) = -1.0;
  return svd.matrixU() * S * svd.matrixV().transpose();
}

// Mean geodesic angle in degrees between aligned est orientations and ref.
inline double are(const Trajectory& est, const Trajectory& ref,
                  RotationAlignment mode = RotationAlignment::translation,
                  bool with_scale = true) {
  require(est.size() == ref.size(), "are: length mismatch");
  Eigen::Matrix3d world = Eigen::Matrix3d::Identity();
  if (mode == RotationAlignment::translation) {
    world = align_similarity(est, ref, with_scale).rotation;
  } else if (mode == RotationAlignment::orientation) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < est.size(); ++i)
      m += ref[i].rotation_matrix() * est[i].rotation_matrix().transpose();
    world = project_to_so3(m);
  }
  const Eigen::Quaterniond qw(world);
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i)
    sum += rotation_angle(qw * est[i].rotation, ref[i].rotation);
  return sum / static_cast<double>(est.size()) * 180.0 / std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Image metrics

inline double mse(const Image& a, const Image& b) {
  require(a.same_shape(b), "image shape mismatch");
  require(a.size() > 0, "empty image");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

// +infinity when the images are identical.
inline double psnr(const Image& a, const Image& b, double max_value = 255.0) {
  require(max_value > 0.0, "psnr: max_value must be > 0");
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / m);
}

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double max_value = 255.0;
};

// Mean SSIM over all valid window positions of a normalized Gaussian window.
inline double ssim(const Image& a, const Image& b, const SsimParams& p = {}) {
  require(a.same_shape(b), "ssim: image shape mismatch");
  require(p.window >= 1 && p.sigma > 0.0, "ssim: bad window");
  const auto w = static_cast<std::size_t>(p.window);
  require(a.rows() >= w && a.cols() >= w, "ssim: image smaller than the window");
  std::vector<double> g(w * w);
  const double c = (static_cast<double>(w) - 1.0) / 2.0;
  double gs = 0.0;
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      const double di = static_cast<double>(i) - c, dj = static_cast<double>(j) - c;
      g[i * w + j] = std::exp(-(di * di + dj * dj) / (2.0 * p.sigma * p.sigma));
      gs += g[i * w + j];
    }
  for (auto& v : g) v /= gs;

  const double c1 = (p.k1 * p.max_value) * (p.k1 * p.max_value);
  const double c2 = (p.k2 * p.max_value) * (p.k2 * p.max_value);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r + w <= a.rows(); ++r)
    for (std::size_t q = 0; q + w <= a.cols(); ++q) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const double k = g[i * w + j];
          const double x = a(r + i, q + j), y = b(r + i, q + j);
          ma += k * x;
          mb += k * y;
          saa += k * x * x;
          sbb += k * y * y;
          sab += k * x * y;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Smoothness: mean squared second difference (lower is smoother). A
// non-learned stand-in for motion-smoothness scores.

template <typename Vec>
double smoothness(std::span<const Vec> seq) {
  require(seq.size() >= 3, "smoothness: need at least 3 frames");
  double s = 0.0;
  for (std::size_t t = 1; t + 1 < seq.size(); ++t) {
    if constexpr (std::is_arithmetic_v<Vec>) {
      const double d = seq[t + 1] - 2.0 * seq[t] + seq[t - 1];
      s += d * d;
    } else {
      s += (seq[t + 1] - 2.0 * seq[t] + seq[t - 1]).squaredNorm();
    }
  }
  return s / static_cast<double>(seq.size() - 2);
}

inline double smoothness(const LatentSeq& seq) {
  return smoothness(std::span<const Latent>(seq.frames()));
}

inline double smoothness(const Trajectory& traj) {
  const auto p = traj.positions();
  return smoothness(std::span<const Eigen::Vector3d>(p));
}

}  // namespace dcarl::metrics
