#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cstdint>
#include <vector>

#include "probewarp/camera.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/rigid.hpp"
#include "probewarp/rng.hpp"

namespace probewarp {

// Least-squares proper rotation + translation aligning src onto dst:
// minimizes sum_i |R src_i + t - dst_i|^2 subject to R^T R = I, det R = +1.
// Centroids c0/ct, cross-covariance H = sum (src-c0)(dst-ct)^T, SVD H = U S V^T,
// R = V diag(1, 1, det(V U^T)) U^T, t = ct - R c0.
inline RigidTransform kabsch(const std::vector<Point3>& src, const std::vector<Point3>& dst) {
  if (src.size() != dst.size()) throw ArgumentError("kabsch: point lists differ in length");
  const std::size_t n = src.size();
  if (n < 3) throw InsufficientDataError("kabsch: need at least 3 point pairs");

  Eigen::Vector3d c0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d ct = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    c0 += src[i];
    ct += dst[i];
  }
  c0 /= double(n);
  ct /= double(n);

  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) H += (src[i] - c0) * (dst[i] - ct).transpose();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  if (!(sigma(0) > 0.0) || sigma(1) <= sigma(0) * 1e-9)
    throw DegenerateError("kabsch: point configuration is collinear");

  const double sign =
      (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform out;
  out.R = svd.matrixV() * Eigen::Vector3d(1.0, 1.0, sign).asDiagonal() *
          svd.matrixU().transpose();
  out.t = ct - out.R * c0;
  return out;
}

struct RansacResult {
  RigidTransform transform;
  std::vector<bool> inliers;
  int inlier_count = 0;
};

// Consensus fit of a rigid motion over point pairs. Each iteration samples 3
// pairs, fits kabsch, and counts pairs with |R src + t - dst| <= threshold;
// the largest consensus wins and is refit on all of its inliers. Iteration i
// draws from a stream derived from (seed, i), so results are reproducible for
// a fixed seed regardless of execution order.
inline RansacResult ransac_rigid(const std::vector<Point3>& src, const std::vector<Point3>& dst,
                                 double threshold, int iters = 200, std::uint64_t seed = 0) {
  if (src.size() != dst.size()) throw ArgumentError("ransac_rigid: point lists differ in length");
  const std::size_t n = src.size();
  if (n < 3) throw InsufficientDataError("ransac_rigid: need at least 3 point pairs");
  if (!(threshold > 0.0)) throw ArgumentError("ransac_rigid: threshold must be > 0");
  if (iters < 1) throw ArgumentError("ransac_rigid: iters must be >= 1");

  int best_count = 0;
  std::vector<bool> best_mask;
  RigidTransform best_hyp;
  std::vector<Point3> sample_src(3), sample_dst(3);

  for (int it = 0; it < iters; ++it) {
    SplitMix64 rng(hash_mix(seed, std::uint64_t(it)));
    std::uint32_t idx[3];
    idx[0] = rng.next_below(std::uint32_t(n));
    do {
      idx[1] = rng.next_below(std::uint32_t(n));
    } while (idx[1] == idx[0]);
    do {
      idx[2] = rng.next_below(std::uint32_t(n));
    } while (idx[2] == idx[0] || idx[2] == idx[1]);

    for (int k = 0; k < 3; ++k) {
      sample_src[std::size_t(k)] = src[idx[k]];
      sample_dst[std::size_t(k)] = dst[idx[k]];
    }

    RigidTransform hyp;
    try {
      hyp = kabsch(sample_src, sample_dst);
    } catch (const DegenerateError&) {
      continue;
    }

    int count = 0;
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if ((hyp.apply(src[i]) - dst[i]).norm() <= threshold) {
        mask[i] = true;
        ++count;
      }
    }
    if (count > best_count) {
      best_count = count;
      best_mask = std::move(mask);
      best_hyp = hyp;
    }
  }

  if (best_count < 3) throw NoConsensusError("ransac_rigid: no model with >= 3 inliers");

  std::vector<Point3> in_src, in_dst;
  in_src.reserve(std::size_t(best_count));
  in_dst.reserve(std::size_t(best_count));
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask[i]) {
      in_src.push_back(src[i]);
      in_dst.push_back(dst[i]);
    }
  }

  RansacResult out;
  out.inliers = std::move(best_mask);
  out.inlier_count = best_count;
  try {
    out.transform = kabsch(in_src, in_dst);
  } catch (const DegenerateError&) {
    // The consensus set can only degenerate if it barely exceeds the sample;
    // the minimal-sample fit is still a valid model for it.
    out.transform = best_hyp;
  }
  return out;
}

}  // namespace probewarp
