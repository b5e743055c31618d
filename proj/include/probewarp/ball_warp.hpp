#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "probewarp/camera.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/image.hpp"
#include "probewarp/parallel.hpp"
#include "probewarp/rigid.hpp"

namespace probewarp {

struct WarpConfig {
  int frame_width = 0;
  int frame_height = 0;
  bool invert_motion = false;
  int threads = 1;
};

struct WarpStats {
  std::int64_t behind_camera_count = 0;
  double clamped_fraction = 0.0;
};

struct WarpResult {
  FrameImage image;
  WarpStats stats;
};

// Mean over the finite, positive depth samples. Kahan-compensated so the
// result does not drift with pixel count; callers compare means across
// frames at tight tolerances.
inline double mean_depth(const DepthMap& depth) {
  double sum = 0.0, comp = 0.0;
  std::int64_t n = 0;
  for (float z : depth.data) {
    if (!std::isfinite(z) || z <= 0.0f) continue;
    const double y = double(z) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ++n;
  }
  if (n == 0) throw EmptyDepthError("mean_depth: no valid depth samples");
  return sum / double(n);
}

namespace detail {

// Snap a coordinate to the integer grid when it is within 1e-9 px of it.
// The warp chain scales into frame space and back; for the identity motion
// the round trip must land every pixel exactly on itself, and this absorbs
// the last-ulp rounding of that round trip without affecting real motion.
inline double snap_coord(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 ? r : x;
}

}  // namespace detail

// Ball-pixel coordinates scale into video-frame coordinates by the ratio of
// the two rasters; frame_to_ball is the exact inverse.
inline Eigen::Vector2d ball_to_frame(const Eigen::Vector2d& p_ball, int ball_w, int ball_h,
                                     const WarpConfig& cfg) {
  return {p_ball.x() * double(cfg.frame_width) / double(ball_w),
          p_ball.y() * double(cfg.frame_height) / double(ball_h)};
}

inline Eigen::Vector2d frame_to_ball(const Eigen::Vector2d& p_frame, int ball_w, int ball_h,
                                     const WarpConfig& cfg) {
  return {p_frame.x() * double(ball_w) / double(cfg.frame_width),
          p_frame.y() * double(ball_h) / double(cfg.frame_height)};
}

// Source coordinate in the reference ball for one destination pixel of the
// warped ball. Chain: ball px -> frame px, lift at d_avg, rigid motion,
// project, frame px -> ball px. Returns false when the moved point falls
// behind the camera.
inline bool warp_source_coord(double bu, double bv, int ball_w, int ball_h, const WarpConfig& cfg,
                              const Intrinsics& K, const RigidTransform& motion, double d_avg,
                              Eigen::Vector2d& out) {
  const Eigen::Vector2d pf = ball_to_frame({bu, bv}, ball_w, ball_h, cfg);
  const Point3 X = lift(pf, d_avg, K);
  const Point3 Y = motion.apply(X);
  if (Y.z() <= 0.0) return false;
  const Eigen::Vector2d pb = frame_to_ball(project(Y, K), ball_w, ball_h, cfg);
  out = {detail::snap_coord(pb.x()), detail::snap_coord(pb.y())};
  return true;
}

// Warp the reference ball image by the estimated camera motion, sampling at
// the frame's mean depth. Pixels whose ray lands behind the camera borrow
// the source coordinate of the nearest valid pixel (grid BFS) and are
// counted in the stats. Output samples are clamped to [0, 1] and the
// clamped fraction reported.
inline WarpResult warp_ball(const FrameImage& ball, const WarpConfig& cfg, const Intrinsics& K,
                            const RigidTransform& motion, double d_avg) {
  if (ball.width < 1 || ball.height < 1) throw ArgumentError("warp_ball: empty ball image");
  if (cfg.frame_width < 1 || cfg.frame_height < 1)
    throw ArgumentError("warp_ball: bad frame dimensions");
  if (!std::isfinite(d_avg) || d_avg <= 0.0) throw ArgumentError("warp_ball: bad mean depth");

  // The log stores the frame-0 -> frame-t camera transform; warping the
  // reference ball forward uses it directly, the inverse view is opt-in.
  const RigidTransform applied = cfg.invert_motion ? motion.inverse() : motion;

  const int w = ball.width, h = ball.height;
  const std::int64_t npix = std::int64_t(w) * h;
  std::vector<Eigen::Vector2d> src(static_cast<std::size_t>(npix));
  std::vector<std::uint8_t> valid(std::size_t(npix), 0);

  parallel_for(0, h, cfg.threads, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      valid[i] = warp_source_coord(x, y, w, h, cfg, K, applied, d_avg, src[i]) ? 1 : 0;
    }
  });

  WarpStats stats;
  for (std::uint8_t v : valid)
    if (!v) ++stats.behind_camera_count;

  if (stats.behind_camera_count == npix) {
    // Whole ball behind the camera: nothing to borrow from, fall back to
    // the identity mapping so the output is still well defined.
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) src[std::size_t(y) * w + x] = {double(x), double(y)};
  } else if (stats.behind_camera_count > 0) {
    // Multi-source BFS from all valid pixels; each invalid pixel copies the
    // source coordinate of its nearest (4-connected) valid neighbour.
    std::deque<std::int64_t> queue;
    for (std::int64_t i = 0; i < npix; ++i)
      if (valid[std::size_t(i)]) queue.push_back(i);
    while (!queue.empty()) {
      const std::int64_t i = queue.front();
      queue.pop_front();
      const int x = int(i % w), y = int(i / w);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        const std::int64_t j = std::int64_t(ny[k]) * w + nx[k];
        if (valid[std::size_t(j)]) continue;
        valid[std::size_t(j)] = 1;
        src[std::size_t(j)] = src[std::size_t(i)];
        queue.push_back(j);
      }
    }
  }

  WarpResult result;
  result.image.width = w;
  result.image.height = h;
  result.image.data.assign(std::size_t(npix) * 3, 0.0);
  std::vector<std::int64_t> clamped_per_row(std::size_t(h), 0);

  parallel_for(0, h, cfg.threads, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      const auto rgb = sample_bilinear(ball, src[i].x(), src[i].y());
      bool clamped = false;
      for (int c = 0; c < 3; ++c) {
        double v = rgb[std::size_t(c)];
        if (v < 0.0) {
          v = 0.0;
          clamped = true;
        } else if (v > 1.0) {
          v = 1.0;
          clamped = true;
        }
        result.image.data[i * 3 + std::size_t(c)] = v;
      }
      if (clamped) ++clamped_per_row[std::size_t(y)];
    }
  });

  std::int64_t clamped_total = 0;
  for (std::int64_t c : clamped_per_row) clamped_total += c;
  stats.clamped_fraction = double(clamped_total) / double(npix);
  result.stats = stats;
  return result;
}

}  // namespace probewarp
