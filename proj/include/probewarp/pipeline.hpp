#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "probewarp/ball_warp.hpp"
#include "probewarp/camera.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/features.hpp"
#include "probewarp/image.hpp"
#include "probewarp/image_io.hpp"
#include "probewarp/optical_flow.hpp"
#include "probewarp/registration.hpp"
#include "probewarp/rigid.hpp"
#include "probewarp/tracks.hpp"
#include "probewarp/transform_log.hpp"

namespace probewarp {

struct RansacConfig {
  double threshold_scale = 0.02;  // inlier threshold = scale * median scene depth
  int iters = 200;
  std::uint64_t seed = 0;
};

struct ClampConfig {
  double max_angle = 0.1;    // radians
  double trans_scale = 0.1;  // translation bound = scale * mean depth
};

enum class DampAnchor { identity, previous };

inline std::string to_string(DampAnchor a) {
  return a == DampAnchor::identity ? "identity" : "previous";
}

inline DampAnchor damp_anchor_from_string(const std::string& s) {
  if (s == "identity") return DampAnchor::identity;
  if (s == "previous") return DampAnchor::previous;
  throw ConfigError("unknown damp anchor '" + s + "' (expected identity|previous)");
}

struct PipelineConfig {
  double alpha = 0.05;
  DampAnchor damp_anchor = DampAnchor::identity;
  bool invert_motion = false;
  int max_corners = 200;
  double quality_level = 0.01;
  double min_distance = 10.0;
  int detect_window = 3;
  int lk_window = 21;
  int lk_max_iters = 30;
  double lk_eps = 0.01;
  double lk_min_eig = 1e-4;
  int pyramid_levels = 3;
  RansacConfig ransac;
  ClampConfig clamp;
  int threads = 1;
};

namespace detail {

// Median of a scratch vector (midpoint average for even counts). The copy is
// by value because nth_element reorders.
inline double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(mid), values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(mid) - 1,
                   values.begin() + std::ptrdiff_t(mid));
  return 0.5 * (values[mid - 1] + hi);
}

}  // namespace detail

// Streaming propagator: construct with the reference frame, then feed frames
// one at a time. Holds only the previous frame's pyramid plus the track set,
// so arbitrarily long sequences run in constant memory.
class Propagator {
 public:
  struct StepOutput {
    TransformLog log;
    FrameImage ball;
  };

  Propagator(const FrameImage& frame0, const DepthMap& depth0, FrameImage ball, Intrinsics K,
             PipelineConfig cfg = {})
      : cfg_(std::move(cfg)), K_(K), ball_(std::move(ball)) {
    FrameImage::check_dims(frame0.width, frame0.height);
    if (frame0.width != depth0.width || frame0.height != depth0.height)
      throw ConfigError("frame and depth dimensions disagree");
    if (ball_.width < 1 || ball_.height < 1) throw ConfigError("reference ball image is empty");
    frame_width_ = frame0.width;
    frame_height_ = frame0.height;

    const GrayImage gray = to_grayscale(frame0);
    const std::vector<Corner> corners = detect_corners(
        gray, cfg_.max_corners, cfg_.quality_level, cfg_.min_distance, cfg_.detect_window);
    tracks_ = make_track_set(corners, depth0);
    prev_pyr_ = build_pyramid(gray, cfg_.pyramid_levels);
    try {
      last_d_avg_ = mean_depth(depth0);
    } catch (const EmptyDepthError&) {
      // No valid reference depth at all: fall back to unit scale until a
      // frame with real depth arrives.
      last_d_avg_ = 1.0;
    }
  }

  const FrameImage& reference_ball() const { return ball_; }
  const TrackSet& tracks() const { return tracks_; }
  const RigidTransform& last_final() const { return prev_final_; }
  int frame_width() const { return frame_width_; }
  int frame_height() const { return frame_height_; }

  // Estimate motion into this frame, warp the reference ball, and return
  // both. Frames must arrive in order starting at index 1. With `strict`
  // set, a failed fit raises NoConsensusError instead of falling back to
  // the previous transform.
  StepOutput step(const FrameImage& frame, const DepthMap& depth, bool do_warp = true,
                  bool strict = false) {
    FrameImage::check_dims(frame.width, frame.height);
    if (frame.width != frame_width_ || frame.height != frame_height_)
      throw ConfigError("frame dimensions changed mid-sequence");
    if (depth.width != frame_width_ || depth.height != frame_height_)
      throw ConfigError("frame and depth dimensions disagree");
    ++frame_index_;

    const GrayImage gray = to_grayscale(frame);
    ImagePyramid pyr = build_pyramid(gray, cfg_.pyramid_levels);
    advance_tracks(tracks_, prev_pyr_, pyr, depth, cfg_.lk_window, cfg_.lk_max_iters, cfg_.lk_eps,
                   cfg_.lk_min_eig, cfg_.threads);
    prev_pyr_ = std::move(pyr);

    // Reference-anchored correspondences: every live track pairs its frozen
    // frame-0 lift with its current lift, so the fit is always frame 0 ->
    // frame t rather than a chain of incremental estimates.
    std::vector<Point3> src, dst;
    std::vector<double> depths;
    for (const Track& t : tracks_.tracks) {
      if (!t.alive) continue;
      const double z = double(depth_at_nearest(depth, t.cur_pos));
      src.push_back(lift(t.base_pos, t.base_depth, K_));
      dst.push_back(lift(t.cur_pos, z, K_));
      depths.push_back(t.base_depth);
      depths.push_back(z);
    }

    TransformLog log;
    log.frame_index = frame_index_;
    log.alive_count = int(src.size());

    RigidTransform raw = prev_final_;
    log.fallback_used = true;
    if (src.size() >= 3) {
      const double threshold = cfg_.ransac.threshold_scale * detail::median(depths);
      try {
        const RansacResult fit = ransac_rigid(src, dst, threshold, cfg_.ransac.iters,
                                              hash_mix(cfg_.ransac.seed, std::uint64_t(frame_index_)));
        raw = fit.transform;
        log.inlier_count = fit.inlier_count;
        log.fallback_used = false;
      } catch (const Error&) {
        // Degenerate geometry or no consensus: hold the previous estimate.
      }
    }
    if (strict && log.fallback_used)
      throw NoConsensusError("no consensus fit from " + std::to_string(src.size()) +
                             " usable pairs");
    log.R_raw = raw.R;
    log.t_raw = raw.t;

    // A frame whose depth map is all holes cannot define a mean depth; the
    // last valid one carries over so the warp (and clamp bound) stay defined.
    try {
      last_d_avg_ = mean_depth(depth);
    } catch (const EmptyDepthError&) {
    }
    const double d_avg = last_d_avg_;
    log.d_avg = d_avg;

    RigidTransform final_tf = raw;
    if (!log.fallback_used) {
      const RigidTransform anchor =
          cfg_.damp_anchor == DampAnchor::identity ? RigidTransform::identity() : prev_final_;
      final_tf = reorthogonalize(
          damp(Affine3x4::from_rigid(raw), cfg_.alpha, Affine3x4::from_rigid(anchor)));
      final_tf = clamp_motion(final_tf, cfg_.clamp.max_angle, cfg_.clamp.trans_scale * d_avg);
    }
    log.R_final = final_tf.R;
    log.t_final = final_tf.t;
    prev_final_ = final_tf;

    StepOutput out;
    if (do_warp) {
      WarpConfig wc;
      wc.frame_width = frame_width_;
      wc.frame_height = frame_height_;
      wc.invert_motion = cfg_.invert_motion;
      wc.threads = cfg_.threads;
      WarpResult warped = warp_ball(ball_, wc, K_, final_tf, d_avg);
      log.clamped_fraction = warped.stats.clamped_fraction;
      log.behind_camera_count = warped.stats.behind_camera_count;
      out.ball = std::move(warped.image);
    }
    out.log = log;
    return out;
  }

 private:
  PipelineConfig cfg_;
  Intrinsics K_;
  FrameImage ball_;
  ImagePyramid prev_pyr_;
  TrackSet tracks_;
  RigidTransform prev_final_ = RigidTransform::identity();
  double last_d_avg_ = 1.0;
  int frame_width_ = 0;
  int frame_height_ = 0;
  int frame_index_ = 0;
};

struct PropagateResult {
  RunReport report;
  std::vector<FrameImage> balls;  // one per input frame, [0] == reference
};

// In-memory propagation over a whole sequence. The file-based runner below
// streams instead; this form exists for callers that already hold frames.
inline PropagateResult propagate_frames(const std::vector<FrameImage>& frames,
                                        const std::vector<DepthMap>& depths,
                                        const FrameImage& ball, const Intrinsics& K,
                                        const PipelineConfig& cfg = {}) {
  if (frames.empty()) throw ConfigError("no frames to propagate");
  if (frames.size() != depths.size())
    throw ConfigError("frame and depth sequence lengths disagree");

  Propagator prop(frames[0], depths[0], ball, K, cfg);
  PropagateResult result;
  result.report.meta.frame_width = frames[0].width;
  result.report.meta.frame_height = frames[0].height;
  result.report.meta.ball_width = ball.width;
  result.report.meta.ball_height = ball.height;
  result.report.meta.intrinsics = K;
  result.report.meta.alpha = cfg.alpha;
  result.report.meta.damp_anchor = to_string(cfg.damp_anchor);
  result.report.meta.invert_motion = cfg.invert_motion;
  result.report.meta.seed = cfg.ransac.seed;

  result.balls.push_back(ball);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    Propagator::StepOutput out = prop.step(frames[t], depths[t]);
    result.report.frames.push_back(out.log);
    result.balls.push_back(std::move(out.ball));
  }
  return result;
}

// Single-pair motion estimate: detect in the first frame, track into the
// second, fit. Equivalent to one propagation step, except that a failed fit
// raises NoConsensusError — with a single pair there is no previous
// transform worth falling back to.
inline TransformLog fit_pair(const FrameImage& frame0, const DepthMap& depth0,
                             const FrameImage& frame1, const DepthMap& depth1, const Intrinsics& K,
                             const PipelineConfig& cfg = {}) {
  FrameImage dummy_ball;
  dummy_ball.width = 1;
  dummy_ball.height = 1;
  dummy_ball.data.assign(3, 0.0);
  Propagator prop(frame0, depth0, dummy_ball, K, cfg);
  return prop.step(frame1, depth1, /*do_warp=*/false, /*strict=*/true).log;
}

struct PropagatePaths {
  std::string frame_dir;
  std::string depth_dir;
  std::string ball_path;
  std::string intrinsics_path;  // empty -> defaults from frame size
  std::string out_dir;
};

// File-based propagation. All inputs are validated (existence, counts,
// matching dimensions across every frame and depth map) before anything is
// written, so a bad sequence fails fast instead of half-populating out_dir.
inline RunReport propagate_files(const PropagatePaths& paths, const PipelineConfig& cfg = {}) {
  namespace fs = std::filesystem;

  const std::vector<std::string> frame_paths = list_sequence(paths.frame_dir, "frame", "png");
  const std::vector<std::string> depth_paths = list_sequence(paths.depth_dir, "depth", "pfm");
  if (frame_paths.empty()) throw ConfigError("no frames found in " + paths.frame_dir);
  if (frame_paths.size() != depth_paths.size())
    throw ConfigError("frame count (" + std::to_string(frame_paths.size()) +
                      ") and depth count (" + std::to_string(depth_paths.size()) + ") disagree");

  const auto [fw, fh] = read_frame_dims(frame_paths[0]);
  for (const std::string& p : frame_paths) {
    const auto [w, h] = read_frame_dims(p);
    if (w != fw || h != fh) throw ConfigError("frame dimensions vary across sequence: " + p);
  }
  for (const std::string& p : depth_paths) {
    const auto [w, h] = read_depth_dims(p);
    if (w != fw || h != fh) throw ConfigError("depth dimensions do not match frames: " + p);
  }
  if (!fs::exists(paths.ball_path)) throw ConfigError("cannot open " + paths.ball_path);
  if (!paths.intrinsics_path.empty() && !fs::exists(paths.intrinsics_path))
    throw ConfigError("cannot open " + paths.intrinsics_path);

  Intrinsics K = paths.intrinsics_path.empty() ? default_intrinsics(fw, fh)
                                               : load_intrinsics(paths.intrinsics_path);

  fs::create_directories(paths.out_dir);
  const FrameImage ball = read_frame(paths.ball_path);
  FrameImage frame0 = read_frame(frame_paths[0]);
  DepthMap depth0 = read_depth(depth_paths[0]);

  Propagator prop(frame0, depth0, ball, K, cfg);
  RunReport report;
  report.meta.frame_width = fw;
  report.meta.frame_height = fh;
  report.meta.ball_width = ball.width;
  report.meta.ball_height = ball.height;
  report.meta.intrinsics = K;
  report.meta.alpha = cfg.alpha;
  report.meta.damp_anchor = to_string(cfg.damp_anchor);
  report.meta.invert_motion = cfg.invert_motion;
  report.meta.seed = cfg.ransac.seed;

  const fs::path out_dir(paths.out_dir);
  write_frame((out_dir / sequence_name("ball", 0, "png")).string(), ball);
  for (std::size_t t = 1; t < frame_paths.size(); ++t) {
    const FrameImage frame = read_frame(frame_paths[t]);
    const DepthMap depth = read_depth(depth_paths[t]);
    Propagator::StepOutput out = prop.step(frame, depth);
    write_frame((out_dir / sequence_name("ball", int(t), "png")).string(), out.ball);
    report.frames.push_back(out.log);
  }

  save_report(report, (out_dir / "transforms.json").string());
  return report;
}

// Re-apply logged transforms to a (possibly different) ball image. The log
// is the single source of truth: dimensions, intrinsics, mean depths, and
// the invert flag all come from it.
inline void warp_from_report(const RunReport& report, const FrameImage& ball,
                             const std::string& out_dir, int threads = 1) {
  namespace fs = std::filesystem;
  if (ball.width < 1 || ball.height < 1) throw ConfigError("ball image is empty");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  WarpConfig wc;
  wc.frame_width = report.meta.frame_width;
  wc.frame_height = report.meta.frame_height;
  wc.invert_motion = report.meta.invert_motion;
  wc.threads = threads;
  if (wc.frame_width < 1 || wc.frame_height < 1)
    throw ConfigError("transform log is missing frame dimensions");

  write_frame((dir / sequence_name("ball", 0, "png")).string(), ball);
  for (const TransformLog& f : report.frames) {
    RigidTransform tf;
    tf.R = f.R_final;
    tf.t = f.t_final;
    const WarpResult out = warp_ball(ball, wc, report.meta.intrinsics, tf, f.d_avg);
    write_frame((dir / sequence_name("ball", f.frame_index, "png")).string(), out.image);
  }
}

}  // namespace probewarp
