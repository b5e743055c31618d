#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "probewarp/camera.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/image_io.hpp"
#include "probewarp/pipeline.hpp"
#include "probewarp/synth.hpp"
#include "probewarp/transform_log.hpp"

namespace probewarp {

namespace detail {

// Input paths handed over on the command line are configuration; missing
// ones fail with exit code 1 before any processing starts.
inline void require_input(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("cannot open " + path);
}

struct CliOptions {
  // propagate / fit
  std::string frame_dir, depth_dir, ball_path, intrinsics_path, out_dir;
  std::string frame0, depth0, frame1, depth1, out_file;
  PipelineConfig pipeline;
  std::string anchor = "identity";

  // warp
  std::string log_path;

  // synth
  int frames = 49;
  int width = 320, height = 240;
  std::string scene = "plane";
  double plane_depth = 5.0;
  double sphere_radius = 1.5;
  double tx = 0.0, ty = 0.0, tz = 0.0;
  double rot_per_frame = 0.0;
  double axis_x = 0.0, axis_y = 0.0, axis_z = 1.0;
  double checker_cell = 0.5;
  std::uint64_t seed = 7;
  int ball_size = 128;
};

inline void add_pipeline_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--alpha", opt.pipeline.alpha, "Damping factor toward the anchor")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--damp-anchor", opt.anchor, "Damping anchor: identity|previous")
      ->check(CLI::IsMember({"identity", "previous"}));
  cmd->add_flag("--invert-motion", opt.pipeline.invert_motion,
                "Warp with the inverse of the estimated motion");
  cmd->add_option("--max-corners", opt.pipeline.max_corners, "Corner budget in the first frame")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ransac-iters", opt.pipeline.ransac.iters, "RANSAC iteration count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt.pipeline.ransac.seed, "RANSAC seed");
  cmd->add_option("--threshold-scale", opt.pipeline.ransac.threshold_scale,
                  "Inlier threshold as a fraction of median depth")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-angle", opt.pipeline.clamp.max_angle,
                  "Rotation clamp per frame, radians")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--trans-scale", opt.pipeline.clamp.trans_scale,
                  "Translation clamp as a fraction of mean depth")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", opt.pipeline.threads, "Worker threads")->check(CLI::PositiveNumber);
}

inline int run_propagate(CliOptions& opt) {
  opt.pipeline.damp_anchor = damp_anchor_from_string(opt.anchor);
  PropagatePaths paths;
  paths.frame_dir = opt.frame_dir;
  paths.depth_dir = opt.depth_dir;
  paths.ball_path = opt.ball_path;
  paths.intrinsics_path = opt.intrinsics_path;
  paths.out_dir = opt.out_dir;
  const RunReport report = propagate_files(paths, opt.pipeline);

  std::int64_t fallbacks = 0;
  double inliers = 0.0;
  for (const TransformLog& f : report.frames) {
    if (f.fallback_used) ++fallbacks;
    inliers += f.inlier_count;
  }
  const double n = report.frames.empty() ? 1.0 : double(report.frames.size());
  std::cout << "propagated " << report.frames.size() + 1 << " frames to " << opt.out_dir
            << " (fallbacks " << fallbacks << ", mean inliers " << inliers / n << ")\n";
  return 0;
}

inline int run_fit(CliOptions& opt) {
  opt.pipeline.damp_anchor = damp_anchor_from_string(opt.anchor);
  for (const std::string& p : {opt.frame0, opt.depth0, opt.frame1, opt.depth1}) require_input(p);
  if (!opt.intrinsics_path.empty()) require_input(opt.intrinsics_path);
  const FrameImage f0 = read_frame(opt.frame0);
  const DepthMap d0 = read_depth(opt.depth0);
  const FrameImage f1 = read_frame(opt.frame1);
  const DepthMap d1 = read_depth(opt.depth1);
  const Intrinsics K = opt.intrinsics_path.empty() ? default_intrinsics(f0.width, f0.height)
                                                   : load_intrinsics(opt.intrinsics_path);

  RunReport report;
  report.meta.frame_width = f0.width;
  report.meta.frame_height = f0.height;
  report.meta.intrinsics = K;
  report.meta.alpha = opt.pipeline.alpha;
  report.meta.damp_anchor = to_string(opt.pipeline.damp_anchor);
  report.meta.invert_motion = opt.pipeline.invert_motion;
  report.meta.seed = opt.pipeline.ransac.seed;
  report.frames.push_back(fit_pair(f0, d0, f1, d1, K, opt.pipeline));
  save_report(report, opt.out_file);

  const TransformLog& log = report.frames.back();
  std::cout << "fit: inliers " << log.inlier_count << "/" << log.alive_count
            << (log.fallback_used ? " (fallback)" : "") << ", log written to " << opt.out_file
            << "\n";
  return 0;
}

inline int run_warp(CliOptions& opt) {
  require_input(opt.log_path);
  require_input(opt.ball_path);
  const RunReport report = load_report(opt.log_path);
  const FrameImage ball = read_frame(opt.ball_path);
  warp_from_report(report, ball, opt.out_dir, opt.pipeline.threads);
  std::cout << "warped " << report.frames.size() + 1 << " ball images to " << opt.out_dir << "\n";
  return 0;
}

inline int run_synth(CliOptions& opt) {
  namespace fs = std::filesystem;
  SceneSpec scene;
  if (opt.scene == "plane") {
    scene.geometry = PlaneScene{opt.plane_depth};
  } else {
    scene.geometry = SphereScene{{0.0, 0.0, opt.plane_depth}, opt.sphere_radius};
  }
  scene.texture.checker_cell = opt.checker_cell;
  scene.texture.seed = opt.seed;

  const Intrinsics K = default_intrinsics(opt.width, opt.height);
  const MotionScript script = constant_velocity_script(
      opt.frames, {opt.tx, opt.ty, opt.tz}, {opt.axis_x, opt.axis_y, opt.axis_z},
      opt.rot_per_frame);

  const fs::path out(opt.out_dir);
  fs::create_directories(out / "frames");
  fs::create_directories(out / "depth");

  RunReport gt;
  gt.meta.frame_width = opt.width;
  gt.meta.frame_height = opt.height;
  gt.meta.ball_width = opt.ball_size;
  gt.meta.ball_height = opt.ball_size;
  gt.meta.intrinsics = K;
  gt.meta.alpha = 1.0;  // ground truth: final == raw
  gt.meta.damp_anchor = "identity";
  gt.meta.invert_motion = false;
  gt.meta.seed = opt.seed;

  for (int t = 0; t < opt.frames; ++t) {
    const RenderedFrame frame =
        render_frame(scene, script.transforms[std::size_t(t)], K, opt.width, opt.height);
    write_frame((out / "frames" / sequence_name("frame", t, "png")).string(), frame.image);
    write_depth((out / "depth" / sequence_name("depth", t, "pfm")).string(), frame.depth);

    TransformLog log;
    log.frame_index = t;
    log.R_raw = log.R_final = script.transforms[std::size_t(t)].R;
    log.t_raw = log.t_final = script.transforms[std::size_t(t)].t;
    log.d_avg = mean_depth(frame.depth);
    gt.frames.push_back(log);
  }

  save_intrinsics((out / "intrinsics.txt").string(), K);
  write_frame((out / "ball.png").string(), make_test_ball(opt.ball_size, opt.seed));
  save_report(gt, (out / "gt_transforms.json").string());
  std::cout << "rendered " << opt.frames << " frames to " << opt.out_dir << "\n";
  return 0;
}

}  // namespace detail

// Entry point shared by the binary and the tests. `args` excludes the
// program name. Returns the process exit code: 0 success, 1 usage or
// configuration error, 2 runtime failure.
inline int cli_main(std::vector<std::string> args) {
  CLI::App app{"Propagates a first-frame lighting probe through a video by estimating\n"
               "rigid camera motion from tracked features and depth maps."};
  app.require_subcommand(1);
  detail::CliOptions opt;

  CLI::App* prop = app.add_subcommand(
      "propagate", "Estimate per-frame motion and warp the reference ball through a sequence");
  prop->add_option("--frames", opt.frame_dir, "Directory of frame_%05d.png images")->required();
  prop->add_option("--depth", opt.depth_dir, "Directory of depth_%05d.pfm maps")->required();
  prop->add_option("--ball", opt.ball_path, "Reference ball image (PNG)")->required();
  prop->add_option("--intrinsics", opt.intrinsics_path,
                   "Intrinsics file (default: derived from frame size)");
  prop->add_option("--out", opt.out_dir, "Output directory")->required();
  detail::add_pipeline_options(prop, opt);

  CLI::App* fit = app.add_subcommand("fit", "Estimate rigid motion between two frames");
  fit->add_option("--frame0", opt.frame0, "Reference frame (PNG)")->required();
  fit->add_option("--depth0", opt.depth0, "Reference depth (PFM)")->required();
  fit->add_option("--frame1", opt.frame1, "Target frame (PNG)")->required();
  fit->add_option("--depth1", opt.depth1, "Target depth (PFM)")->required();
  fit->add_option("--intrinsics", opt.intrinsics_path,
                  "Intrinsics file (default: derived from frame size)");
  fit->add_option("--out", opt.out_file, "Output transform log (JSON)")->required();
  detail::add_pipeline_options(fit, opt);

  CLI::App* warp = app.add_subcommand("warp", "Re-apply a transform log to a ball image");
  warp->add_option("--log", opt.log_path, "Transform log (JSON)")->required();
  warp->add_option("--ball", opt.ball_path, "Ball image (PNG)")->required();
  warp->add_option("--out", opt.out_dir, "Output directory")->required();
  warp->add_option("--threads", opt.pipeline.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* synth = app.add_subcommand("synth", "Render a synthetic sequence with ground truth");
  synth->add_option("--out", opt.out_dir, "Output directory")->required();
  synth->add_option("--frames", opt.frames, "Frame count")->check(CLI::PositiveNumber);
  synth->add_option("--width", opt.width, "Frame width")->check(CLI::PositiveNumber);
  synth->add_option("--height", opt.height, "Frame height")->check(CLI::PositiveNumber);
  synth->add_option("--scene", opt.scene, "Scene geometry: plane|sphere")
      ->check(CLI::IsMember({"plane", "sphere"}));
  synth->add_option("--scene-depth", opt.plane_depth, "Plane depth / sphere centre distance")
      ->check(CLI::PositiveNumber);
  synth->add_option("--sphere-radius", opt.sphere_radius, "Sphere radius")
      ->check(CLI::PositiveNumber);
  synth->add_option("--tx", opt.tx, "Camera-space translation per frame, x");
  synth->add_option("--ty", opt.ty, "Camera-space translation per frame, y");
  synth->add_option("--tz", opt.tz, "Camera-space translation per frame, z");
  synth->add_option("--rot", opt.rot_per_frame, "Rotation per frame, radians");
  synth->add_option("--axis-x", opt.axis_x, "Rotation axis x");
  synth->add_option("--axis-y", opt.axis_y, "Rotation axis y");
  synth->add_option("--axis-z", opt.axis_z, "Rotation axis z");
  synth->add_option("--checker", opt.checker_cell, "Checker cell size, world units")
      ->check(CLI::PositiveNumber);
  synth->add_option("--texture-seed", opt.seed, "Texture seed");
  synth->add_option("--ball-size", opt.ball_size, "Synthetic ball image size")
      ->check(CLI::PositiveNumber);

  args.insert(args.begin(), "probewarp");
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, returns 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the error and usage hint
    return 1;
  }

  try {
    if (prop->parsed()) return detail::run_propagate(opt);
    if (fit->parsed()) return detail::run_fit(opt);
    if (warp->parsed()) return detail::run_warp(opt);
    if (synth->parsed()) return detail::run_synth(opt);
    return 1;  // unreachable: a subcommand is required
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace probewarp
