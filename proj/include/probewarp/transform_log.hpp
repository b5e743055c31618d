#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "probewarp/camera.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/rigid.hpp"

namespace probewarp {

// Per-frame record of the motion estimate. `raw` is the RANSAC fit before
// damping/re-orthogonalisation/clamping; `final` is what the warp used.
struct TransformLog {
  int frame_index = 0;
  Eigen::Matrix3d R_raw = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t_raw = Eigen::Vector3d::Zero();
  Eigen::Matrix3d R_final = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t_final = Eigen::Vector3d::Zero();
  int inlier_count = 0;
  int alive_count = 0;
  bool fallback_used = false;
  double clamped_fraction = 0.0;
  double d_avg = 0.0;
  std::int64_t behind_camera_count = 0;
};

struct RunMeta {
  int frame_width = 0;
  int frame_height = 0;
  int ball_width = 0;
  int ball_height = 0;
  Intrinsics intrinsics;
  double alpha = 0.05;
  std::string damp_anchor = "identity";
  bool invert_motion = false;
  std::uint64_t seed = 0;
};

struct RunReport {
  RunMeta meta;
  std::vector<TransformLog> frames;
};

namespace detail {

using json = nlohmann::ordered_json;

inline json matrix_to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    json row = json::array();
    for (int c = 0; c < 3; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Eigen::Matrix3d matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("transform log: bad 3x3 matrix");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const json& row = j[std::size_t(r)];
    if (!row.is_array() || row.size() != 3) throw FormatError("transform log: bad 3x3 matrix");
    for (int c = 0; c < 3; ++c) m(r, c) = row[std::size_t(c)].get<double>();
  }
  return m;
}

inline Eigen::Vector3d vector_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("transform log: bad 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const RunReport& report) {
  using detail::json;
  json meta;
  meta["frame_width"] = report.meta.frame_width;
  meta["frame_height"] = report.meta.frame_height;
  meta["ball_width"] = report.meta.ball_width;
  meta["ball_height"] = report.meta.ball_height;
  meta["intrinsics"] = {{"fx", report.meta.intrinsics.fx},
                        {"fy", report.meta.intrinsics.fy},
                        {"cx", report.meta.intrinsics.cx},
                        {"cy", report.meta.intrinsics.cy}};
  meta["alpha"] = report.meta.alpha;
  meta["damp_anchor"] = report.meta.damp_anchor;
  meta["invert_motion"] = report.meta.invert_motion;
  meta["seed"] = report.meta.seed;

  json frames = json::array();
  std::int64_t fallbacks = 0;
  double inlier_sum = 0.0, clamp_sum = 0.0;
  std::int64_t behind_sum = 0;
  for (const TransformLog& f : report.frames) {
    json jf;
    jf["frame_index"] = f.frame_index;
    jf["R_raw"] = detail::matrix_to_json(f.R_raw);
    jf["t_raw"] = detail::vector_to_json(f.t_raw);
    jf["R_final"] = detail::matrix_to_json(f.R_final);
    jf["t_final"] = detail::vector_to_json(f.t_final);
    jf["inlier_count"] = f.inlier_count;
    jf["alive_count"] = f.alive_count;
    jf["fallback_used"] = f.fallback_used;
    jf["clamped_fraction"] = f.clamped_fraction;
    jf["d_avg"] = f.d_avg;
    jf["behind_camera_count"] = f.behind_camera_count;
    frames.push_back(jf);
    if (f.fallback_used) ++fallbacks;
    inlier_sum += f.inlier_count;
    clamp_sum += f.clamped_fraction;
    behind_sum += f.behind_camera_count;
  }

  const double n = report.frames.empty() ? 1.0 : double(report.frames.size());
  json totals;
  totals["frames_processed"] = report.frames.size();
  totals["fallbacks_used"] = fallbacks;
  totals["mean_inliers"] = inlier_sum / n;
  totals["mean_clamped_fraction"] = clamp_sum / n;
  totals["behind_camera_pixels"] = behind_sum;

  json root;
  root["meta"] = meta;
  root["frames"] = frames;
  root["totals"] = totals;
  return root;
}

inline RunReport report_from_json(const nlohmann::ordered_json& root) {
  using detail::json;
  RunReport report;
  try {
    const json& meta = root.at("meta");
    report.meta.frame_width = meta.at("frame_width").get<int>();
    report.meta.frame_height = meta.at("frame_height").get<int>();
    report.meta.ball_width = meta.at("ball_width").get<int>();
    report.meta.ball_height = meta.at("ball_height").get<int>();
    const json& K = meta.at("intrinsics");
    report.meta.intrinsics = {K.at("fx").get<double>(), K.at("fy").get<double>(),
                              K.at("cx").get<double>(), K.at("cy").get<double>()};
    report.meta.alpha = meta.at("alpha").get<double>();
    report.meta.damp_anchor = meta.at("damp_anchor").get<std::string>();
    report.meta.invert_motion = meta.at("invert_motion").get<bool>();
    report.meta.seed = meta.at("seed").get<std::uint64_t>();

    for (const json& jf : root.at("frames")) {
      TransformLog f;
      f.frame_index = jf.at("frame_index").get<int>();
      f.R_raw = detail::matrix_from_json(jf.at("R_raw"));
      f.t_raw = detail::vector_from_json(jf.at("t_raw"));
      f.R_final = detail::matrix_from_json(jf.at("R_final"));
      f.t_final = detail::vector_from_json(jf.at("t_final"));
      f.inlier_count = jf.at("inlier_count").get<int>();
      f.alive_count = jf.at("alive_count").get<int>();
      f.fallback_used = jf.at("fallback_used").get<bool>();
      f.clamped_fraction = jf.at("clamped_fraction").get<double>();
      f.d_avg = jf.at("d_avg").get<double>();
      f.behind_camera_count = jf.at("behind_camera_count").get<std::int64_t>();
      report.frames.push_back(f);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("transform log: ") + e.what());
  }
  return report;
}

inline void save_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << report_to_json(report).dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

inline RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::ordered_json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("transform log: ") + e.what());
  }
  return report_from_json(root);
}

}  // namespace probewarp
