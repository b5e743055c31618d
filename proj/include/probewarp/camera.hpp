#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "probewarp/errors.hpp"

namespace probewarp {

using Point3 = Eigen::Vector3d;  // camera-frame 3D point, scene units

// Pinhole camera parameters, pixels.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

// Mid-range field of view used when no intrinsics file is given.
inline Intrinsics default_intrinsics(int width, int height) {
  const double f = 0.9 * std::max(width, height);
  return {f, f, width / 2.0, height / 2.0};
}

// Back-project pixel p with depth z: X = z * K^-1 [u, v, 1]^T.
inline Point3 lift(const Eigen::Vector2d& p, double z, const Intrinsics& K) {
  if (!std::isfinite(z) || z <= 0.0) throw ArgumentError("lift: depth must be finite and > 0");
  return {z * (p.x() - K.cx) / K.fx, z * (p.y() - K.cy) / K.fy, z};
}

// Perspective projection [u, v, 1]^T ∝ K X.
inline Eigen::Vector2d project(const Point3& X, const Intrinsics& K) {
  if (!(X.z() > 0.0)) throw BehindCameraError("project: point is behind the camera");
  return {K.fx * X.x() / X.z() + K.cx, K.fy * X.y() / X.z() + K.cy};
}

// Key-value text document with fields fx, fy, cx, cy. Accepts "key value",
// "key = value", or "key: value" lines; '#' starts a comment.
inline Intrinsics load_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Intrinsics K;
  bool have[4] = {false, false, false, false};
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == '=' || c == ':') c = ' ';
    std::istringstream ls(line);
    std::string key;
    double value = 0.0;
    if (!(ls >> key >> value)) continue;
    if (key == "fx") K.fx = value, have[0] = true;
    else if (key == "fy") K.fy = value, have[1] = true;
    else if (key == "cx") K.cx = value, have[2] = true;
    else if (key == "cy") K.cy = value, have[3] = true;
  }
  if (!(have[0] && have[1] && have[2] && have[3]))
    throw FormatError(path + ": intrinsics file must define fx, fy, cx, cy");
  if (!(K.fx > 0.0) || !(K.fy > 0.0))
    throw FormatError(path + ": focal lengths must be positive");
  return K;
}

inline void save_intrinsics(const std::string& path, const Intrinsics& K) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "fx %.17g\nfy %.17g\ncx %.17g\ncy %.17g\n", K.fx, K.fy, K.cx,
                K.cy);
  out << buf;
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace probewarp
