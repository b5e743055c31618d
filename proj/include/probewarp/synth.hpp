#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "probewarp/camera.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/image.hpp"
#include "probewarp/rigid.hpp"
#include "probewarp/rng.hpp"

namespace probewarp {

// Fronto-parallel plane z = depth in world coordinates.
struct PlaneScene {
  double depth = 5.0;
};

struct SphereScene {
  Point3 center = {0.0, 0.0, 5.0};
  double radius = 1.0;
};

struct TextureSpec {
  double checker_cell = 0.5;  // world units per checker cell
  std::uint64_t seed = 7;
  int octaves = 3;
};

struct SceneSpec {
  std::variant<PlaneScene, SphereScene> geometry = PlaneScene{};
  TextureSpec texture;
  Eigen::Vector3d background = {0.05, 0.05, 0.08};
};

// Ground-truth camera path. transforms[t] maps frame-0 camera coordinates to
// frame-t camera coordinates, the same convention the estimator logs, so
// scripts and estimates compare term by term. Entry 0 is the identity.
struct MotionScript {
  std::vector<RigidTransform> transforms;
};

inline MotionScript constant_velocity_script(int frames, const Eigen::Vector3d& trans_per_frame,
                                             const Eigen::Vector3d& rot_axis = {0, 0, 1},
                                             double rot_per_frame = 0.0) {
  if (frames < 1) throw ArgumentError("constant_velocity_script: frames must be >= 1");
  MotionScript script;
  script.transforms.reserve(std::size_t(frames));
  Eigen::Vector3d axis = rot_axis;
  if (axis.norm() <= 0.0) axis = {0, 0, 1};
  axis.normalize();
  for (int t = 0; t < frames; ++t) {
    RigidTransform T;
    T.R = Eigen::AngleAxisd(rot_per_frame * t, axis).toRotationMatrix();
    T.t = trans_per_frame * double(t);
    script.transforms.push_back(T);
  }
  return script;
}

namespace detail {

// Quintic-fade value noise on an integer lattice, deterministic in the seed.
inline double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
  const std::uint64_t h =
      hash_mix(hash_mix(seed, std::uint64_t(ix) * 0x9e3779b97f4a7c15ull), std::uint64_t(iy));
  return double(h >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
}

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

inline double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const std::int64_t ix = std::int64_t(fx), iy = std::int64_t(fy);
  const double tx = fade(x - fx), ty = fade(y - fy);
  const double v00 = lattice_value(seed, ix, iy);
  const double v10 = lattice_value(seed, ix + 1, iy);
  const double v01 = lattice_value(seed, ix, iy + 1);
  const double v11 = lattice_value(seed, ix + 1, iy + 1);
  const double a = v00 + (v10 - v00) * tx;
  const double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

// Procedural surface colour at a world-space surface point. Checker gives
// the strong gradients corner detection needs; multi-octave noise breaks up
// the flat cells so flow has texture everywhere.
inline Eigen::Vector3d texture_value(const TextureSpec& spec, double u, double v) {
  double noise = 0.0, amp = 0.5, freq = 1.0, norm = 0.0;
  for (int o = 0; o < spec.octaves; ++o) {
    noise += amp * value_noise(spec.seed + std::uint64_t(o), u * freq, v * freq);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  if (norm > 0.0) noise /= norm;
  const auto cell = [&](double s) { return std::int64_t(std::floor(s / spec.checker_cell)); };
  const bool dark = ((cell(u) + cell(v)) & 1) != 0;
  const double base = dark ? 0.25 : 0.75;
  const double val = 0.65 * base + 0.35 * noise;
  return {val, 0.55 * val + 0.3 * noise, 0.9 - 0.5 * val};
}

}  // namespace detail

struct RenderedFrame {
  FrameImage image;
  DepthMap depth;
};

// Render one frame of the scene from the camera at `cam` (frame-0 camera ->
// this camera). Rays are cast through pixel centres; depth is the camera-z
// of the hit (the ray parameter, since direction z is 1); misses get the
// background colour and a NaN depth hole.
inline RenderedFrame render_frame(const SceneSpec& scene, const RigidTransform& cam,
                                  const Intrinsics& K, int width, int height) {
  if (width < 1 || height < 1) throw ArgumentError("render_frame: bad dimensions");
  RenderedFrame out;
  out.image.width = width;
  out.image.height = height;
  out.image.data.assign(std::size_t(width) * height * 3, 0.0);
  out.depth.width = width;
  out.depth.height = height;
  out.depth.data.assign(std::size_t(width) * height, 0.0f);

  // World frame == frame-0 camera frame. `cam` maps world -> camera, so the
  // camera centre in world coordinates is -R^T t and a camera-space ray
  // direction d maps to world direction R^T d.
  const Eigen::Matrix3d Rt = cam.R.transpose();
  const Point3 origin = -Rt * cam.t;

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Point3 dir_c((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
      const Point3 dir_w = Rt * dir_c;

      double s = std::numeric_limits<double>::quiet_NaN();
      Eigen::Vector3d colour = scene.background;
      Eigen::Vector2d surf(0.0, 0.0);

      if (const PlaneScene* plane = std::get_if<PlaneScene>(&scene.geometry)) {
        if (std::abs(dir_w.z()) > 1e-12) {
          const double hit = (plane->depth - origin.z()) / dir_w.z();
          if (hit > 1e-9) {
            s = hit;
            const Point3 p = origin + s * dir_w;
            surf = {p.x(), p.y()};
          }
        }
      } else {
        const SphereScene& sph = std::get<SphereScene>(scene.geometry);
        const Point3 oc = origin - sph.center;
        const double a = dir_w.squaredNorm();
        const double b = 2.0 * oc.dot(dir_w);
        const double c = oc.squaredNorm() - sph.radius * sph.radius;
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
          const double root = std::sqrt(disc);
          double hit = (-b - root) / (2.0 * a);
          if (hit <= 1e-9) hit = (-b + root) / (2.0 * a);
          if (hit > 1e-9) {
            s = hit;
            const Point3 p = origin + s * dir_w;
            const Point3 n = (p - sph.center).normalized();
            // Spherical parametrisation for the texture lookup.
            surf = {std::atan2(n.y(), n.x()) * sph.radius, std::acos(std::clamp(n.z(), -1.0, 1.0)) * sph.radius};
          }
        }
      }

      const std::size_t pi = std::size_t(y) * width + x;
      if (std::isfinite(s)) {
        colour = detail::texture_value(scene.texture, surf.x(), surf.y());
        // Camera-space depth equals the ray parameter because dir_c.z == 1.
        out.depth.data[pi] = float(s);
      } else {
        out.depth.data[pi] = std::numeric_limits<float>::quiet_NaN();
      }
      for (int ch = 0; ch < 3; ++ch)
        out.image.data[pi * 3 + std::size_t(ch)] = std::clamp(colour[ch], 0.0, 1.0);
    }
  }
  return out;
}

inline std::vector<RenderedFrame> render_sequence(const SceneSpec& scene,
                                                  const MotionScript& script, const Intrinsics& K,
                                                  int width, int height) {
  std::vector<RenderedFrame> frames;
  frames.reserve(script.transforms.size());
  for (const RigidTransform& cam : script.transforms)
    frames.push_back(render_frame(scene, cam, K, width, height));
  return frames;
}

// Synthetic chrome-ball stand-in: smooth radial shading plus low-frequency
// noise, so warped copies can be compared against analytic expectations.
inline FrameImage make_test_ball(int size, std::uint64_t seed = 11) {
  if (size < 1) throw ArgumentError("make_test_ball: bad size");
  FrameImage ball;
  ball.width = size;
  ball.height = size;
  ball.data.assign(std::size_t(size) * size * 3, 0.0);
  const double half = 0.5 * (size - 1);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = (x - half) / (half > 0 ? half : 1.0);
      const double dy = (y - half) / (half > 0 ? half : 1.0);
      const double r2 = std::min(dx * dx + dy * dy, 1.0);
      const double shade = 0.85 - 0.55 * r2;
      const double n = detail::value_noise(seed, 3.0 * dx, 3.0 * dy);
      const std::size_t i = (std::size_t(y) * size + x) * 3;
      ball.data[i + 0] = std::clamp(shade + 0.12 * n, 0.0, 1.0);
      ball.data[i + 1] = std::clamp(shade + 0.08 * n, 0.0, 1.0);
      ball.data[i + 2] = std::clamp(0.9 * shade + 0.18 * n, 0.0, 1.0);
    }
  return ball;
}

struct MotionError {
  double rotation_deg = 0.0;
  double translation = 0.0;
};

// Error between a ground-truth and an estimated camera transform: angle of
// gt.R * est.R^T in degrees and Euclidean translation distance.
inline MotionError score_estimate(const RigidTransform& truth, const RigidTransform& estimate) {
  MotionError e;
  const Eigen::Matrix3d dR = truth.R * estimate.R.transpose();
  e.rotation_deg = rotation_angle(dR) * 180.0 / 3.14159265358979323846;
  e.translation = (truth.t - estimate.t).norm();
  return e;
}

}  // namespace probewarp
