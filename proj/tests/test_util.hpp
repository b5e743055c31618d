#pragma once

// Shared helpers for the test binaries: deterministic random sources, random
// rotations, and procedural textures to feed the detector and tracker.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "probewarp/image.hpp"
#include "probewarp/rigid.hpp"
#include "probewarp/rng.hpp"
#include "probewarp/synth.hpp"

namespace testutil {

inline double unit(probewarp::SplitMix64& rng) { return rng.next_unit(); }

inline double uniform(probewarp::SplitMix64& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_unit();
}

// Standard normal via Box-Muller.
inline double gaussian(probewarp::SplitMix64& rng) {
  double u1 = rng.next_unit();
  while (u1 <= 0.0) u1 = rng.next_unit();
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Uniformly distributed proper rotation (random unit quaternion).
inline Eigen::Matrix3d random_rotation(probewarp::SplitMix64& rng) {
  const double u1 = rng.next_unit(), u2 = rng.next_unit(), u3 = rng.next_unit();
  const double two_pi = 2.0 * 3.14159265358979323846;
  const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(two_pi * u3),
                             std::sqrt(1.0 - u1) * std::sin(two_pi * u2),
                             std::sqrt(1.0 - u1) * std::cos(two_pi * u2),
                             std::sqrt(u1) * std::sin(two_pi * u3));
  return q.normalized().toRotationMatrix();
}

inline Eigen::Vector3d random_vector(probewarp::SplitMix64& rng, double scale) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

// Smooth but feature-rich scalar field in [0,1]: several octaves of value
// noise. Continuous in (x, y), so shifted copies of the same field provide
// exact subpixel ground truth for flow.
inline double noise_field(std::uint64_t seed, double x, double y) {
  double v = 0.0, amp = 0.5, freq = 1.0 / 24.0, norm = 0.0;
  for (int o = 0; o < 4; ++o) {
    v += amp * probewarp::detail::value_noise(seed + std::uint64_t(o), x * freq, y * freq);
    norm += amp;
    amp *= 0.55;
    freq *= 2.1;
  }
  return v / norm;
}

inline probewarp::GrayImage noise_gray(int w, int h, std::uint64_t seed, double shift_x = 0.0,
                                       double shift_y = 0.0) {
  probewarp::GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = noise_field(seed, x - shift_x, y - shift_y);
  return img;
}

inline probewarp::FrameImage noise_frame(int w, int h, std::uint64_t seed, double shift_x = 0.0,
                                         double shift_y = 0.0) {
  probewarp::FrameImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = noise_field(seed + std::uint64_t(100 + c), x - shift_x, y - shift_y);
  return img;
}

// Unique per-run scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("probewarp_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
