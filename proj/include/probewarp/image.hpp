#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "probewarp/errors.hpp"

namespace probewarp {

// Pixel centers sit at integer coordinates; (0,0) is the top-left pixel.

// Row-major RGB image, channel values in [0, 1].
struct FrameImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // width * height * 3

  FrameImage() = default;
  FrameImage(int w, int h, double fill = 0.0)
      : width(w), height(h), data(check_dims(w, h) * 3, fill) {}

  double& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
  double at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }

  static std::size_t check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw ArgumentError("image dimensions must be positive");
    return std::size_t(w) * std::size_t(h);
  }
};

// Row-major scalar image. Intensities live in [0, 1]; gradient fields reuse
// the same container with signed values.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // width * height

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), data(FrameImage::check_dims(w, h), fill) {}

  double& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  double at(int x, int y) const { return data[std::size_t(y) * width + x]; }
};

// Row-major depth buffer, scene units. Valid entries are finite and > 0;
// missing depth is encoded as a non-finite value (NaN or infinity).
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // width * height

  DepthMap() = default;
  DepthMap(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(FrameImage::check_dims(w, h), fill) {}

  float& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  float at(int x, int y) const { return data[std::size_t(y) * width + x]; }
};

// Coarse-to-fine stack of grayscale images; level 0 is full resolution and
// level k+1 has dims floor((d_k + 1) / 2).
struct ImagePyramid {
  std::vector<GrayImage> levels;

  const GrayImage& level(int k) const { return levels[std::size_t(k)]; }
  int level_count() const { return int(levels.size()); }
};

inline GrayImage to_grayscale(const FrameImage& frame) {
  GrayImage out(frame.width, frame.height);
  const std::size_t n = out.data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* px = &frame.data[i * 3];
    out.data[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  }
  return out;
}

namespace detail {

inline int clamp_index(int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); }

}  // namespace detail

// 3x3 Sobel derivatives scaled by 1/8, so a unit-slope intensity ramp yields a
// unit gradient. Borders replicate the edge pixel.
inline std::pair<GrayImage, GrayImage> sobel_gradients(const GrayImage& gray) {
  if (gray.width < 3 || gray.height < 3)
    throw ArgumentError("sobel_gradients: image must be at least 3x3");
  GrayImage ix(gray.width, gray.height);
  GrayImage iy(gray.width, gray.height);
  const int w = gray.width, h = gray.height;
  for (int y = 0; y < h; ++y) {
    const int ym = detail::clamp_index(y - 1, h);
    const int yp = detail::clamp_index(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = detail::clamp_index(x - 1, w);
      const int xp = detail::clamp_index(x + 1, w);
      const double a = gray.at(xm, ym), b = gray.at(x, ym), c = gray.at(xp, ym);
      const double d = gray.at(xm, y), f = gray.at(xp, y);
      const double g = gray.at(xm, yp), i = gray.at(x, yp), j = gray.at(xp, yp);
      ix.at(x, y) = ((c + 2.0 * f + j) - (a + 2.0 * d + g)) / 8.0;
      iy.at(x, y) = ((g + 2.0 * i + j) - (a + 2.0 * b + c)) / 8.0;
    }
  }
  return {std::move(ix), std::move(iy)};
}

namespace detail {

// Separable 5-tap binomial blur (1,4,6,4,1)/16 with replicated borders.
inline GrayImage binomial_blur(const GrayImage& src) {
  static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int w = src.width, h = src.height;
  GrayImage tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -2; d <= 2; ++d) s += k[d + 2] * src.at(clamp_index(x + d, w), y);
      tmp.at(x, y) = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -2; d <= 2; ++d) s += k[d + 2] * tmp.at(x, clamp_index(y + d, h));
      out.at(x, y) = s;
    }
  return out;
}

}  // namespace detail

// Each level is a binomial blur of the previous one decimated 2x (even
// coordinates kept). Stops before max_levels when the next level would have a
// side shorter than 16 pixels.
inline ImagePyramid build_pyramid(const GrayImage& gray, int max_levels) {
  if (max_levels < 1) throw ArgumentError("build_pyramid: max_levels must be >= 1");
  ImagePyramid pyr;
  pyr.levels.push_back(gray);
  while (int(pyr.levels.size()) < max_levels) {
    const GrayImage& cur = pyr.levels.back();
    const int nw = (cur.width + 1) / 2;
    const int nh = (cur.height + 1) / 2;
    if (std::min(nw, nh) < 16) break;
    GrayImage blurred = detail::binomial_blur(cur);
    GrayImage next(nw, nh);
    for (int y = 0; y < nh; ++y)
      for (int x = 0; x < nw; ++x) next.at(x, y) = blurred.at(2 * x, 2 * y);
    pyr.levels.push_back(std::move(next));
  }
  return pyr;
}

// Bilinear sample with edge clamp: coordinates outside [0,W-1]x[0,H-1] take
// the border pixel. Integer coordinates reproduce the stored value exactly.
inline double sample_bilinear(const GrayImage& img, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw ArgumentError("sample_bilinear: coordinates must be finite");
  const double cx = std::clamp(x, 0.0, double(img.width - 1));
  const double cy = std::clamp(y, 0.0, double(img.height - 1));
  const int x0 = int(cx);
  const int y0 = int(cy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
  const double bot = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
  return (1.0 - fy) * top + fy * bot;
}

inline std::array<double, 3> sample_bilinear(const FrameImage& img, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw ArgumentError("sample_bilinear: coordinates must be finite");
  const double cx = std::clamp(x, 0.0, double(img.width - 1));
  const double cy = std::clamp(y, 0.0, double(img.height - 1));
  const int x0 = int(cx);
  const int y0 = int(cy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    out[std::size_t(c)] = (1.0 - fy) * top + fy * bot;
  }
  return out;
}

}  // namespace probewarp
