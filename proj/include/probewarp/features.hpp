#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "probewarp/errors.hpp"
#include "probewarp/image.hpp"

namespace probewarp {

struct Corner {
  double u = 0.0;
  double v = 0.0;
  double score = 0.0;  // structure-tensor min eigenvalue
};

// Shi-Tomasi response map: per pixel, the minimum eigenvalue of the 2x2
// structure tensor [sum Ix^2, sum IxIy; sum IxIy, sum Iy^2] accumulated over
// a window*window box (window is the box side in pixels; an even value uses
// the next smaller odd box) with edge-clamped coordinates.
inline GrayImage shi_tomasi_response(const GrayImage& gray, int window = 3) {
  if (window < 1) throw ArgumentError("shi_tomasi_response: window must be >= 1");
  if (gray.width < 2 * window + 1 || gray.height < 2 * window + 1)
    throw ArgumentError("shi_tomasi_response: image smaller than the detection window");
  const int half = window / 2;
  auto [ix, iy] = sobel_gradients(gray);
  const int w = gray.width, h = gray.height;

  GrayImage ixx(w, h), ixy(w, h), iyy(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = ix.at(x, y), gy = iy.at(x, y);
      ixx.at(x, y) = gx * gx;
      ixy.at(x, y) = gx * gy;
      iyy.at(x, y) = gy * gy;
    }

  // Separable edge-clamped box sums, horizontal then vertical.
  auto box = [&](GrayImage& img) {
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int d = -half; d <= half; ++d) s += img.at(detail::clamp_index(x + d, w), y);
        tmp.at(x, y) = s;
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int d = -half; d <= half; ++d) s += tmp.at(x, detail::clamp_index(y + d, h));
        img.at(x, y) = s;
      }
  };
  box(ixx);
  box(ixy);
  box(iyy);

  GrayImage resp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double sxx = ixx.at(x, y), sxy = ixy.at(x, y), syy = iyy.at(x, y);
      const double mean = 0.5 * (sxx + syy);
      const double disc = std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
      resp.at(x, y) = mean - disc;
    }
  return resp;
}

// Detects up to max_corners reliable corners: pixels whose response reaches
// quality_level of the global maximum, picked greedily in descending score
// with pairwise Euclidean spacing >= min_distance. A flat image yields an
// empty list.
inline std::vector<Corner> detect_corners(const GrayImage& gray, int max_corners = 200,
                                          double quality_level = 0.01, double min_distance = 10.0,
                                          int window = 3) {
  if (max_corners < 1) throw ArgumentError("detect_corners: max_corners must be >= 1");
  if (!(quality_level > 0.0)) throw ArgumentError("detect_corners: quality_level must be > 0");
  const GrayImage resp = shi_tomasi_response(gray, window);

  double max_resp = 0.0;
  for (double r : resp.data) max_resp = std::max(max_resp, r);
  if (!(max_resp > 0.0)) return {};

  const double cutoff = quality_level * max_resp;
  struct Candidate {
    int x, y;
    double score;
  };
  std::vector<Candidate> candidates;
  for (int y = 0; y < resp.height; ++y)
    for (int x = 0; x < resp.width; ++x) {
      const double r = resp.at(x, y);
      if (r >= cutoff && r > 0.0) candidates.push_back({x, y, r});
    }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  const double min_d2 = min_distance * min_distance;
  std::vector<Corner> corners;
  corners.reserve(std::size_t(max_corners));
  for (const Candidate& c : candidates) {
    bool spaced = true;
    for (const Corner& kept : corners) {
      const double dx = kept.u - c.x, dy = kept.v - c.y;
      if (dx * dx + dy * dy < min_d2) {
        spaced = false;
        break;
      }
    }
    if (!spaced) continue;
    corners.push_back({double(c.x), double(c.y), c.score});
    if (int(corners.size()) >= max_corners) break;
  }
  return corners;
}

}  // namespace probewarp
