#pragma once

#include <Eigen/Core>

#include <cmath>
#include <utility>
#include <vector>

#include "probewarp/errors.hpp"
#include "probewarp/image.hpp"
#include "probewarp/parallel.hpp"

namespace probewarp {

struct TrackedPoint {
  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
  bool ok = false;
};

namespace detail {

struct PyramidGradients {
  std::vector<GrayImage> ix;
  std::vector<GrayImage> iy;
};

inline PyramidGradients pyramid_gradients(const ImagePyramid& pyr) {
  PyramidGradients g;
  g.ix.reserve(pyr.levels.size());
  g.iy.reserve(pyr.levels.size());
  for (const GrayImage& level : pyr.levels) {
    auto [ix, iy] = sobel_gradients(level);
    g.ix.push_back(std::move(ix));
    g.iy.push_back(std::move(iy));
  }
  return g;
}

inline bool inside(const GrayImage& img, const Eigen::Vector2d& p) {
  return p.x() >= 0.0 && p.x() <= img.width - 1 && p.y() >= 0.0 && p.y() <= img.height - 1;
}

// Single-direction pyramidal Lucas-Kanade for one point. The template window
// (values and gradients) comes from `tpl` at the point; the displacement is
// iterated against `target`.
inline TrackedPoint lk_point(const ImagePyramid& tpl, const PyramidGradients& tpl_grad,
                             const ImagePyramid& target, const Eigen::Vector2d& point,
                             int half_window, int max_iters, double eps, double min_eig,
                             std::vector<double>& scratch) {
  const int levels = tpl.level_count();
  const int side = 2 * half_window + 1;
  const int npix = side * side;
  scratch.resize(std::size_t(npix) * 3);
  double* tv = scratch.data();            // template values
  double* tgx = scratch.data() + npix;    // template x gradients
  double* tgy = scratch.data() + 2 * npix;  // template y gradients

  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  Eigen::Vector2d d = Eigen::Vector2d::Zero();

  for (int lv = levels - 1; lv >= 0; --lv) {
    const GrayImage& timg = tpl.level(lv);
    const GrayImage& nimg = target.level(lv);
    const double scale = std::ldexp(1.0, -lv);
    const Eigen::Vector2d pl = point * scale;
    const bool finest = lv == 0;

    // Coarse levels only refine the guess: a failure there skips the level
    // and defers judgment to the finest level, where the point must be in
    // bounds, G well-conditioned, and the solve convergent.
    if (!inside(timg, pl)) {
      if (finest) return {};
      g *= 2.0;
      continue;
    }

    double gxx = 0.0, gxy = 0.0, gyy = 0.0;
    int k = 0;
    for (int dy = -half_window; dy <= half_window; ++dy)
      for (int dx = -half_window; dx <= half_window; ++dx, ++k) {
        const double sx = pl.x() + dx;
        const double sy = pl.y() + dy;
        tv[k] = sample_bilinear(timg, sx, sy);
        tgx[k] = sample_bilinear(tpl_grad.ix[std::size_t(lv)], sx, sy);
        tgy[k] = sample_bilinear(tpl_grad.iy[std::size_t(lv)], sx, sy);
        gxx += tgx[k] * tgx[k];
        gxy += tgx[k] * tgy[k];
        gyy += tgy[k] * tgy[k];
      }

    // Conditioning gate: min eigenvalue of G normalized by window area.
    const double mean = 0.5 * (gxx + gyy);
    const double disc = std::sqrt(0.25 * (gxx - gyy) * (gxx - gyy) + gxy * gxy);
    const double det = gxx * gyy - gxy * gxy;
    if ((mean - disc) / npix < min_eig || !(det > 0.0)) {
      if (finest) return {};
      g *= 2.0;
      continue;
    }

    d.setZero();
    bool converged = false;
    for (int iter = 0; iter < max_iters; ++iter) {
      const Eigen::Vector2d q = pl + g + d;
      if (!inside(nimg, q)) {
        if (finest) return {};
        break;
      }
      double bx = 0.0, by = 0.0;
      k = 0;
      for (int dy = -half_window; dy <= half_window; ++dy)
        for (int dx = -half_window; dx <= half_window; ++dx, ++k) {
          const double diff = tv[k] - sample_bilinear(nimg, q.x() + dx, q.y() + dy);
          bx += diff * tgx[k];
          by += diff * tgy[k];
        }
      const Eigen::Vector2d step((gyy * bx - gxy * by) / det, (gxx * by - gxy * bx) / det);
      d += step;
      if (step.norm() < eps) {
        converged = true;
        break;
      }
    }

    if (!finest) {
      g = 2.0 * (g + d);
      continue;
    }
    if (!converged) return {};
    const Eigen::Vector2d final_pos = pl + g + d;
    if (!inside(nimg, final_pos)) return {};
    return {final_pos, true};
  }
  return {};  // unreachable
}

}  // namespace detail

// Pyramidal Lucas-Kanade tracking of sparse points from `prev` into `next`.
// `window` is the full window side (odd); the 2x2 normal equations G d = b
// are solved per level, coarse to fine. A point is lost when, at the finest
// level, G is ill-conditioned, the point leaves the image, or the solve does
// not converge; coarse levels only refine the initial guess. Survivors are
// re-tracked backwards and dropped if the round trip misses the start by
// more than 1 px.
inline std::vector<TrackedPoint> lk_track(const ImagePyramid& prev, const ImagePyramid& next,
                                          const std::vector<Eigen::Vector2d>& points,
                                          int window = 21, int max_iters = 30, double eps = 0.01,
                                          double min_eig = 1e-4, int threads = 1) {
  if (prev.level_count() != next.level_count() || prev.level_count() == 0)
    throw ArgumentError("lk_track: mismatched pyramid geometries");
  for (int lv = 0; lv < prev.level_count(); ++lv)
    if (prev.level(lv).width != next.level(lv).width ||
        prev.level(lv).height != next.level(lv).height)
      throw ArgumentError("lk_track: mismatched pyramid geometries");
  if (window < 3) throw ArgumentError("lk_track: window must be >= 3");
  if (max_iters < 1 || !(eps > 0.0)) throw ArgumentError("lk_track: bad iteration parameters");

  const int half_window = window / 2;
  const auto prev_grad = detail::pyramid_gradients(prev);
  const auto next_grad = detail::pyramid_gradients(next);

  std::vector<TrackedPoint> out(points.size());
  parallel_for(0, int(points.size()), threads, [&](int i) {
    std::vector<double> scratch;
    const TrackedPoint fwd = detail::lk_point(prev, prev_grad, next, points[std::size_t(i)],
                                              half_window, max_iters, eps, min_eig, scratch);
    if (!fwd.ok) {
      out[std::size_t(i)] = {points[std::size_t(i)], false};
      return;
    }
    const TrackedPoint back = detail::lk_point(next, next_grad, prev, fwd.pos, half_window,
                                               max_iters, eps, min_eig, scratch);
    if (!back.ok || (back.pos - points[std::size_t(i)]).norm() > 1.0) {
      out[std::size_t(i)] = {fwd.pos, false};
      return;
    }
    out[std::size_t(i)] = fwd;
  });
  return out;
}

}  // namespace probewarp
