#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "probewarp/features.hpp"
#include "probewarp/image.hpp"
#include "probewarp/optical_flow.hpp"

namespace probewarp {

// One feature tracked from the reference frame. `base_*` is frozen at frame 0
// so every surviving track always yields a (frame 0, frame t) correspondence.
struct Track {
  int id = 0;
  Eigen::Vector2d base_pos = Eigen::Vector2d::Zero();
  double base_depth = 0.0;
  Eigen::Vector2d cur_pos = Eigen::Vector2d::Zero();
  bool alive = false;
};

struct TrackSet {
  std::vector<Track> tracks;

  int alive_count() const {
    int n = 0;
    for (const Track& t : tracks)
      if (t.alive) ++n;
    return n;
  }
};

// Depth lookup at the nearest pixel. Subpixel track positions round to the
// closest sample; interpolating depth across occlusion edges would invent
// geometry that exists in neither surface.
inline float depth_at_nearest(const DepthMap& depth, const Eigen::Vector2d& p) {
  const int x = detail::clamp_index(int(std::lround(p.x())), depth.width);
  const int y = detail::clamp_index(int(std::lround(p.y())), depth.height);
  return depth.at(x, y);
}

// Seed a track set from detected corners. Corners over depth holes are
// discarded immediately: without a valid base depth they can never form a 3D
// correspondence.
inline TrackSet make_track_set(const std::vector<Corner>& corners, const DepthMap& depth) {
  TrackSet set;
  set.tracks.reserve(corners.size());
  int next_id = 0;
  for (const Corner& c : corners) {
    const float z = depth_at_nearest(depth, {c.u, c.v});
    if (!std::isfinite(z) || z <= 0.0f) continue;
    Track t;
    t.id = next_id++;
    t.base_pos = {c.u, c.v};
    t.base_depth = double(z);
    t.cur_pos = t.base_pos;
    t.alive = true;
    set.tracks.push_back(t);
  }
  return set;
}

// Advance every live track from its current position into the next frame.
// A track dies when the tracker loses it or when it lands on an invalid
// depth sample; dead tracks are never revived.
inline void advance_tracks(TrackSet& set, const ImagePyramid& prev, const ImagePyramid& next,
                           const DepthMap& next_depth, int window = 21, int max_iters = 30,
                           double eps = 0.01, double min_eig = 1e-4, int threads = 1) {
  std::vector<Eigen::Vector2d> pts;
  std::vector<std::size_t> idx;
  pts.reserve(set.tracks.size());
  idx.reserve(set.tracks.size());
  for (std::size_t i = 0; i < set.tracks.size(); ++i) {
    if (!set.tracks[i].alive) continue;
    pts.push_back(set.tracks[i].cur_pos);
    idx.push_back(i);
  }
  if (pts.empty()) return;

  const std::vector<TrackedPoint> moved =
      lk_track(prev, next, pts, window, max_iters, eps, min_eig, threads);
  for (std::size_t k = 0; k < moved.size(); ++k) {
    Track& t = set.tracks[idx[k]];
    if (!moved[k].ok) {
      t.alive = false;
      continue;
    }
    const float z = depth_at_nearest(next_depth, moved[k].pos);
    if (!std::isfinite(z) || z <= 0.0f) {
      t.alive = false;
      continue;
    }
    t.cur_pos = moved[k].pos;
  }
}

}  // namespace probewarp
