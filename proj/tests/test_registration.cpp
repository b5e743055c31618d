#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Geometry>
#include <cmath>
#include <vector>

#include "probewarp/registration.hpp"
#include "test_util.hpp"

using namespace probewarp;

namespace {

std::vector<Point3> random_cloud(probewarp::SplitMix64& rng, int n, double half_extent) {
  std::vector<Point3> pts;
  pts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) pts.push_back(testutil::random_vector(rng, half_extent));
  return pts;
}

std::vector<Point3> apply_all(const RigidTransform& T, const std::vector<Point3>& pts) {
  std::vector<Point3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(T.apply(p));
  return out;
}

double residual_rms(const RigidTransform& T, const std::vector<Point3>& src,
                    const std::vector<Point3>& dst) {
  double s = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) s += (T.apply(src[i]) - dst[i]).squaredNorm();
  return std::sqrt(s / double(src.size()));
}

}  // namespace

TEST_CASE("kabsch: identity fit on equal clouds") {
  probewarp::SplitMix64 rng(61);
  const auto pts = random_cloud(rng, 25, 1.0);
  const RigidTransform T = kabsch(pts, pts);
  REQUIRE((T.R - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  REQUIRE(T.t.norm() < 1e-12);
}

TEST_CASE("kabsch: apply-then-recover on 50 points to 1e-9") {
  probewarp::SplitMix64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    RigidTransform truth;
    truth.R = testutil::random_rotation(rng);
    truth.t = testutil::random_vector(rng, 5.0);
    const auto src = random_cloud(rng, 50, 1.0);
    const auto dst = apply_all(truth, src);
    const RigidTransform est = kabsch(src, dst);
    REQUIRE((est.R - truth.R).norm() < 1e-9);
    REQUIRE((est.t - truth.t).norm() < 1e-9);
    REQUIRE(is_rotation(est.R));
  }
}

TEST_CASE("kabsch: argument and data errors") {
  probewarp::SplitMix64 rng(63);
  const auto pts = random_cloud(rng, 5, 1.0);
  std::vector<Point3> four(pts.begin(), pts.begin() + 4);
  REQUIRE_THROWS_AS(kabsch(pts, four), ArgumentError);
  std::vector<Point3> two(pts.begin(), pts.begin() + 2);
  REQUIRE_THROWS_AS(kabsch(two, two), InsufficientDataError);
}

TEST_CASE("kabsch: collinear configuration is degenerate") {
  std::vector<Point3> src, dst;
  for (int i = 0; i < 8; ++i) {
    src.push_back(Point3(double(i), 2.0 * i, -1.0 * i));
    dst.push_back(Point3(double(i), 2.0 * i, -1.0 * i));
  }
  REQUIRE_THROWS_AS(kabsch(src, dst), DegenerateError);
}

TEST_CASE("kabsch: reflection-optimal coplanar case still returns a proper rotation") {
  // Coplanar points in the z = 0 plane mapped through the reflection
  // diag(1,-1,1). On that plane the proper rotation diag(1,-1,-1) (a half-turn
  // about x) produces identical images, so the det correction must find it
  // with zero residual.
  probewarp::SplitMix64 rng(64);
  std::vector<Point3> src, dst;
  for (int i = 0; i < 30; ++i) {
    const Point3 p(testutil::uniform(rng, -1.0, 1.0), testutil::uniform(rng, -1.0, 1.0), 0.0);
    src.push_back(p);
    dst.push_back(Point3(p.x(), -p.y(), 0.0));
  }
  const RigidTransform est = kabsch(src, dst);
  REQUIRE(est.R.determinant() > 0.0);
  REQUIRE(is_rotation(est.R));
  REQUIRE(residual_rms(est, src, dst) < 1e-12);

  // No sampled proper rotation (with its own optimal translation) beats it.
  Eigen::Vector3d c0 = Eigen::Vector3d::Zero(), ct = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    c0 += src[i];
    ct += dst[i];
  }
  c0 /= double(src.size());
  ct /= double(dst.size());
  const double best = residual_rms(est, src, dst);
  for (int k = 0; k < 2000; ++k) {
    RigidTransform cand;
    cand.R = testutil::random_rotation(rng);
    cand.t = ct - cand.R * c0;
    REQUIRE(residual_rms(cand, src, dst) >= best - 1e-12);
  }
}

TEST_CASE("kabsch: rotation error stays within the noise-scaling bound") {
  // 50 points in [-1,1]^3 with isotropic Gaussian noise sigma on the target
  // side; rotation error in degrees must stay below 5*sigma*(180/pi)/sqrt(50)
  // in at least 95% of 200 trials.
  probewarp::SplitMix64 rng(65);
  const double sigma = 0.01;
  const int trials = 200;
  const double bound_deg = 5.0 * sigma * (180.0 / 3.14159265358979323846) / std::sqrt(50.0);
  int ok = 0;
  for (int trial = 0; trial < trials; ++trial) {
    RigidTransform truth;
    truth.R = testutil::random_rotation(rng);
    truth.t = testutil::random_vector(rng, 1.0);
    const auto src = random_cloud(rng, 50, 1.0);
    auto dst = apply_all(truth, src);
    for (auto& p : dst)
      p += sigma * Eigen::Vector3d(testutil::gaussian(rng), testutil::gaussian(rng),
                                   testutil::gaussian(rng));
    const RigidTransform est = kabsch(src, dst);
    const double err_deg =
        rotation_angle(truth.R * est.R.transpose()) * 180.0 / 3.14159265358979323846;
    if (err_deg < bound_deg) ++ok;
  }
  REQUIRE(ok >= 190);
}

TEST_CASE("ransac_rigid: outlier-free pairs give all inliers and an exact fit") {
  probewarp::SplitMix64 rng(66);
  RigidTransform truth;
  truth.R = testutil::random_rotation(rng);
  truth.t = testutil::random_vector(rng, 2.0);
  const auto src = random_cloud(rng, 40, 1.0);
  const auto dst = apply_all(truth, src);
  const RansacResult res = ransac_rigid(src, dst, 0.05, 200, 9);
  REQUIRE(res.inlier_count == 40);
  for (bool b : res.inliers) REQUIRE(b);
  REQUIRE((res.transform.R - truth.R).norm() < 1e-9);
  REQUIRE((res.transform.t - truth.t).norm() < 1e-9);
}

TEST_CASE("ransac_rigid: 30% outliers, inliers recovered and rotation accurate") {
  probewarp::SplitMix64 rng(67);
  int trials_ok = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    RigidTransform truth;
    truth.R = testutil::random_rotation(rng);
    truth.t = testutil::random_vector(rng, 1.0);
    const int n = 50, n_out = 15;
    auto src = random_cloud(rng, n, 1.0);
    auto dst = apply_all(truth, src);
    for (int i = 0; i < n_out; ++i)
      dst[std::size_t(i)] = testutil::random_vector(rng, 3.0);  // first 15 become outliers

    const RansacResult res = ransac_rigid(src, dst, 0.05, 200, 1000 + std::uint64_t(trial));
    const double err_deg =
        rotation_angle(truth.R * res.transform.R.transpose()) * 180.0 / 3.14159265358979323846;
    int true_inliers_kept = 0;
    for (int i = n_out; i < n; ++i)
      if (res.inliers[std::size_t(i)]) ++true_inliers_kept;
    const bool recovered = true_inliers_kept >= int(0.95 * (n - n_out));
    if (err_deg < 0.1 && recovered) ++trials_ok;
  }
  REQUIRE(trials_ok >= 95);
}

TEST_CASE("ransac_rigid: contract errors") {
  probewarp::SplitMix64 rng(68);
  const auto pts = random_cloud(rng, 2, 1.0);
  REQUIRE_THROWS_AS(ransac_rigid(pts, pts, 0.1, 200, 0), InsufficientDataError);
  const auto five = random_cloud(rng, 5, 1.0);
  REQUIRE_THROWS_AS(ransac_rigid(five, five, 0.0, 200, 0), ArgumentError);
  REQUIRE_THROWS_AS(ransac_rigid(five, five, 0.1, 0, 0), ArgumentError);
  std::vector<Point3> four(five.begin(), five.begin() + 4);
  REQUIRE_THROWS_AS(ransac_rigid(five, four, 0.1, 200, 0), ArgumentError);
}

TEST_CASE("ransac_rigid: no consensus when pairs admit no common rigid model") {
  // Pairwise distances are wildly inconsistent, so no 3-sample model explains
  // 3 pairs within the tiny threshold.
  probewarp::SplitMix64 rng(69);
  std::vector<Point3> src, dst;
  for (int i = 0; i < 12; ++i) {
    src.push_back(testutil::random_vector(rng, 1.0));
    dst.push_back(testutil::random_vector(rng, 50.0));
  }
  REQUIRE_THROWS_AS(ransac_rigid(src, dst, 1e-9, 200, 3), NoConsensusError);
}

TEST_CASE("ransac_rigid: deterministic for a fixed seed") {
  probewarp::SplitMix64 rng(70);
  RigidTransform truth;
  truth.R = testutil::random_rotation(rng);
  truth.t = testutil::random_vector(rng, 1.0);
  auto src = random_cloud(rng, 30, 1.0);
  auto dst = apply_all(truth, src);
  for (int i = 0; i < 9; ++i) dst[std::size_t(i)] = testutil::random_vector(rng, 3.0);

  const RansacResult a = ransac_rigid(src, dst, 0.05, 200, 42);
  const RansacResult b = ransac_rigid(src, dst, 0.05, 200, 42);
  REQUIRE(a.inlier_count == b.inlier_count);
  REQUIRE(a.inliers == b.inliers);
  REQUIRE((a.transform.R - b.transform.R).norm() == 0.0);
  REQUIRE((a.transform.t - b.transform.t).norm() == 0.0);
}
