#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "probewarp/image.hpp"
#include "test_util.hpp"

using namespace probewarp;

TEST_CASE("to_grayscale: all-white frame maps to 1.0") {
  const FrameImage frame(8, 6, 1.0);
  const GrayImage g = to_grayscale(frame);
  for (double v : g.data) REQUIRE(v == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("to_grayscale: pure red maps to 0.299") {
  FrameImage frame(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) frame.at(x, y, 0) = 1.0;
  const GrayImage g = to_grayscale(frame);
  for (double v : g.data) REQUIRE(v == Catch::Approx(0.299).margin(1e-15));
}

TEST_CASE("to_grayscale: random frame matches independent per-pixel weighted sum") {
  probewarp::SplitMix64 rng(901);
  FrameImage frame(17, 13);
  for (double& v : frame.data) v = rng.next_unit();
  const GrayImage g = to_grayscale(frame);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) {
      const double want =
          0.299 * frame.at(x, y, 0) + 0.587 * frame.at(x, y, 1) + 0.114 * frame.at(x, y, 2);
      REQUIRE(std::abs(g.at(x, y) - want) < 1e-12);
    }
}

TEST_CASE("to_grayscale: linear in the frame") {
  probewarp::SplitMix64 rng(902);
  FrameImage frame(9, 7);
  for (double& v : frame.data) v = rng.next_unit();
  const double a = 0.37;
  FrameImage scaled = frame;
  for (double& v : scaled.data) v *= a;
  const GrayImage g = to_grayscale(frame);
  const GrayImage gs = to_grayscale(scaled);
  for (std::size_t i = 0; i < g.data.size(); ++i)
    REQUIRE(std::abs(gs.data[i] - a * g.data[i]) < 1e-12);
}

TEST_CASE("image constructors reject non-positive dims") {
  REQUIRE_THROWS_AS(FrameImage(0, 4), ArgumentError);
  REQUIRE_THROWS_AS(GrayImage(4, -1), ArgumentError);
  REQUIRE_THROWS_AS(DepthMap(-3, 2), ArgumentError);
}

TEST_CASE("sobel_gradients: constant image has zero gradients") {
  const GrayImage g(11, 9, 0.42);
  const auto [ix, iy] = sobel_gradients(g);
  for (double v : ix.data) REQUIRE(v == Catch::Approx(0.0).margin(1e-15));
  for (double v : iy.data) REQUIRE(v == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("sobel_gradients: horizontal ramp has interior Ix = slope, Iy = 0") {
  const int w = 21, h = 13;
  GrayImage g(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.at(x, y) = double(x) / (w - 1);
  const auto [ix, iy] = sobel_gradients(g);
  const double slope = 1.0 / (w - 1);
  for (int y = 0; y < h; ++y)
    for (int x = 1; x < w - 1; ++x) {
      REQUIRE(std::abs(ix.at(x, y) - slope) < 1e-12);
      REQUIRE(std::abs(iy.at(x, y)) < 1e-12);
    }
}

TEST_CASE("sobel_gradients: transposing the input swaps and transposes the gradients") {
  probewarp::SplitMix64 rng(903);
  const int w = 12, h = 8;
  GrayImage g(w, h);
  for (double& v : g.data) v = rng.next_unit();
  GrayImage gt(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) gt.at(y, x) = g.at(x, y);
  const auto [ix, iy] = sobel_gradients(g);
  const auto [tx, ty] = sobel_gradients(gt);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      REQUIRE(std::abs(tx.at(y, x) - iy.at(x, y)) < 1e-12);
      REQUIRE(std::abs(ty.at(y, x) - ix.at(x, y)) < 1e-12);
    }
}

TEST_CASE("sobel_gradients: rejects images smaller than 3x3") {
  REQUIRE_THROWS_AS(sobel_gradients(GrayImage(2, 5)), ArgumentError);
  REQUIRE_THROWS_AS(sobel_gradients(GrayImage(5, 2)), ArgumentError);
}

TEST_CASE("build_pyramid: constant image stays constant at every level") {
  const GrayImage g(64, 64, 0.77);
  const ImagePyramid pyr = build_pyramid(g, 3);
  REQUIRE(pyr.level_count() == 3);
  for (int k = 0; k < pyr.level_count(); ++k)
    for (double v : pyr.level(k).data) REQUIRE(v == Catch::Approx(0.77).margin(1e-12));
}

TEST_CASE("build_pyramid: 256x256 with max_levels=4 gives 256,128,64,32") {
  const GrayImage g(256, 256, 0.0);
  const ImagePyramid pyr = build_pyramid(g, 4);
  REQUIRE(pyr.level_count() == 4);
  const int want[4] = {256, 128, 64, 32};
  for (int k = 0; k < 4; ++k) {
    REQUIRE(pyr.level(k).width == want[k]);
    REQUIRE(pyr.level(k).height == want[k]);
  }
}

TEST_CASE("build_pyramid: level dims follow the floor((d+1)/2) recursion") {
  probewarp::SplitMix64 rng(904);
  for (int trial = 0; trial < 6; ++trial) {
    const int w = 33 + int(rng.next() % 200);
    const int h = 33 + int(rng.next() % 200);
    const ImagePyramid pyr = build_pyramid(GrayImage(w, h, 0.5), 5);
    for (int k = 1; k < pyr.level_count(); ++k) {
      REQUIRE(pyr.level(k).width == (pyr.level(k - 1).width + 1) / 2);
      REQUIRE(pyr.level(k).height == (pyr.level(k - 1).height + 1) / 2);
    }
    REQUIRE(pyr.level_count() >= 1);
  }
}

TEST_CASE("build_pyramid: stops before a level with min dim below 16") {
  const ImagePyramid pyr = build_pyramid(GrayImage(40, 40, 0.0), 8);
  // 40 -> 20 -> 10 would violate the floor, so only two levels survive.
  REQUIRE(pyr.level_count() == 2);
  REQUIRE(pyr.level(1).width == 20);
}

TEST_CASE("build_pyramid: impulse level-1 equals direct blur-then-decimate convolution") {
  // Independent oracle: dense 2D convolution with the separable (1,4,6,4,1)/16
  // kernel (edge replication), sampled at even coordinates.
  const int w = 33, h = 33;
  GrayImage g(w, h);
  g.at(16, 16) = 1.0;
  const ImagePyramid pyr = build_pyramid(g, 2);
  REQUIRE(pyr.level_count() == 2);

  const double k1[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  auto clampi = [](int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
  const GrayImage& lv1 = pyr.level(1);
  for (int y = 0; y < lv1.height; ++y)
    for (int x = 0; x < lv1.width; ++x) {
      double want = 0.0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
          want += k1[dx + 2] * k1[dy + 2] *
                  g.at(clampi(2 * x + dx, w), clampi(2 * y + dy, h));
      REQUIRE(std::abs(lv1.at(x, y) - want) < 1e-12);
    }
}

TEST_CASE("build_pyramid: max_levels below 1 is rejected") {
  REQUIRE_THROWS_AS(build_pyramid(GrayImage(32, 32, 0.0), 0), ArgumentError);
}

TEST_CASE("sample_bilinear: integer coordinates reproduce stored pixels exactly") {
  probewarp::SplitMix64 rng(905);
  GrayImage g(7, 5);
  for (double& v : g.data) v = rng.next_unit();
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      REQUIRE(sample_bilinear(g, double(x), double(y)) == g.at(x, y));
}

TEST_CASE("sample_bilinear: midpoint of {0,1,0,1} blends to 0.5") {
  GrayImage g(2, 2);
  g.at(0, 0) = 0.0;
  g.at(1, 0) = 1.0;
  g.at(0, 1) = 0.0;
  g.at(1, 1) = 1.0;
  REQUIRE(sample_bilinear(g, 0.5, 0.5) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("sample_bilinear: far out-of-bounds coordinates clamp to the border pixel") {
  GrayImage g(4, 4);
  g.at(0, 0) = 0.325;
  g.at(3, 3) = 0.875;
  REQUIRE(sample_bilinear(g, -5.0, -5.0) == Catch::Approx(0.325).margin(1e-15));
  REQUIRE(sample_bilinear(g, 99.0, 99.0) == Catch::Approx(0.875).margin(1e-15));
}

TEST_CASE("sample_bilinear: non-finite coordinates are rejected") {
  const GrayImage g(4, 4, 0.0);
  REQUIRE_THROWS_AS(sample_bilinear(g, std::nan(""), 1.0), ArgumentError);
  const FrameImage f(4, 4, 0.0);
  REQUIRE_THROWS_AS(sample_bilinear(f, 1.0, INFINITY), ArgumentError);
}

TEST_CASE("sample_bilinear: frame overload blends each channel independently") {
  FrameImage f(2, 1);
  for (int c = 0; c < 3; ++c) {
    f.at(0, 0, c) = 0.2 * (c + 1);
    f.at(1, 0, c) = 0.2 * (c + 1) + 0.1;
  }
  const auto mid = sample_bilinear(f, 0.5, 0.0);
  for (int c = 0; c < 3; ++c)
    REQUIRE(mid[std::size_t(c)] == Catch::Approx(0.2 * (c + 1) + 0.05).margin(1e-15));
}
