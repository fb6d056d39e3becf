#include <catch2/catch_amalgamated.hpp>

#include <yoco/augment.hpp>

#include "test_helpers.hpp"

#include <array>
#include <cmath>

using namespace yoco;

TEST_CASE("color jitter with all strengths zero is bit-identical", "[augment]") {
  const auto img = test::random_image(3, 8, 8, 1);
  RngStream stream(5);
  JitterParams p{0.0, 0.0, 0.0, 0.0};
  CHECK(color_jitter(img, p, stream) == img);
  // Only the three shuffle draws were consumed.
  RngStream fresh(5);
  (void)fresh.below(4);
  (void)fresh.below(3);
  (void)fresh.below(2);
  CHECK(stream.next() == fresh.next());
}

TEST_CASE("color jitter replays from a mirrored stream", "[augment]") {
  const auto img = test::random_image(3, 8, 8, 2);
  const JitterParams p{0.4, 0.4, 0.4, 0.1};
  RngStream run(9);
  const auto out = color_jitter(img, p, run);

  RngStream replay(9);
  std::array<int, 4> order = {0, 1, 2, 3};
  for (int i = 3; i > 0; --i) {
    const auto j = replay.below(static_cast<std::uint64_t>(i) + 1);
    std::swap(order[i], order[static_cast<std::size_t>(j)]);
  }
  Image manual = img;
  for (int which : order) {
    switch (which) {
      case 0: manual = adjust_brightness(manual, replay.uniform(0.6, 1.4)); break;
      case 1: manual = adjust_contrast(manual, replay.uniform(0.6, 1.4)); break;
      case 2: manual = adjust_saturation(manual, replay.uniform(0.6, 1.4)); break;
      default: manual = adjust_hue(manual, replay.uniform(-0.1, 0.1)); break;
    }
  }
  CHECK(out == manual);
}

TEST_CASE("color jitter validates parameters and channels", "[augment]") {
  const auto rgb = test::random_image(3, 4, 4, 3);
  const auto mono = test::random_image(1, 4, 4, 4);
  RngStream stream(1);
  CHECK_THROWS_AS(color_jitter(rgb, {1.5, 0, 0, 0}, stream), Error);
  CHECK_THROWS_AS(color_jitter(rgb, {-0.1, 0, 0, 0}, stream), Error);
  CHECK_THROWS_AS(color_jitter(rgb, {0, 0, 0, 0.6}, stream), Error);
  CHECK_THROWS_AS(color_jitter(mono, {0.1, 0.1, 0.4, 0}, stream), Error);
  // Grayscale works when only brightness/contrast are active.
  CHECK_NOTHROW(color_jitter(mono, {0.4, 0.4, 0.0, 0.0}, stream));
}

TEST_CASE("gaussian blur op draws one sigma and uses size-tied kernels", "[augment]") {
  const auto img = test::random_image(3, 32, 32, 6);
  RngStream run(21);
  const auto out = gaussian_blur(img, {0.1, 2.0}, run);

  RngStream replay(21);
  const double sigma = replay.uniform(0.1, 2.0);
  const auto manual = gaussian_blur_fixed(img, sigma, 3, 3);
  CHECK(out == manual);

  RngStream s(1);
  CHECK_THROWS_AS(gaussian_blur(img, {0.0, 2.0}, s), Error);
  CHECK_THROWS_AS(gaussian_blur(img, {2.0, 0.1}, s), Error);

  // On 16x16 the kernel extent is 1 in both dimensions, so blur is identity.
  const auto small = test::random_image(3, 16, 16, 7);
  RngStream s2(2);
  CHECK(gaussian_blur(small, {0.1, 2.0}, s2) == small);
}

TEST_CASE("random erasing respects the realized area fraction", "[augment]") {
  const auto img = test::random_image(3, 32, 32, 8);
  const ErasingParams p{0.02, 0.4, 0.3, 3.3, 0.5f, 10};
  int applied = 0;
  for (int trial = 0; trial < 200; ++trial) {
    RngStream stream(3000 + trial);
    const auto out = random_erasing(img, p, stream);
    if (out == img) continue;
    ++applied;
    // Count the erased rectangle against the allowed fraction window.
    int erased = 0;
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        bool hit = true;
        for (int c = 0; c < 3; ++c) hit &= (out.at(c, y, x) == 0.5f);
        if (hit) ++erased;
      }
    const double frac = erased / 1024.0;
    CHECK(frac >= 0.02);
    CHECK(frac <= 0.4);
  }
  CHECK(applied > 150);  // fits nearly always on 32x32
}

TEST_CASE("random erasing on a 1x1 image is the identity", "[augment]") {
  // No rectangle of at least one pixel can satisfy a 40% area cap on a
  // single pixel, so every attempt is rejected.
  Image img(3, 1, 1, 0.7f);
  RngStream stream(4);
  CHECK(random_erasing(img, {0.02, 0.4, 0.3, 3.3, 0.0f, 10}, stream) == img);
}

TEST_CASE("random erasing validates ranges", "[augment]") {
  const auto img = test::random_image(3, 8, 8, 9);
  RngStream stream(1);
  CHECK_THROWS_AS(random_erasing(img, {0.0, 0.4, 0.3, 3.3, 0, 10}, stream), Error);
  CHECK_THROWS_AS(random_erasing(img, {0.4, 0.02, 0.3, 3.3, 0, 10}, stream), Error);
  CHECK_THROWS_AS(random_erasing(img, {0.02, 1.5, 0.3, 3.3, 0, 10}, stream), Error);
  CHECK_THROWS_AS(random_erasing(img, {0.02, 0.4, 0.0, 3.3, 0, 10}, stream), Error);
  CHECK_THROWS_AS(random_erasing(img, {0.02, 0.4, 3.3, 0.3, 0, 10}, stream), Error);
}

TEST_CASE("cutout zeroes a clipped square around the drawn center", "[augment]") {
  Image img(1, 16, 16, 1.0f);
  RngStream run(13);
  const auto out = cutout(img, 0.25, run);
  // side = round(0.25 * 16) = 4; replay the center draws.
  RngStream replay(13);
  const int cy = static_cast<int>(replay.below(16));
  const int cx = static_cast<int>(replay.below(16));
  const int y0 = std::max(0, cy - 2), x0 = std::max(0, cx - 2);
  const int y1 = std::min(16, cy - 2 + 4), x1 = std::min(16, cx - 2 + 4);
  int zeros = 0;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const bool inside = y >= y0 && y < y1 && x >= x0 && x < x1;
      CHECK(out.at(0, y, x) == (inside ? 0.0f : 1.0f));
      zeros += out.at(0, y, x) == 0.0f ? 1 : 0;
    }
  CHECK(zeros == (y1 - y0) * (x1 - x0));
  CHECK(zeros <= 16);
}

TEST_CASE("cutout clips at the borders", "[augment]") {
  Image img(1, 8, 8, 1.0f);
  // Find a draw whose center lands on the border and confirm the patch is
  // clipped rather than wrapped.
  bool saw_clipped = false;
  for (int seed = 0; seed < 200 && !saw_clipped; ++seed) {
    RngStream probe(seed);
    const int cy = static_cast<int>(probe.below(8));
    const int cx = static_cast<int>(probe.below(8));
    if (cy != 0 && cx != 0) continue;
    saw_clipped = true;
    RngStream run(seed);
    const auto out = cutout(img, 0.5, run);  // side 4
    int zeros = 0;
    for (float v : out.pixels) zeros += v == 0.0f ? 1 : 0;
    CHECK(zeros < 16);
    CHECK(zeros > 0);
  }
  CHECK(saw_clipped);
}

TEST_CASE("cutout parameter validation and tiny sides", "[augment]") {
  const auto img = test::random_image(3, 16, 16, 10);
  RngStream stream(1);
  CHECK_THROWS_AS(cutout(img, 0.0, stream), Error);
  CHECK_THROWS_AS(cutout(img, -0.2, stream), Error);
  CHECK_THROWS_AS(cutout(img, 1.5, stream), Error);
  // A fraction that rounds the side to zero leaves the image unchanged but
  // still consumes both position draws.
  Image tiny(1, 16, 16, 1.0f);
  RngStream run(2);
  CHECK(cutout(tiny, 0.01, run) == tiny);
  RngStream mirror(2);
  (void)mirror.below(16);
  (void)mirror.below(16);
  CHECK(run.next() == mirror.next());
}

TEST_CASE("gates fire at the configured rate", "[augment]") {
  const int n = 20000;
  RngStream stream(55);
  const auto op = AugmentOp::horizontal_flip(0.3);
  int fired = 0;
  for (int i = 0; i < n; ++i) fired += gate(op, stream) ? 1 : 0;
  CHECK(std::abs(fired / static_cast<double>(n) - 0.3) < 0.01);

  const auto always = AugmentOp::horizontal_flip(1.0);
  const auto never = AugmentOp::horizontal_flip(0.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(gate(always, stream));
    CHECK_FALSE(gate(never, stream));
  }

  AugmentOp bad = AugmentOp::horizontal_flip();
  bad.probability = 1.5;
  CHECK_THROWS_AS(gate(bad, stream), Error);
  bad.probability = -0.5;
  CHECK_THROWS_AS(gate(bad, stream), Error);
}

TEST_CASE("apply_op dispatches every non-mix kind", "[augment]") {
  const auto img = test::random_image(3, 32, 32, 11);
  RngStream stream(77);
  CHECK(apply_op(img, AugmentOp::horizontal_flip(), stream) == flip_horizontal(img));
  CHECK(apply_op(img, AugmentOp::vertical_flip(), stream) == flip_vertical(img));
  CHECK_NOTHROW(apply_op(img, AugmentOp::color_jitter(), stream));
  CHECK_NOTHROW(apply_op(img, AugmentOp::gaussian_blur(), stream));
  CHECK_NOTHROW(apply_op(img, AugmentOp::random_erasing(), stream));
  CHECK_NOTHROW(apply_op(img, AugmentOp::cutout(), stream));
  CHECK_THROWS_AS(apply_op(img, AugmentOp::mixup(), stream), Error);
  CHECK_THROWS_AS(apply_op(img, AugmentOp::cutmix(), stream), Error);
  // AutoAug without a policy is a parameter error.
  AugmentOp no_policy;
  no_policy.kind = OpKind::AutoAug;
  no_policy.probability = 1.0;
  CHECK_THROWS_AS(apply_op(img, no_policy, stream), Error);
}

TEST_CASE("apply_ops rejects mix kinds anywhere in the list", "[augment]") {
  const auto img = test::random_image(3, 8, 8, 12);
  RngStream stream(3);
  const std::vector<AugmentOp> ops{AugmentOp::horizontal_flip(1.0),
                                   AugmentOp::mixup()};
  CHECK_THROWS_AS(apply_ops(img, ops, stream), Error);

  const std::vector<AugmentOp> fine{AugmentOp::horizontal_flip(1.0),
                                    AugmentOp::vertical_flip(1.0)};
  bool any = false;
  const auto out = apply_ops(img, fine, stream, &any);
  CHECK(any);
  CHECK(out == flip_vertical(flip_horizontal(img)));

  const std::vector<AugmentOp> never{AugmentOp::horizontal_flip(0.0)};
  any = true;
  CHECK(apply_ops(img, never, stream, &any) == img);
  CHECK_FALSE(any);
}
