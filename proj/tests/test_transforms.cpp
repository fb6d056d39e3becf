#include <catch2/catch_amalgamated.hpp>

#include <yoco/transforms.hpp>

#include "test_helpers.hpp"

#include <cmath>

using namespace yoco;

TEST_CASE("flips are involutions and move the right pixels", "[transforms]") {
  const auto img = test::random_image(3, 7, 9, 5);
  const auto h = flip_horizontal(img);
  CHECK(h.at(0, 2, 0) == img.at(0, 2, 8));
  CHECK(flip_horizontal(h) == img);
  const auto v = flip_vertical(img);
  CHECK(v.at(1, 0, 3) == img.at(1, 6, 3));
  CHECK(flip_vertical(v) == img);
}

TEST_CASE("brightness scales pixel values", "[transforms]") {
  Image img(3, 1, 1, 0.5f);
  const auto out = adjust_brightness(img, 0.6);
  for (float v : out.pixels) CHECK(v == Catch::Approx(0.3f));
  const auto clipped = adjust_brightness(img, 3.0);
  for (float v : clipped.pixels) CHECK(v == 1.0f);
}

TEST_CASE("contrast zero collapses to the luma mean", "[transforms]") {
  Image img(3, 2, 2);
  // Channel-constant planes so the luma mean has a closed form.
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      img.at(0, y, x) = 0.8f;
      img.at(1, y, x) = 0.4f;
      img.at(2, y, x) = 0.2f;
    }
  const float expected = 0.299f * 0.8f + 0.587f * 0.4f + 0.114f * 0.2f;
  const auto out = adjust_contrast(img, 0.0);
  for (float v : out.pixels) CHECK(v == Catch::Approx(expected).margin(1e-6));
  CHECK(adjust_contrast(img, 1.0) == img);
}

TEST_CASE("saturation zero yields per-pixel gray", "[transforms]") {
  const auto img = test::random_image(3, 4, 4, 77);
  const auto out = adjust_saturation(img, 0.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      CHECK(out.at(0, y, x) == Catch::Approx(out.at(1, y, x)).margin(1e-6));
      CHECK(out.at(1, y, x) == Catch::Approx(out.at(2, y, x)).margin(1e-6));
    }
  CHECK(adjust_saturation(img, 1.0) == img);
  const auto gray = test::random_image(1, 4, 4, 78);
  CHECK_THROWS_AS(adjust_saturation(gray, 0.5), Error);
}

TEST_CASE("hue shift wraps and needs three channels", "[transforms]") {
  Image red(3, 1, 1);
  red.at(0, 0, 0) = 1.0f;
  // A full turn is the identity; a third of a turn sends red to green.
  const auto same = adjust_hue(red, 1.0);
  CHECK(same.at(0, 0, 0) == Catch::Approx(1.0f).margin(1e-5));
  const auto green = adjust_hue(red, 1.0 / 3.0);
  CHECK(green.at(1, 0, 0) == Catch::Approx(1.0f).margin(1e-5));
  CHECK(green.at(0, 0, 0) == Catch::Approx(0.0f).margin(1e-5));
  const auto gray = test::random_image(1, 2, 2, 3);
  CHECK_THROWS_AS(adjust_hue(gray, 0.1), Error);
}

TEST_CASE("sharpness factor one is the identity", "[transforms]") {
  const auto img = test::random_image(3, 6, 6, 13);
  const auto out = adjust_sharpness(img, 1.0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    CHECK(out.pixels[i] == Catch::Approx(img.pixels[i]).margin(1e-6));
  // Factor zero is the smooth image: borders keep their original values.
  const auto smooth = adjust_sharpness(img, 0.0);
  CHECK(smooth.at(0, 0, 0) == img.at(0, 0, 0));
  CHECK(smooth.at(2, 5, 5) == img.at(2, 5, 5));
}

TEST_CASE("invert reflects about one", "[transforms]") {
  Image img(1, 1, 2);
  img.pixels = {0.25f, 1.0f};
  const auto out = invert(img);
  CHECK(out.pixels[0] == 0.75f);
  CHECK(out.pixels[1] == 0.0f);
  CHECK(invert(out) == img);
}

TEST_CASE("posterize keeps the top bits", "[transforms]") {
  Image img(1, 1, 1);
  img.pixels = {200.0f / 255.0f};
  // 200 = 0b11001000; with 3 bits the mask 0b11100000 keeps 192.
  const auto out = posterize(img, 3);
  CHECK(out.pixels[0] == Catch::Approx(192.0f / 255.0f));
  CHECK(posterize(img, 8) == img);
  CHECK_THROWS_AS(posterize(img, 0), Error);
  CHECK_THROWS_AS(posterize(img, 9), Error);
}

TEST_CASE("solarize flips values at or above the threshold", "[transforms]") {
  Image img(1, 1, 3);
  img.pixels = {0.2f, 0.5f, 0.9f};
  const auto out = solarize(img, 0.5);
  CHECK(out.pixels[0] == 0.2f);
  CHECK(out.pixels[1] == 0.5f);
  CHECK(out.pixels[2] == Catch::Approx(1.0f - 0.9f));
}

TEST_CASE("auto contrast stretches to the full range", "[transforms]") {
  Image img(1, 1, 3);
  img.pixels = {0.2f, 0.4f, 0.6f};
  const auto out = auto_contrast(img);
  CHECK(out.pixels[0] == Catch::Approx(0.0f));
  CHECK(out.pixels[1] == Catch::Approx(0.5f));
  CHECK(out.pixels[2] == Catch::Approx(1.0f));
  Image flat(1, 1, 2, 0.3f);
  CHECK(auto_contrast(flat) == flat);
}

TEST_CASE("equalize flattens a skewed histogram", "[transforms]") {
  // Two equally heavy levels spread to the ends of the range: with 4096
  // pixels split over bins 115 and 140, step = 2048/255 = 8, so the low
  // level maps through 4/8 = 0 and the high level through 2052/8 -> 255.
  Image img(1, 64, 64, 0.45f);
  for (int y = 32; y < 64; ++y)
    for (int x = 0; x < 64; ++x) img.at(0, y, x) = 0.55f;
  const auto out = equalize(img);
  CHECK(out.at(0, 0, 0) == 0.0f);
  CHECK(out.at(0, 63, 0) == 1.0f);
  // Too few pixels to fill a step: the image passes through unchanged.
  Image tiny(1, 4, 4, 0.1f);
  for (int x = 0; x < 4; ++x) tiny.at(0, 3, x) = 0.9f;
  CHECK(equalize(tiny) == tiny);
  // A constant image stays constant.
  Image flat(1, 2, 2, 0.5f);
  const auto still = equalize(flat);
  CHECK(still.at(0, 0, 0) == still.at(0, 1, 1));
}

TEST_CASE("affine helpers with zero parameters are identities", "[transforms]") {
  const auto img = test::random_image(3, 9, 9, 21);
  CHECK(rotate_deg(img, 0.0) == img);
  CHECK(shear_x(img, 0.0) == img);
  CHECK(shear_y(img, 0.0) == img);
  CHECK(translate_x(img, 0.0) == img);
  CHECK(translate_y(img, 0.0) == img);
}

TEST_CASE("translate moves content by whole pixels", "[transforms]") {
  Image img(1, 3, 3);
  img.at(0, 1, 1) = 1.0f;
  const auto out = translate_x(img, 1.0);
  CHECK(out.at(0, 1, 2) == Catch::Approx(1.0f).margin(1e-6));
  CHECK(out.at(0, 1, 1) == Catch::Approx(0.0f).margin(1e-6));
  const auto down = translate_y(img, 1.0);
  CHECK(down.at(0, 2, 1) == Catch::Approx(1.0f).margin(1e-6));
}

TEST_CASE("rotation by 180 degrees matches double flip", "[transforms]") {
  const auto img = test::random_image(1, 5, 5, 31);
  const auto rot = rotate_deg(img, 180.0);
  const auto flipped = flip_horizontal(flip_vertical(img));
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    CHECK(rot.pixels[i] == Catch::Approx(flipped.pixels[i]).margin(1e-5));
}

TEST_CASE("resize_bilinear handles identity and scaling", "[transforms]") {
  const auto img = test::random_image(3, 8, 8, 41);
  CHECK(resize_bilinear(img, 8, 8) == img);
  const auto up = resize_bilinear(img, 16, 16);
  CHECK(up.height == 16);
  CHECK(up.width == 16);
  // Constant images stay constant under any resize.
  Image flat(3, 5, 7, 0.375f);
  const auto scaled = resize_bilinear(flat, 11, 3);
  for (float v : scaled.pixels) CHECK(v == Catch::Approx(0.375f).margin(1e-6));
  CHECK_THROWS_AS(resize_bilinear(img, 0, 4), Error);
  CHECK_THROWS_AS(resize_bilinear(img, 4, -1), Error);
}

TEST_CASE("blur kernel extent follows the odd near-tenth rule", "[transforms]") {
  CHECK(blur_kernel_extent(32) == 3);
  CHECK(blur_kernel_extent(16) == 1);
  CHECK(blur_kernel_extent(224) == 23);
  CHECK(blur_kernel_extent(8) == 1);
  CHECK(blur_kernel_extent(64) == 7);
  CHECK(blur_kernel_extent(blur_kernel_extent(32)) % 2 == 1);
}

TEST_CASE("gaussian blur preserves constants and rejects bad sigma", "[transforms]") {
  Image flat(3, 32, 32, 0.6f);
  const auto out = gaussian_blur_fixed(flat, 1.2, 3, 3);
  for (float v : out.pixels) CHECK(v == Catch::Approx(0.6f).margin(1e-6));
  // Kernel size one leaves the image untouched.
  const auto img = test::random_image(3, 16, 16, 51);
  CHECK(gaussian_blur_fixed(img, 0.5, 1, 1) == img);
  CHECK_THROWS_AS(gaussian_blur_fixed(img, 0.0, 3, 3), Error);
  CHECK_THROWS_AS(gaussian_blur_fixed(img, -1.0, 3, 3), Error);
}

TEST_CASE("gaussian blur smooths an impulse symmetrically", "[transforms]") {
  Image img(1, 9, 9);
  img.at(0, 4, 4) = 1.0f;
  const auto out = gaussian_blur_fixed(img, 1.0, 3, 3);
  CHECK(out.at(0, 4, 4) < 1.0f);
  CHECK(out.at(0, 4, 3) > 0.0f);
  CHECK(out.at(0, 4, 3) == Catch::Approx(out.at(0, 4, 5)).margin(1e-6));
  CHECK(out.at(0, 3, 4) == Catch::Approx(out.at(0, 5, 4)).margin(1e-6));
  // Separable kernel: mass is conserved away from the borders.
  double total = 0;
  for (float v : out.pixels) total += v;
  CHECK(total == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("grayscale mean handles both channel layouts", "[transforms]") {
  Image rgb(3, 1, 1);
  rgb.at(0, 0, 0) = 1.0f;
  CHECK(grayscale_mean(rgb) == Catch::Approx(0.299f));
  Image mono(1, 1, 2);
  mono.pixels = {0.2f, 0.4f};
  CHECK(grayscale_mean(mono) == Catch::Approx(0.3f));
}
