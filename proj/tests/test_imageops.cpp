#include <cmath>

#include "attgrasp/imageops.h"
#include "attgrasp/rng.h"
#include "doctest.h"

using namespace attgrasp;

namespace {

constexpr double kPi = 3.14159265358979323846;

Tensor random_tensor(int h, int w, int c, uint64_t seed) {
  Rng r(seed);
  Tensor t = Tensor::zeros3(h, w, c);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = r.uniform();
  return t;
}

// smooth unit-range field; bilinear error on it is second-order small
Tensor smooth_tensor(int h, int w, int c) {
  Tensor t = Tensor::zeros3(h, w, c);
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col)
      for (int k = 0; k < c; ++k)
        t.at(r, col, k) = 0.5 + 0.4 * std::sin(2.0 * kPi * (2.0 * col + r) / w / 3.0 + k);
  return t;
}

}  // namespace

TEST_CASE("quarter turns are exact permutations") {
  Tensor t = random_tensor(8, 8, 2, 1);
  for (int q = 0; q < 4; ++q) {
    double a = q * kPi / 2.0;
    Tensor fwd = rotate_image(t, a);
    Tensor back = rotate_image(fwd, -a);
    for (int64_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
  }
  // 90-degree content rotation moves the top-left pixel where expected
  Tensor s = Tensor::zeros2(4, 4);
  s.at(0, 0) = 1.0;
  Tensor r90 = rotate_image(s, kPi / 2.0);
  CHECK(r90.at(0, 3) == 1.0);  // (x,y)=(-1.5,-1.5) -> (1.5,-1.5) -> col 3, row 0
  CHECK(r90.at(0, 0) == 0.0);
  Tensor r180 = rotate_image(s, kPi);
  CHECK(r180.at(3, 3) == 1.0);
}

TEST_CASE("rotate then unrotate: 30-degree multiples on smooth fields") {
  Tensor t = smooth_tensor(96, 96, 1);
  for (int k = 1; k < 6; ++k) {
    double a = k * kPi / 6.0;
    Tensor fwd = rotate_image(t, a);
    Tensor back = rotate_image(fwd, -a);
    // interior pixels: inside the inscribed disk both rotations are in-bounds
    double cx = 47.5, cy = 47.5, rad = 40.0;
    double linf = 0.0;
    for (int r = 0; r < 96; ++r)
      for (int c = 0; c < 96; ++c)
        if (std::hypot(r - cy, c - cx) < rad)
          linf = std::max(linf, std::abs(back.at(r, c, 0) - t.at(r, c, 0)));
    CHECK(linf <= 0.02);
  }
}

TEST_CASE("rotation backward is the exact transpose") {
  // <rot(x), y> == <x, rot_backward(y)> for a linear map and its transpose
  Rng rng(3);
  for (double a : {0.4, kPi / 6.0, kPi / 2.0, 1.9}) {
    Tensor x = random_tensor(12, 12, 3, 10);
    Tensor y = random_tensor(12, 12, 3, 11);
    Tensor rx = rotate_image(x, a);
    Tensor bty = Tensor::zeros3(12, 12, 3);
    rotate_image_backward(y, a, bty);
    double lhs = 0.0, rhs = 0.0;
    for (int64_t i = 0; i < x.size(); ++i) {
      lhs += rx[i] * y[i];
      rhs += x[i] * bty[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("rotate_point matches image rotation of a delta") {
  Tensor s = Tensor::zeros2(32, 32);
  s.at(20, 9) = 1.0;
  double a = kPi;  // exact at 180
  auto [pr, pc] = rotate_point(20, 9, a, 32, 32);
  CHECK(pr == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(pc == doctest::Approx(22.0).epsilon(1e-12));
  Tensor rot = rotate_image(s, a);
  CHECK(rot.at(11, 22) == 1.0);
}

TEST_CASE("upsample shapes and transpose") {
  Tensor x = random_tensor(5, 6, 2, 21);
  Tensor up = upsample_bilinear(x, 4);
  CHECK(up.rows() == 20);
  CHECK(up.cols() == 24);

  // constant field stays constant under bilinear upsampling
  Tensor c = Tensor::zeros2(4, 4);
  c.fill(0.7);
  Tensor cu = upsample_bilinear(c, 4);
  for (int64_t i = 0; i < cu.size(); ++i) CHECK(cu[i] == doctest::Approx(0.7).epsilon(1e-12));

  Tensor y = random_tensor(20, 24, 2, 22);
  Tensor bty = Tensor::zeros3(5, 6, 2);
  upsample_bilinear_backward(y, 4, bty);
  Tensor ux = upsample_bilinear(x, 4);
  double lhs = 0.0, rhs = 0.0;
  for (int64_t i = 0; i < ux.size(); ++i) lhs += ux[i] * y[i];
  for (int64_t i = 0; i < x.size(); ++i) rhs += x[i] * bty[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("flip and resize") {
  Tensor x = random_tensor(3, 5, 1, 31);
  Tensor f = flip_horizontal(x);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 5; ++c) CHECK(f.at(r, c, 0) == x.at(r, 4 - c, 0));

  Tensor rz = resize_bilinear(x, 6, 10);
  CHECK(rz.rows() == 6);
  CHECK(rz.cols() == 10);
  // resize to the same size is identity
  Tensor same = resize_bilinear(x, 3, 5);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(same[i] == doctest::Approx(x[i]).epsilon(1e-12));
}
