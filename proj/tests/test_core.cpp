#include <cstdio>
#include <filesystem>

#include "attgrasp/rng.h"
#include "attgrasp/tensor.h"
#include "attgrasp/tensor_io.h"
#include "doctest.h"

using namespace attgrasp;

TEST_CASE("rng determinism and ranges") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(7);
  double mn = 1.0, mx = 0.0, sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = r.uniform();
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  CHECK(mn >= 0.0);
  CHECK(mx < 1.0);
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));

  // normal moments
  Rng g(3);
  double m1 = 0.0, m2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = g.normal();
    m1 += z;
    m2 += z * z;
  }
  CHECK(m1 / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.02));

  // forked streams differ from the parent stream
  Rng p(11);
  Rng f = p.fork(1);
  CHECK(p.next_u64() != f.next_u64());

  // uniform_int covers both endpoints
  Rng ui(5);
  bool lo = false, hi = false;
  for (int i = 0; i < 1000; ++i) {
    int v = ui.uniform_int(2, 4);
    CHECK(v >= 2);
    CHECK(v <= 4);
    lo = lo || v == 2;
    hi = hi || v == 4;
  }
  CHECK(lo);
  CHECK(hi);
}

TEST_CASE("tensor basics") {
  Tensor t = Tensor::zeros3(4, 5, 3);
  CHECK(t.size() == 60);
  t.at(2, 3, 1) = 7.5;
  CHECK(t[(2 * 5 + 3) * 3 + 1] == 7.5);
  CHECK_THROWS_AS(t.check_shape(4, 5, 2, "x"), ShapeError);

  Tensor v = Tensor::zeros1(8);
  CHECK(v.ndim() == 1);
  CHECK(v.size() == 8);
}

TEST_CASE("tensor file round trip") {
  auto dir = std::filesystem::temp_directory_path() / "attgrasp_tio";
  std::filesystem::create_directories(dir);
  auto path = (dir / "t.f32").string();

  Rng r(9);
  Tensor t = Tensor::zeros3(6, 7, 2);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = r.normal();
  write_tensor(path, t);
  TensorF32 back = read_tensor_f32(path);
  REQUIRE(back.dims[0] == 6);
  REQUIRE(back.dims[1] == 7);
  REQUIRE(back.dims[2] == 2);
  Tensor tb = back.to_tensor();
  for (int64_t i = 0; i < t.size(); ++i)
    CHECK(tb[i] == doctest::Approx(t[i]).epsilon(1e-6));

  // float32 quantization is idempotent: write(read(x)) is byte-identical
  auto path2 = (dir / "t2.f32").string();
  write_tensor_f32(path2, back);
  TensorF32 again = read_tensor_f32(path2);
  CHECK(again.data == back.data);

  CHECK_THROWS_AS(read_tensor_f32((dir / "missing.f32").string()), IoError);
  std::filesystem::remove_all(dir);
}
