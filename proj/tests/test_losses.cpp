#include <cmath>

#include "attgrasp/learn/losses.h"
#include "attgrasp/learn/triplets.h"
#include "attgrasp/rng.h"
#include "doctest.h"

using namespace attgrasp;
using namespace attgrasp::learn;

namespace {

// independent scalar-loop oracle for the motion loss
double motion_oracle(const std::vector<Tensor>& maps, int angle, int row, int col,
                     double qbar, const Tensor& mask, double lm) {
  double qe = maps[static_cast<size_t>(angle)].at(row, col);
  double acc = (qe - qbar) * (qe - qbar);
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c)
      if (mask.at(r, c) > 0) {
        double q = maps[static_cast<size_t>(angle)].at(r, c);
        acc += lm * q * q;
      }
  return acc;
}

Tensor rand_vec(Rng& r, int d) {
  Tensor t = Tensor::zeros1(d);
  for (int i = 0; i < d; ++i) t[i] = r.normal();
  return t;
}

}  // namespace

TEST_CASE("motion loss: worked examples") {
  net::AffordanceMaps maps;
  maps.maps.push_back(Tensor::zeros2(4, 4));
  Tensor empty_mask = Tensor::zeros2(4, 4);

  // exact prediction, empty mask -> 0
  maps.maps[0].at(1, 1) = 0.7;
  CHECK(motion_loss(maps, {1, 1, 0}, 0.7, empty_mask, 0.1) == 0.0);

  // q_e=0.5, qbar=1, one mask pixel q=0.2, lambda=0.1 -> 0.25 + 0.1*0.04
  maps.maps[0].at(1, 1) = 0.5;
  maps.maps[0].at(2, 3) = 0.2;
  Tensor mask = Tensor::zeros2(4, 4);
  mask.at(2, 3) = 1.0;
  CHECK(motion_loss(maps, {1, 1, 0}, 1.0, mask, 0.1) ==
        doctest::Approx(0.254).epsilon(1e-12));

  CHECK_THROWS_AS(motion_loss(maps, {9, 1, 0}, 1.0, mask, 0.1), IndexError);
  CHECK_THROWS_AS(motion_loss(maps, {1, 1, 4}, 1.0, mask, 0.1), IndexError);
}

TEST_CASE("motion loss: 1e4 random instances match the loop oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 6;
    net::AffordanceMaps maps;
    std::vector<Tensor> copy;
    int N = rng.uniform_int(1, 3);
    for (int k = 0; k < N; ++k) {
      Tensor m = Tensor::zeros2(n, n);
      for (int64_t i = 0; i < m.size(); ++i) m[i] = rng.uniform();
      maps.maps.push_back(m);
      copy.push_back(m);
    }
    Tensor mask = Tensor::zeros2(n, n);
    for (int64_t i = 0; i < mask.size(); ++i) mask[i] = rng.coin(0.5) ? 1.0 : 0.0;
    sim::GraspAction a{rng.uniform_int(0, n - 1), rng.uniform_int(0, n - 1),
                       rng.uniform_int(0, N - 1)};
    double qbar = rng.uniform();
    double lm = rng.uniform(0.0, 0.5);
    double got = motion_loss(maps, a, qbar, mask, lm);
    double want = motion_oracle(copy, a.angle_index, a.row, a.col, qbar, mask, lm);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("motion loss backward: finite differences on the map") {
  Rng rng(7);
  Tensor map = Tensor::zeros2(5, 5);
  for (int64_t i = 0; i < map.size(); ++i) map[i] = rng.uniform();
  Tensor mask = Tensor::zeros2(5, 5);
  mask.at(0, 0) = 1.0;
  mask.at(3, 4) = 1.0;
  Tensor dmap = Tensor::zeros2(5, 5);
  motion_loss_backward(map, 2, 2, 0.4, mask, 0.2, 1.0, dmap);
  const double h = 1e-6;
  for (int64_t i = 0; i < map.size(); ++i) {
    Tensor mp = map, mm = map;
    mp[i] += h;
    mm[i] -= h;
    double fd = (motion_loss_single(mp, 2, 2, 0.4, mask, 0.2) -
                 motion_loss_single(mm, 2, 2, 0.4, mask, 0.2)) /
                (2 * h);
    CHECK(dmap[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("metric loss: worked examples") {
  Rng rng(3);
  std::vector<PoolEntry> pool(3);
  pool[0].vec = rand_vec(rng, 8);
  pool[1].vec = pool[0].vec;   // f+ equals anchor
  pool[2].vec = rand_vec(rng, 8);
  double dn = 0.0;
  for (int i = 0; i < 8; ++i) {
    double d = pool[0].vec[i] - pool[2].vec[i];
    dn += d * d;
  }
  std::vector<TripletIdx> tr = {{0, 1, 2}};
  // margin satisfied -> 0
  if (dn >= 0.5) CHECK(metric_loss(pool, tr, 0.5) == 0.0);
  // f = f+ = f- -> alpha per triplet
  pool[2].vec = pool[0].vec;
  CHECK(metric_loss(pool, tr, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(metric_loss(pool, {{0, 1, 2}, {0, 1, 2}}, 0.5) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metric loss: 1e4 random instances match the loop oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const int d = 4;
    std::vector<PoolEntry> pool(3);
    for (auto& p : pool) p.vec = rand_vec(rng, d);
    double alpha = rng.uniform(0.0, 1.0);
    std::vector<TripletIdx> tr = {{0, 1, 2}};
    double got = metric_loss(pool, tr, alpha);
    // loop oracle
    double dp = 0.0, dn = 0.0;
    for (int i = 0; i < d; ++i) {
      dp += (pool[0].vec[i] - pool[1].vec[i]) * (pool[0].vec[i] - pool[1].vec[i]);
      dn += (pool[0].vec[i] - pool[2].vec[i]) * (pool[0].vec[i] - pool[2].vec[i]);
    }
    double want = std::max(dp - dn + alpha, 0.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("metric loss backward: finite differences") {
  Rng rng(13);
  std::vector<PoolEntry> pool(4);
  for (auto& p : pool) p.vec = rand_vec(rng, 5);
  std::vector<TripletIdx> tr = {{0, 1, 2}, {3, 2, 0}};
  std::vector<Tensor> dvecs(4, Tensor::zeros1(5));
  metric_loss_backward(pool, tr, 0.7, 1.0, dvecs);
  const double h = 1e-6;
  for (size_t v = 0; v < 4; ++v) {
    for (int i = 0; i < 5; ++i) {
      auto pp = pool, pm = pool;
      pp[v].vec[i] += h;
      pm[v].vec[i] -= h;
      double fd = (metric_loss(pp, tr, 0.7) - metric_loss(pm, tr, 0.7)) / (2 * h);
      CHECK(dvecs[v][i] == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("triplet mining: validity, emptiness, oracle recheck") {
  Rng rng(17);
  // two entries with equal labels: no negative exists -> empty
  std::vector<PoolEntry> two(2);
  two[0].vec = rand_vec(rng, 3);
  two[0].label = AttributeLabel({1, 4});
  two[1].vec = rand_vec(rng, 3);
  two[1].label = AttributeLabel({1, 4});
  CHECK(mine_triplets(two, rng, 16).empty());

  // anchor [1,4]; [1,5] (sim .5) must mine as positive vs [2,5] (sim 0)
  std::vector<PoolEntry> three(3);
  three[0].label = AttributeLabel({1, 4});
  three[1].label = AttributeLabel({1, 5});
  three[2].label = AttributeLabel({2, 5});
  for (auto& p : three) p.vec = rand_vec(rng, 3);
  auto mined = mine_triplets(three, rng, 32);
  CHECK(!mined.empty());
  for (const auto& t : mined) {
    double sp = similarity(three[size_t(t.anchor)].label, three[size_t(t.positive)].label);
    double sn = similarity(three[size_t(t.anchor)].label, three[size_t(t.negative)].label);
    CHECK(sp > sn);
    if (t.anchor == 0) {
      CHECK(t.positive == 1);
      CHECK(t.negative == 2);
    }
  }

  // random pools: every mined triplet rechecked against brute-force ordering
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PoolEntry> pool(size_t(rng.uniform_int(3, 10)));
    for (auto& p : pool) {
      p.vec = rand_vec(rng, 2);
      p.label = AttributeLabel({rng.uniform_int(0, 3), rng.uniform_int(0, 3)});
    }
    for (const auto& t : mine_triplets(pool, rng, 16)) {
      CHECK(similarity(pool[size_t(t.anchor)].label, pool[size_t(t.positive)].label) >
            similarity(pool[size_t(t.anchor)].label, pool[size_t(t.negative)].label));
    }
  }
}

TEST_CASE("gradient reversal layer") {
  GradientReversal grl{0.5};
  Tensor x = Tensor::zeros1(2);
  x[0] = 1.0;
  x[1] = 2.0;
  Tensor fwd = grl.forward(x);
  CHECK(fwd[0] == 1.0);
  CHECK(fwd[1] == 2.0);
  Tensor up = Tensor::zeros1(2);
  up[0] = 1.0;
  up[1] = -1.0;
  Tensor back = grl.backward(up);
  CHECK(back[0] == doctest::Approx(-0.5));
  CHECK(back[1] == doctest::Approx(0.5));
}

TEST_CASE("bce with logits") {
  // logit 0 -> ln 2 regardless of label
  CHECK(bce_with_logit(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_with_logit(0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // oracle: -y log p - (1-y) log(1-p)
  Rng rng(23);
  for (int i = 0; i < 10000; ++i) {
    double z = rng.uniform(-8.0, 8.0);
    double y = rng.coin(0.5) ? 1.0 : 0.0;
    double p = 1.0 / (1.0 + std::exp(-z));
    double want = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    CHECK(bce_with_logit(z, y) == doctest::Approx(want).epsilon(1e-6));
    // derivative via finite differences
    double h = 1e-6;
    double fd = (bce_with_logit(z + h, y) - bce_with_logit(z - h, y)) / (2 * h);
    CHECK(bce_dlogit(z, y) == doctest::Approx(fd).epsilon(1e-4));
  }
}
