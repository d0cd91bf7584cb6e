#include "attgrasp/learn/triplets.h"

#include <algorithm>

namespace attgrasp::learn {

std::vector<TripletIdx> mine_triplets(const std::vector<PoolEntry>& pool, Rng& rng,
                                      int max_triplets) {
  std::vector<TripletIdx> out;
  const int n = static_cast<int>(pool.size());
  if (n < 3 || max_triplets <= 0) return out;
  const int attempts = max_triplets * 8;
  for (int t = 0; t < attempts && static_cast<int>(out.size()) < max_triplets; ++t) {
    int a = rng.uniform_int(0, n - 1);
    int p = rng.uniform_int(0, n - 1);
    int q = rng.uniform_int(0, n - 1);
    if (a == p || a == q || p == q) continue;
    double sp = similarity(pool[static_cast<size_t>(a)].label,
                           pool[static_cast<size_t>(p)].label);
    double sn = similarity(pool[static_cast<size_t>(a)].label,
                           pool[static_cast<size_t>(q)].label);
    if (sp > sn) out.push_back({a, p, q});
    else if (sn > sp) out.push_back({a, q, p});
  }
  return out;
}

namespace {

double sqdist(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double metric_loss(const std::vector<PoolEntry>& pool,
                   const std::vector<TripletIdx>& triplets, double alpha) {
  double loss = 0.0;
  for (const auto& t : triplets) {
    const Tensor& a = pool[static_cast<size_t>(t.anchor)].vec;
    const Tensor& p = pool[static_cast<size_t>(t.positive)].vec;
    const Tensor& n = pool[static_cast<size_t>(t.negative)].vec;
    double v = sqdist(a, p) - sqdist(a, n) + alpha;
    if (v > 0.0) loss += v;
  }
  return loss;
}

void metric_loss_backward(const std::vector<PoolEntry>& pool,
                          const std::vector<TripletIdx>& triplets, double alpha,
                          double scale, std::vector<Tensor>& dvecs) {
  for (const auto& t : triplets) {
    const Tensor& a = pool[static_cast<size_t>(t.anchor)].vec;
    const Tensor& p = pool[static_cast<size_t>(t.positive)].vec;
    const Tensor& n = pool[static_cast<size_t>(t.negative)].vec;
    double v = sqdist(a, p) - sqdist(a, n) + alpha;
    if (v <= 0.0) continue;
    Tensor& da = dvecs[static_cast<size_t>(t.anchor)];
    Tensor& dp = dvecs[static_cast<size_t>(t.positive)];
    Tensor& dn = dvecs[static_cast<size_t>(t.negative)];
    for (int64_t i = 0; i < a.size(); ++i) {
      da[i] += scale * 2.0 * (n[i] - p[i]);
      dp[i] += scale * 2.0 * (p[i] - a[i]);
      dn[i] += scale * 2.0 * (a[i] - n[i]);
    }
  }
}

}  // namespace attgrasp::learn
