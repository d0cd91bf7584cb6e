#ifndef ATTGRASP_LEARN_TRIPLETS_H_
#define ATTGRASP_LEARN_TRIPLETS_H_

#include <vector>

#include "attgrasp/attributes.h"
#include "attgrasp/rng.h"
#include "attgrasp/tensor.h"

namespace attgrasp::learn {

// One embedding in the mining pool: either a visual difference
// phi_vec(v_pre) - phi_vec(v_post) or a text vector phi_t(t), tagged with its
// attribute label and the batch record it came from.
struct PoolEntry {
  Tensor vec;
  AttributeLabel label;
  int record = -1;
  bool is_text = false;
};

struct TripletIdx {
  int anchor, positive, negative;
};

// Random triple sampling; keeps (a, p, n) only when
// similarity(label_a, label_p) > similarity(label_a, label_n). Seeded and
// bounded; returns an empty list when no valid triplet exists.
std::vector<TripletIdx> mine_triplets(const std::vector<PoolEntry>& pool, Rng& rng,
                                      int max_triplets);

// sum over triplets of max(||a - p||^2 - ||a - n||^2 + alpha, 0)
double metric_loss(const std::vector<PoolEntry>& pool,
                   const std::vector<TripletIdx>& triplets, double alpha);

// d(metric)/d(pool vectors) scaled by `scale`, accumulated into dvecs
// (index-aligned with pool).
void metric_loss_backward(const std::vector<PoolEntry>& pool,
                          const std::vector<TripletIdx>& triplets, double alpha,
                          double scale, std::vector<Tensor>& dvecs);

}  // namespace attgrasp::learn

#endif  // ATTGRASP_LEARN_TRIPLETS_H_
