#ifndef ATTGRASP_LEARN_LOSSES_H_
#define ATTGRASP_LEARN_LOSSES_H_

#include <vector>

#include "attgrasp/net/model.h"
#include "attgrasp/sim/types.h"

namespace attgrasp::learn {

// Per-record motion loss term: (q_e - qbar)^2 + lambda_m * sum_{i in M} q_i^2,
// with the mask penalty taken over the executed-angle map. Throws IndexError
// if the action does not index the maps.
double motion_loss(const net::AffordanceMaps& maps, const sim::GraspAction& action,
                   double qbar, const Tensor& background_mask, double lambda_m);

// Same term on a single already-selected angle map.
double motion_loss_single(const Tensor& map, int row, int col, double qbar,
                          const Tensor& background_mask, double lambda_m);

// d(motion)/d(map) scaled by `scale`, accumulated into dmap.
void motion_loss_backward(const Tensor& map, int row, int col, double qbar,
                          const Tensor& background_mask, double lambda_m, double scale,
                          Tensor& dmap);

// Binary cross-entropy on a logit; label in {0, 1}.
double bce_with_logit(double logit, double label);
double bce_dlogit(double logit, double label);  // sigmoid(logit) - label

// Identity forward; multiplies upstream gradients by -lambda_r on backward.
struct GradientReversal {
  double lambda_r = 1.0;
  Tensor forward(const Tensor& x) const { return x; }
  Tensor backward(const Tensor& upstream) const {
    Tensor g = upstream;
    for (int64_t i = 0; i < g.size(); ++i) g[i] *= -lambda_r;
    return g;
  }
};

// Eq.-9-style adversarial objective value: sum of BCE of the domain
// classifier over source (label 0) and target (label 1) images. Forward-only;
// the adaptation trainer owns the reversed backward.
double adversarial_loss(const net::Model& model,
                        const std::vector<sim::Heightmap>& source,
                        const std::vector<sim::Heightmap>& target);

}  // namespace attgrasp::learn

#endif  // ATTGRASP_LEARN_LOSSES_H_
