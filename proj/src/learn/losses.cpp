#include "attgrasp/learn/losses.h"

#include <cmath>

#include "attgrasp/errors.h"

namespace attgrasp::learn {

double motion_loss(const net::AffordanceMaps& maps, const sim::GraspAction& action,
                   double qbar, const Tensor& background_mask, double lambda_m) {
  if (action.angle_index < 0 || action.angle_index >= static_cast<int>(maps.maps.size()))
    throw IndexError("angle index outside maps");
  const Tensor& m = maps.maps[static_cast<size_t>(action.angle_index)];
  if (action.row < 0 || action.row >= m.rows() || action.col < 0 || action.col >= m.cols())
    throw IndexError("grasp pixel outside map");
  if (!background_mask.empty() &&
      (background_mask.rows() != m.rows() || background_mask.cols() != m.cols()))
    throw IndexError("mask not aligned with maps");
  return motion_loss_single(m, action.row, action.col, qbar, background_mask, lambda_m);
}

double motion_loss_single(const Tensor& map, int row, int col, double qbar,
                          const Tensor& background_mask, double lambda_m) {
  double qe = map.at(row, col);
  double loss = (qe - qbar) * (qe - qbar);
  if (lambda_m != 0.0 && !background_mask.empty()) {
    double bg = 0.0;
    for (int64_t i = 0; i < map.size(); ++i)
      if (background_mask[i] > 0.0) bg += map[i] * map[i];
    loss += lambda_m * bg;
  }
  return loss;
}

void motion_loss_backward(const Tensor& map, int row, int col, double qbar,
                          const Tensor& background_mask, double lambda_m, double scale,
                          Tensor& dmap) {
  dmap.at(row, col) += scale * 2.0 * (map.at(row, col) - qbar);
  if (lambda_m != 0.0 && !background_mask.empty()) {
    for (int64_t i = 0; i < map.size(); ++i)
      if (background_mask[i] > 0.0) dmap[i] += scale * lambda_m * 2.0 * map[i];
  }
}

double bce_with_logit(double logit, double label) {
  // numerically stable: max(z,0) - z*y + log(1 + exp(-|z|))
  double z = logit, y = label;
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

double bce_dlogit(double logit, double label) {
  return 1.0 / (1.0 + std::exp(-logit)) - label;
}

double adversarial_loss(const net::Model& model,
                        const std::vector<sim::Heightmap>& source,
                        const std::vector<sim::Heightmap>& target) {
  GradientReversal grl;  // identity on the forward pass
  double loss = 0.0;
  net::EncoderWs enc;
  net::DomainWs dom;
  for (const auto& hm : source) {
    model.encode_image(hm, enc);
    Tensor vec = grl.forward(model.visual_vector(enc));
    loss += bce_with_logit(model.classify_domain(vec, dom), 0.0);
  }
  for (const auto& hm : target) {
    model.encode_image(hm, enc);
    Tensor vec = grl.forward(model.visual_vector(enc));
    loss += bce_with_logit(model.classify_domain(vec, dom), 1.0);
  }
  return loss;
}

}  // namespace attgrasp::learn
