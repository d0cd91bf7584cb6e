#ifndef ATTGRASP_LEARN_TRAINER_H_
#define ATTGRASP_LEARN_TRAINER_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "attgrasp/learn/buffer.h"
#include "attgrasp/learn/episode.h"
#include "attgrasp/net/model.h"
#include "attgrasp/sim/world.h"

namespace attgrasp::learn {

struct TrainConfig {
  int iterations = 5000;
  int replay_epochs = 12;
  int batch_size = 8;
  int buffer_capacity = 20000;
  double lr = 1e-4;
  double momentum = 0.9;
  double weight_decay = 2e-5;
  double alpha = 0.5;       // triplet margin
  double lambda_a = 1.0;    // metric loss weight (0 = NoMetric ablation)
  double lambda_m = 0.1;    // background penalty weight
  double eps_start = 0.5, eps_end = 0.1;  // linear over the first half
  int max_triplets = 16;
  int min_objects = 3, max_objects = 5;
  bool unique_attributes = false;
  bool mask_all_angles = false;  // penalize all N maps instead of the executed one
  sim::JitterSpec collect_jitter;  // flags only; seeds derived per iteration
  double full_query_prob = 0.6, color_query_prob = 0.2;  // remainder: shape-only
  bool indiscriminate = false;  // text-free baseline with binary any-object labels
  int log_every = 50;

  double epsilon_at(int iter) const {
    int half = iterations / 2;
    if (half <= 0 || iter >= half) return eps_end;
    return eps_start + (eps_end - eps_start) * (static_cast<double>(iter) / half);
  }
};

struct SgdMomentum {
  double lr = 1e-4, momentum = 0.9, weight_decay = 2e-5;
  std::vector<Tensor> velocity;

  void init(net::Model& model);
  void step(net::Model& model, const net::Grads& grads);
};

struct MetricsRow {
  int iteration = 0;
  double l_grasp = 0.0;
  double l_attr = 0.0;
  int success = 0;
  double label_q = 0.0;
};

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);

struct StepStats {
  double l_grasp = 0.0;
  double l_attr = 0.0;
  int triplets = 0;
};

// One optimizer step on a batch: mean per-record motion loss plus
// lambda_a times the mean mined-triplet metric loss.
StepStats train_step(net::Model& model, const std::vector<const EpisodeRecord*>& batch,
                     const TrainConfig& cfg, SgdMomentum& opt, net::Grads& grads,
                     Rng& mine_rng);

struct CollectResult {
  std::vector<EpisodeRecord> dataset;
  std::vector<MetricsRow> metrics;
  int successes = 0;
};

// Online data collection with epsilon-greedy acting, hindsight relabeling and
// one training step per environment step, followed by offline replay of the
// collected dataset.
CollectResult collect_and_train(net::Model& model, const sim::SimWorld& world,
                                const TrainConfig& cfg, uint64_t seed,
                                std::ostream* progress = nullptr);

// Replay epochs over a fixed dataset (uniform shuffling per epoch).
std::vector<MetricsRow> replay_dataset(net::Model& model,
                                       const std::vector<EpisodeRecord>& dataset,
                                       const TrainConfig& cfg, int epochs, uint64_t seed,
                                       std::ostream* progress = nullptr);

}  // namespace attgrasp::learn

#endif  // ATTGRASP_LEARN_TRAINER_H_
