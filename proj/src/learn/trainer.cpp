#include "attgrasp/learn/trainer.h"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "attgrasp/learn/losses.h"
#include "attgrasp/learn/triplets.h"

namespace attgrasp::learn {

void SgdMomentum::init(net::Model& model) {
  velocity.clear();
  for (const auto& [name, t] : model.params_const()) {
    Tensor v;
    if (t->ndim() == 1) v = Tensor::zeros1(t->dim(0));
    else if (t->ndim() == 2) v = Tensor::zeros2(t->dim(0), t->dim(1));
    else v = Tensor::zeros3(t->dim(0), t->dim(1), t->dim(2));
    velocity.push_back(std::move(v));
  }
}

void SgdMomentum::step(net::Model& model, const net::Grads& grads) {
  auto params = model.params();
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i].value;
    Tensor& v = velocity[i];
    const Tensor& g = grads.g[i];
    for (int64_t j = 0; j < p.size(); ++j) {
      v[j] = momentum * v[j] + g[j] + weight_decay * p[j];
      p[j] -= lr * v[j];
    }
  }
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << "iteration,l_grasp,l_attr,success,label_q\n";
  for (const auto& r : rows) {
    os << r.iteration << "," << std::fixed << std::setprecision(6) << r.l_grasp << ","
       << r.l_attr << "," << r.success << "," << r.label_q << "\n";
  }
}

namespace {

// per-record activation bundle for one batch slot
struct SlotWs {
  net::EncoderWs enc_pre, enc_post;
  net::TextWs text;
  net::DecodeWs dec;
  Tensor fused;
  Tensor dmap, dfused;
  bool has_text = false, has_post = false;
  int pool_visual = -1, pool_text = -1;  // indices into the mining pool
};

}  // namespace

StepStats train_step(net::Model& model, const std::vector<const EpisodeRecord*>& batch,
                     const TrainConfig& cfg, SgdMomentum& opt, net::Grads& grads,
                     Rng& mine_rng) {
  StepStats stats;
  if (batch.empty()) return stats;
  const auto& mcfg = model.config();
  const int fs = mcfg.feature_size();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const bool text_enabled = mcfg.text_mode != net::TextMode::none;
  const bool metric_enabled = cfg.lambda_a > 0.0 && text_enabled;

  std::vector<SlotWs> slots(batch.size());
  std::vector<PoolEntry> pool;

  // forward pass and pool assembly
  for (size_t i = 0; i < batch.size(); ++i) {
    const EpisodeRecord& r = *batch[i];
    SlotWs& s = slots[i];
    sim::Heightmap pre = r.heightmap_pre();
    model.encode_image(pre, s.enc_pre);
    s.has_text = text_enabled && !r.text.tokens.empty();
    if (s.has_text) model.encode_text(r.text, s.text);
    s.fused = model.fuse_for_mode(s.enc_pre.a4, s.has_text ? &s.text : nullptr);
    model.decode_one(s.fused, r.action.angle_index, s.dec);

    if (metric_enabled && s.has_text) {
      AttributeLabel label = label_of_text(r.text, model.vocab(), 2);
      if (r.success() && r.label_q == 1.0) {
        sim::Heightmap post = r.heightmap_post();
        model.encode_image(post, s.enc_post);
        s.has_post = true;
        Tensor diff = model.visual_vector(s.enc_pre);
        Tensor vpost = model.visual_vector(s.enc_post);
        for (int64_t j = 0; j < diff.size(); ++j) diff[j] -= vpost[j];
        PoolEntry e;
        e.vec = std::move(diff);
        e.label = label;
        e.record = static_cast<int>(i);
        e.is_text = false;
        s.pool_visual = static_cast<int>(pool.size());
        pool.push_back(std::move(e));
      }
      PoolEntry e;
      e.vec = s.text.vec;
      e.label = label;
      e.record = static_cast<int>(i);
      e.is_text = true;
      s.pool_text = static_cast<int>(pool.size());
      pool.push_back(std::move(e));
    }
  }

  // losses
  std::vector<TripletIdx> triplets;
  double attr_scale = 0.0;
  if (metric_enabled && pool.size() >= 3) {
    triplets = mine_triplets(pool, mine_rng, cfg.max_triplets);
    if (!triplets.empty()) {
      attr_scale = cfg.lambda_a / static_cast<double>(triplets.size());
      stats.l_attr = metric_loss(pool, triplets, cfg.alpha) /
                     static_cast<double>(triplets.size());
      stats.triplets = static_cast<int>(triplets.size());
    }
  }

  std::vector<Tensor> dvecs;
  if (!triplets.empty()) {
    dvecs.assign(pool.size(), Tensor::zeros1(mcfg.embed_dim));
    metric_loss_backward(pool, triplets, cfg.alpha, attr_scale, dvecs);
  }

  // backward pass
  for (size_t i = 0; i < batch.size(); ++i) {
    const EpisodeRecord& r = *batch[i];
    SlotWs& s = slots[i];
    Tensor mask = r.mask_tensor();
    stats.l_grasp += motion_loss_single(s.dec.map, r.action.row, r.action.col, r.label_q,
                                        mask, cfg.lambda_m) *
                     inv_batch;
    s.dmap = Tensor::zeros2(mcfg.image_size, mcfg.image_size);
    motion_loss_backward(s.dec.map, r.action.row, r.action.col, r.label_q, mask,
                         cfg.lambda_m, inv_batch, s.dmap);
    s.dfused = Tensor::zeros3(fs, fs, mcfg.embed_dim);
    model.decode_one_backward(s.fused, s.dec, s.dmap, s.dfused, grads);

    if (cfg.mask_all_angles) {
      // penalize the background on the non-executed maps as well
      for (int k = 0; k < mcfg.num_angles; ++k) {
        if (k == r.action.angle_index) continue;
        net::DecodeWs aux;
        model.decode_one(s.fused, k, aux);
        double bg = 0.0;
        for (int64_t j = 0; j < aux.map.size(); ++j)
          if (mask[j] > 0.0) bg += aux.map[j] * aux.map[j];
        stats.l_grasp += cfg.lambda_m * bg * inv_batch;
        Tensor daux = Tensor::zeros2(mcfg.image_size, mcfg.image_size);
        for (int64_t j = 0; j < aux.map.size(); ++j)
          if (mask[j] > 0.0) daux[j] = inv_batch * cfg.lambda_m * 2.0 * aux.map[j];
        model.decode_one_backward(s.fused, aux, daux, s.dfused, grads);
      }
    }

    model.fuse_backward(s.dfused, s.enc_pre, s.has_text ? &s.text : nullptr);

    if (s.pool_visual >= 0 && !dvecs.empty()) {
      model.gap_backward_into(dvecs[static_cast<size_t>(s.pool_visual)], s.enc_pre);
      Tensor neg = dvecs[static_cast<size_t>(s.pool_visual)];
      for (int64_t j = 0; j < neg.size(); ++j) neg[j] = -neg[j];
      model.gap_backward_into(neg, s.enc_post);
    }
    if (s.pool_text >= 0 && !dvecs.empty()) {
      const Tensor& dv = dvecs[static_cast<size_t>(s.pool_text)];
      for (int64_t j = 0; j < dv.size(); ++j) s.text.dvec[j] += dv[j];
    }

    model.encoder_backward(s.enc_pre, grads);
    if (s.has_post) model.encoder_backward(s.enc_post, grads);
    if (s.has_text) model.text_backward(s.text, grads);
  }

  opt.step(model, grads);
  grads.zero();
  return stats;
}

namespace {

QueryText sample_query(const sim::SceneObject& obj, const Vocabulary& vocab, Rng& rng,
                       const TrainConfig& cfg) {
  AttributeLabel full = obj.attr_label.padded(2);
  double u = rng.uniform();
  AttributeLabel l = full;
  if (u >= cfg.full_query_prob) {
    if (u < cfg.full_query_prob + cfg.color_query_prob) l.values[1] = 0;  // color only
    else l.values[0] = 0;                                                 // shape only
  }
  l.values.resize(2);
  return text_of_label(l, vocab);
}

}  // namespace

CollectResult collect_and_train(net::Model& model, const sim::SimWorld& world,
                                const TrainConfig& cfg, uint64_t seed,
                                std::ostream* progress) {
  CollectResult result;
  ReplayBuffer buffer(static_cast<size_t>(cfg.buffer_capacity));
  SgdMomentum opt{cfg.lr, cfg.momentum, cfg.weight_decay, {}};
  opt.init(model);
  net::Grads grads = model.make_grads();
  int64_t next_id = 0;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const uint64_t base = mix64(seed ^ (0x9E1ULL + static_cast<uint64_t>(iter) * 7919ULL));
    Rng iter_rng(base);

    // fresh scene of basic objects
    sim::Scene scene;
    uint64_t scene_seed = mix64(base ^ 0x5CE17ULL);
    for (int attempt = 0;; ++attempt) {
      try {
        int n = iter_rng.uniform_int(cfg.min_objects, cfg.max_objects);
        scene = world.sample_scene(n, sim::PoolSpec::basic(), scene_seed,
                                   cfg.unique_attributes);
        break;
      } catch (const PlacementError&) {
        if (attempt >= 20) throw;
        scene_seed = mix64(scene_seed + 1);
      }
    }
    sim::JitterSpec jitter = cfg.collect_jitter;
    jitter.seed = mix64(base ^ 0x717E6ULL);
    auto [pre, mask] = world.render(scene, jitter);

    // query for a random object in the scene
    size_t target = static_cast<size_t>(
        iter_rng.uniform_int(0, static_cast<int>(scene.objects.size()) - 1));
    QueryText query;
    if (!cfg.indiscriminate)
      query = sample_query(scene.objects[target], model.vocab(), iter_rng, cfg);

    // epsilon-greedy action
    const double eps = cfg.epsilon_at(iter);
    sim::GraspAction action;
    if (iter_rng.coin(eps)) {
      net::AffordanceMaps dummy;
      for (int k = 0; k < model.config().num_angles; ++k)
        dummy.maps.push_back(Tensor::zeros2(model.config().image_size,
                                            model.config().image_size));
      action = net::select_action(dummy, 1.0, iter_rng, mask);
    } else {
      net::AffordanceMaps maps = model.predict(pre, query);
      action = net::select_action(maps, 0.0, iter_rng, mask);
    }

    auto [outcome, post] = world.execute_and_diff(scene, action, jitter);

    double label_q = 0.0;
    if (outcome.grasped) {
      if (cfg.indiscriminate) {
        label_q = 1.0;
      } else {
        label_q = similarity(label_of_text(query, model.vocab(), 2),
                             scene.objects[*outcome.grasped].attr_label.padded(2));
      }
    }

    EpisodeRecord rec = make_record(next_id++, pre, mask, query, action, label_q,
                                    Domain::source, outcome.grasped ? &post : nullptr);
    buffer.push(rec);
    result.dataset.push_back(rec);
    if (outcome.grasped) ++result.successes;

    if (!cfg.indiscriminate && outcome.grasped && label_q < 1.0) {
      EpisodeRecord her = her_relabel(rec, scene.objects[*outcome.grasped], model.vocab());
      her.id = next_id++;
      buffer.push(her);
      result.dataset.push_back(her);
    }

    Rng mine_rng(mix64(base ^ 0x317137ULL));
    Rng batch_rng(mix64(base ^ 0xBA7C4ULL));
    auto batch = buffer.sample_batch(batch_rng, cfg.batch_size);
    StepStats stats = train_step(model, batch, cfg, opt, grads, mine_rng);

    result.metrics.push_back({iter, stats.l_grasp, stats.l_attr,
                              outcome.grasped ? 1 : 0, label_q});
    if (progress && cfg.log_every > 0 && (iter + 1) % cfg.log_every == 0) {
      int recent = 0;
      int window = std::min<int>(200, static_cast<int>(result.metrics.size()));
      for (int j = 0; j < window; ++j)
        recent += result.metrics[result.metrics.size() - 1 - static_cast<size_t>(j)].success;
      (*progress) << "collect iter " << (iter + 1) << "/" << cfg.iterations
                  << " l_grasp " << std::fixed << std::setprecision(4) << stats.l_grasp
                  << " l_attr " << stats.l_attr << " success(recent) "
                  << static_cast<double>(recent) / window << "\n";
      progress->flush();
    }
  }

  auto replay_metrics =
      replay_dataset(model, result.dataset, cfg, cfg.replay_epochs, mix64(seed ^ 0xE90CULL),
                     progress);
  for (auto& m : replay_metrics) {
    m.iteration += cfg.iterations;
    result.metrics.push_back(m);
  }
  return result;
}

std::vector<MetricsRow> replay_dataset(net::Model& model,
                                       const std::vector<EpisodeRecord>& dataset,
                                       const TrainConfig& cfg, int epochs, uint64_t seed,
                                       std::ostream* progress) {
  std::vector<MetricsRow> metrics;
  if (dataset.empty() || epochs <= 0) return metrics;
  SgdMomentum opt{cfg.lr, cfg.momentum, cfg.weight_decay, {}};
  opt.init(model);
  net::Grads grads = model.make_grads();
  int iter = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Rng erng(mix64(seed ^ (0xE70C4ULL + static_cast<uint64_t>(epoch))));
    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    erng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      std::vector<const EpisodeRecord*> batch;
      for (size_t i = start; i < std::min(order.size(), start + static_cast<size_t>(cfg.batch_size)); ++i)
        batch.push_back(&dataset[order[i]]);
      Rng mine_rng(mix64(seed ^ (0x3117ULL + static_cast<uint64_t>(iter) * 31ULL)));
      StepStats stats = train_step(model, batch, cfg, opt, grads, mine_rng);
      metrics.push_back({iter, stats.l_grasp, stats.l_attr, 0, 0.0});
      ++iter;
    }
    if (progress) {
      (*progress) << "replay epoch " << (epoch + 1) << "/" << epochs << " l_grasp "
                  << std::fixed << std::setprecision(4)
                  << (metrics.empty() ? 0.0 : metrics.back().l_grasp) << "\n";
      progress->flush();
    }
  }
  return metrics;
}

}  // namespace attgrasp::learn
