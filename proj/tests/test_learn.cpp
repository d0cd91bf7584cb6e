#include <cmath>
#include <filesystem>
#include <sstream>

#include "attgrasp/learn/dataset.h"
#include "attgrasp/learn/losses.h"
#include "attgrasp/learn/trainer.h"
#include "attgrasp/net/checkpoint.h"
#include "doctest.h"

using namespace attgrasp;
using namespace attgrasp::learn;

namespace {

net::ModelConfig small_config() {
  net::ModelConfig c;
  c.image_size = 96;
  c.embed_dim = 32;
  c.token_dim = 16;
  c.enc1 = 6;
  c.enc2 = 8;
  c.enc3 = 12;
  c.dec_entry = 12;
  c.dec_mid = 8;
  c.dec_late = 6;
  c.text_hidden = 24;
  c.dom_hidden = 8;
  return c;
}

TrainConfig tiny_train() {
  TrainConfig cfg;
  cfg.iterations = 25;
  cfg.replay_epochs = 1;
  cfg.batch_size = 4;
  cfg.min_objects = 2;
  cfg.max_objects = 3;
  cfg.log_every = 0;
  return cfg;
}

EpisodeRecord sample_success_record(const sim::SimWorld& world, const Vocabulary& vocab) {
  sim::Scene scene = world.sample_scene(2, sim::PoolSpec::basic(), 404, true);
  auto [pre, mask] = world.render(scene, sim::JitterSpec::none());
  // find a working grasp on object 0
  for (int k = 0; k < world.config().num_angles; ++k) {
    int row = static_cast<int>(scene.objects[0].y * 96);
    int col = static_cast<int>(scene.objects[0].x * 96);
    sim::GraspAction a{row, col, k};
    auto [outcome, post] = world.execute_and_diff(scene, a, sim::JitterSpec::none());
    if (outcome.grasped && *outcome.grasped == 0) {
      QueryText q = text_of_label(scene.objects[1].attr_label.padded(2), vocab);
      double sim_q = similarity(scene.objects[1].attr_label.padded(2),
                                scene.objects[0].attr_label.padded(2));
      return make_record(0, pre, mask, q, a, sim_q, Domain::source, &post);
    }
  }
  REQUIRE(false);
  return {};
}

}  // namespace

TEST_CASE("replay buffer: FIFO eviction and without-replacement sampling") {
  ReplayBuffer buf(3);
  sim::Heightmap hm;
  hm.rgb = Tensor::zeros3(4, 4, 3);
  hm.depth = Tensor::zeros2(4, 4);
  Tensor mask = Tensor::zeros2(4, 4);
  for (int i = 0; i < 5; ++i)
    buf.push(make_record(i, hm, mask, QueryText{}, {0, 0, 0}, 0.0, Domain::source));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).id == 2);  // strictly FIFO: 0 and 1 evicted
  CHECK(buf.at(2).id == 4);

  Rng rng(5);
  auto batch = buf.sample_batch(rng, 2);
  CHECK(batch.size() == 2);
  CHECK(batch[0] != batch[1]);
  auto all = buf.sample_batch(rng, 10);
  CHECK(all.size() == 3);
  std::set<int64_t> ids;
  for (auto* r : all) ids.insert(r->id);
  CHECK(ids.size() == 3);
}

TEST_CASE("hindsight relabel changes only text, label, flag") {
  sim::SimWorld world;
  Vocabulary vocab = Vocabulary::standard();
  EpisodeRecord rec = sample_success_record(world, vocab);
  REQUIRE(rec.success());

  sim::SceneObject grasped;
  grasped.color = sim::Color::blue;
  grasped.shape = sim::Shape::sphere;
  grasped.attr_label = AttributeLabel({vocab.id("blue"), vocab.id("sphere")});
  EpisodeRecord her = her_relabel(rec, grasped, vocab);
  CHECK(her.text.str() == "blue sphere");
  CHECK(her.label_q == 1.0);
  CHECK(her.her_origin);
  // v_pre, M, a untouched; tensors shared, not copied
  CHECK(her.rgb.get() == rec.rgb.get());
  CHECK(her.depth.get() == rec.depth.get());
  CHECK(her.mask.get() == rec.mask.get());
  CHECK(her.post_rgb.get() == rec.post_rgb.get());
  CHECK(her.action.row == rec.action.row);
  CHECK(her.action.col == rec.action.col);
  CHECK(her.action.angle_index == rec.action.angle_index);

  EpisodeRecord failed = rec;
  failed.post_rgb.reset();
  failed.post_depth.reset();
  CHECK_THROWS_AS(her_relabel(failed, grasped, vocab), PreconditionError);
}

TEST_CASE("dataset round trip with shared HER tensors") {
  sim::SimWorld world;
  Vocabulary vocab = Vocabulary::standard();
  EpisodeRecord rec = sample_success_record(world, vocab);
  sim::SceneObject grasped;
  grasped.attr_label = AttributeLabel({vocab.id("red"), vocab.id("cube")});
  EpisodeRecord her = her_relabel(rec, grasped, vocab);
  her.id = 1;

  auto dir = std::filesystem::temp_directory_path() / "attgrasp_ds";
  std::filesystem::remove_all(dir);
  write_dataset(dir.string(), {rec, her});
  auto back = read_dataset(dir.string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == 0);
  CHECK(back[1].id == 1);
  CHECK(back[0].text == rec.text);
  CHECK(back[1].text.str() == "red cube");
  CHECK(back[0].label_q == rec.label_q);
  CHECK(back[1].label_q == 1.0);
  CHECK(back[1].her_origin);
  CHECK(!back[0].her_origin);
  CHECK(back[0].action.angle_index == rec.action.angle_index);
  CHECK(back[0].rgb->data == rec.rgb->data);
  CHECK(back[0].post_rgb->data == rec.post_rgb->data);
  // the relabel shares the origin's tensor files and is deduped on load
  CHECK(back[1].rgb.get() == back[0].rgb.get());
  std::filesystem::remove_all(dir);
}

TEST_CASE("collect_and_train: deterministic loss curves, buffer fills") {
  sim::SimWorld world;
  TrainConfig cfg = tiny_train();

  net::Model m1(small_config(), Vocabulary::standard(16), 7);
  auto r1 = collect_and_train(m1, world, cfg, 1234);
  net::Model m2(small_config(), Vocabulary::standard(16), 7);
  auto r2 = collect_and_train(m2, world, cfg, 1234);

  CHECK(r1.dataset.size() >= 25);  // every iteration labeled, HER rows extra
  REQUIRE(r1.metrics.size() == r2.metrics.size());
  for (size_t i = 0; i < r1.metrics.size(); ++i) {
    CHECK(r1.metrics[i].l_grasp == r2.metrics[i].l_grasp);
    CHECK(r1.metrics[i].l_attr == r2.metrics[i].l_attr);
    CHECK(r1.metrics[i].success == r2.metrics[i].success);
  }
  // parameters bit-identical after the same run
  auto p1 = m1.params_const(), p2 = m2.params_const();
  for (size_t i = 0; i < p1.size(); ++i)
    for (int64_t j = 0; j < p1[i].second->size(); ++j)
      CHECK((*p1[i].second)[j] == (*p2[i].second)[j]);

  // a different seed diverges
  net::Model m3(small_config(), Vocabulary::standard(16), 7);
  auto r3 = collect_and_train(m3, world, cfg, 4321);
  bool any_diff = false;
  for (size_t i = 0; i < std::min(r1.metrics.size(), r3.metrics.size()); ++i)
    if (r1.metrics[i].l_grasp != r3.metrics[i].l_grasp) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("lambda_a = 0 disables the metric path entirely") {
  sim::SimWorld world;
  TrainConfig cfg = tiny_train();
  cfg.lambda_a = 0.0;
  net::Model m1(small_config(), Vocabulary::standard(16), 3);
  auto r1 = collect_and_train(m1, world, cfg, 99);
  for (const auto& row : r1.metrics) CHECK(row.l_attr == 0.0);

  // with the metric loss on, the trajectories must diverge (sanity)
  TrainConfig cfg2 = tiny_train();
  cfg2.lambda_a = 1.0;
  net::Model m2(small_config(), Vocabulary::standard(16), 3);
  auto r2 = collect_and_train(m2, world, cfg2, 99);
  bool attr_seen = false;
  for (const auto& row : r2.metrics) attr_seen = attr_seen || row.l_attr != 0.0;
  CHECK(attr_seen);
}

TEST_CASE("training on a fixed record drives its loss down") {
  sim::SimWorld world;
  Vocabulary vocab = Vocabulary::standard(16);
  net::Model model(small_config(), vocab, 21);
  EpisodeRecord rec = sample_success_record(world, vocab);

  TrainConfig cfg = tiny_train();
  cfg.lr = 5e-3;
  SgdMomentum opt{cfg.lr, cfg.momentum, cfg.weight_decay, {}};
  opt.init(model);
  net::Grads grads = model.make_grads();
  Rng mine(5);
  std::vector<const EpisodeRecord*> batch = {&rec};
  double first = train_step(model, batch, cfg, opt, grads, mine).l_grasp;
  double last = first;
  for (int i = 0; i < 60; ++i) last = train_step(model, batch, cfg, opt, grads, mine).l_grasp;
  CHECK(last < first);
  CHECK(last < 0.5 * first);
}

TEST_CASE("adversarial op: classifier alone separates frozen features") {
  net::Model model(small_config(), Vocabulary::standard(16), 31);
  model.reinit_domain_classifier(5);
  Rng rng(17);
  const int d = 32;
  auto draw = [&](double mu) {
    Tensor v = Tensor::zeros1(d);
    for (int i = 0; i < d; ++i) v[i] = mu + 0.3 * rng.normal();
    return v;
  };
  std::vector<Tensor> vecs;
  std::vector<double> labels;
  for (int i = 0; i < 60; ++i) {
    vecs.push_back(draw(i % 2 ? 0.4 : -0.4));
    labels.push_back(i % 2 ? 1.0 : 0.0);
  }
  SgdMomentum opt{0.05, 0.9, 0.0, {}};
  opt.init(model);
  net::Grads grads = model.make_grads();
  for (int step = 0; step < 200; ++step) {
    for (size_t i = 0; i < vecs.size(); ++i) {
      net::DomainWs ws;
      double logit = model.classify_domain(vecs[i], ws);
      model.domain_backward(vecs[i], ws, bce_dlogit(logit, labels[i]) / vecs.size(),
                            nullptr, grads);
    }
    opt.step(model, grads);
    grads.zero();
  }
  int correct = 0;
  for (size_t i = 0; i < vecs.size(); ++i) {
    net::DomainWs ws;
    double p = 1.0 / (1.0 + std::exp(-model.classify_domain(vecs[i], ws)));
    if ((p > 0.5) == (labels[i] > 0.5)) ++correct;
  }
  CHECK(static_cast<double>(correct) / vecs.size() >= 0.95);
}

TEST_CASE("adversarial op: GRL training on toy two-domain Gaussians") {
  // linear encoder + domain classifier trained jointly through the GRL: the
  // encoder should collapse the domain signal, leaving held-out accuracy
  // near chance
  Rng rng(23);
  const int in_d = 4, feat_d = 8;
  net::Linear enc, cls1, cls2;
  enc.build(in_d, feat_d, rng);
  cls1.build(feat_d, 8, rng);
  cls2.build(8, 1, rng);
  GradientReversal grl{1.0};

  auto draw = [&](Rng& r, double mu) {
    Tensor x = Tensor::zeros1(in_d);
    for (int i = 0; i < in_d; ++i) x[i] = mu + r.normal();
    return x;
  };
  auto forward = [&](const Tensor& x, Tensor& feat, Tensor& h) {
    feat = Tensor::zeros1(feat_d);
    enc.forward(x, feat);
    Tensor rev = grl.forward(feat);
    h = Tensor::zeros1(8);
    cls1.forward(rev, h);
    net::relu_inplace(h);
    Tensor logit = Tensor::zeros1(1);
    cls2.forward(h, logit);
    return logit[0];
  };

  Tensor g_enc_w = Tensor::zeros2(in_d, feat_d), g_enc_b = Tensor::zeros1(feat_d);
  Tensor g_c1w = Tensor::zeros2(feat_d, 8), g_c1b = Tensor::zeros1(8);
  Tensor g_c2w = Tensor::zeros2(8, 1), g_c2b = Tensor::zeros1(1);
  double lr = 0.02;
  for (int step = 0; step < 2500; ++step) {
    Rng srng(mix64(1000 + static_cast<uint64_t>(step)));
    double label = step % 2 ? 1.0 : 0.0;
    Tensor x = draw(srng, label > 0.5 ? 0.8 : -0.8);
    Tensor feat, h;
    double logit = forward(x, feat, h);
    Tensor dlogit = Tensor::zeros1(1);
    dlogit[0] = bce_dlogit(logit, label);
    Tensor dh = Tensor::zeros1(8);
    cls2.backward(h, dlogit, &dh, g_c2w, g_c2b);
    Tensor dh_pre = Tensor::zeros1(8);
    net::relu_backward(dh, h, dh_pre);
    Tensor dfeat = Tensor::zeros1(feat_d);
    cls1.backward(feat, dh_pre, &dfeat, g_c1w, g_c1b);
    Tensor dfeat_rev = grl.backward(dfeat);  // encoder sees the reversed sign
    enc.backward(x, dfeat_rev, nullptr, g_enc_w, g_enc_b);
    auto apply = [&](Tensor& p, Tensor& g) {
      for (int64_t i = 0; i < p.size(); ++i) {
        p[i] -= lr * g[i];
        g[i] = 0.0;
      }
    };
    apply(enc.w, g_enc_w);
    apply(enc.b, g_enc_b);
    apply(cls1.w, g_c1w);
    apply(cls1.b, g_c1b);
    apply(cls2.w, g_c2w);
    apply(cls2.b, g_c2b);
  }
  // held-out accuracy should sit in the near-chance band
  int correct = 0;
  const int n_test = 400;
  for (int i = 0; i < n_test; ++i) {
    Rng trng(mix64(777777 + static_cast<uint64_t>(i)));
    double label = i % 2 ? 1.0 : 0.0;
    Tensor x = draw(trng, label > 0.5 ? 0.8 : -0.8);
    Tensor feat, h;
    double logit = forward(x, feat, h);
    if ((logit > 0) == (label > 0.5)) ++correct;
  }
  double acc = static_cast<double>(correct) / n_test;
  CHECK(acc >= 0.4);
  CHECK(acc <= 0.65);
}

TEST_CASE("adversarial loss value: logit zero gives (ns+nt) ln 2") {
  net::Model model(small_config(), Vocabulary::standard(16), 41);
  // zero the classifier so every logit is exactly 0
  for (auto& p : model.params())
    if (p.name.rfind("dom.", 0) == 0) p.value->fill(0.0);
  sim::SimWorld world;
  std::vector<sim::Heightmap> source, target;
  for (uint64_t s = 0; s < 3; ++s) {
    sim::Scene sc = world.sample_scene(2, sim::PoolSpec::basic(), 100 + s, false);
    source.push_back(world.render(sc, sim::JitterSpec::none()).first);
  }
  for (uint64_t s = 0; s < 2; ++s) {
    sim::Scene sc = world.sample_scene(2, sim::PoolSpec::basic(), 200 + s, false);
    target.push_back(world.render(sc, sim::JitterSpec::full(s)).first);
  }
  double loss = adversarial_loss(model, source, target);
  CHECK(loss == doctest::Approx(5.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("metrics csv is deterministic") {
  std::vector<MetricsRow> rows = {{0, 0.5, 0.25, 1, 1.0}, {1, 0.25, 0.0, 0, 0.0}};
  std::ostringstream a, b;
  write_metrics_csv(a, rows);
  write_metrics_csv(b, rows);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("iteration,l_grasp,l_attr,success,label_q\n", 0) == 0);
}
