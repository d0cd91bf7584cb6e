#include "attgrasp/net/model.h"

#include <cmath>

#include "attgrasp/errors.h"
#include "attgrasp/imageops.h"

namespace attgrasp::net {

namespace {

Tensor as_rank3(const Tensor& t2) {
  Tensor t = Tensor::zeros3(t2.rows(), t2.cols(), 1);
  for (int64_t i = 0; i < t2.size(); ++i) t[i] = t2[i];
  return t;
}

Tensor as_rank2(const Tensor& t3) {
  Tensor t = Tensor::zeros2(t3.rows(), t3.cols());
  for (int64_t i = 0; i < t3.size(); ++i) t[i] = t3[i];
  return t;
}

}  // namespace

Model::Model(ModelConfig cfg, Vocabulary vocab, uint64_t seed)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  Rng rng(mix64(seed ^ 0x4e7a11ULL));
  enc1_.build(cfg_.in_channels, cfg_.enc1, 3, 2, rng);
  enc2_.build(cfg_.enc1, cfg_.enc2, 3, 2, rng);
  enc3_.build(cfg_.enc2, cfg_.enc3, 3, 2, rng);
  enc4_.build(cfg_.enc3, cfg_.embed_dim, 3, 1, rng);

  if (cfg_.text_mode == TextMode::cbow) {
    emb_ = Tensor::zeros2(vocab_.size(), cfg_.token_dim);
    for (int64_t i = 0; i < emb_.size(); ++i) emb_[i] = 0.3 * rng.normal();
    t1_.build(cfg_.token_dim, cfg_.text_hidden, rng);
    t2_.build(cfg_.text_hidden, cfg_.text_hidden, rng);
    t3_.build(cfg_.text_hidden, cfg_.embed_dim, rng);
  } else if (cfg_.text_mode == TextMode::attr_id) {
    t1_.build(vocab_.size(), cfg_.text_hidden, rng);
    t2_.build(cfg_.text_hidden, cfg_.text_hidden, rng);
    t3_.build(cfg_.text_hidden, cfg_.embed_dim, rng);
  }

  d_entry_.build(cfg_.embed_dim, cfg_.dec_entry, 1, 1, rng);
  for (auto& block : d_res_) {
    block[0].build(cfg_.dec_entry, cfg_.dec_entry, 3, 1, rng);
    block[1].build(cfg_.dec_entry, cfg_.dec_entry, 3, 1, rng);
  }
  d_reduce_.build(cfg_.dec_entry, cfg_.dec_mid, 1, 1, rng);
  d_late_.build(cfg_.dec_mid, cfg_.dec_late, 3, 1, rng);
  d_head_.build(cfg_.dec_late, 1, 1, 1, rng);
  // start affordances near 0.1 so the background penalty is tame at init
  d_head_.b[0] = std::log(0.1 / 0.9);

  dom1_.build(cfg_.embed_dim, cfg_.dom_hidden, rng);
  dom2_.build(cfg_.dom_hidden, 1, rng);

  register_params();
}

Model::Model(const Model& o)
    : cfg_(o.cfg_),
      vocab_(o.vocab_),
      enc1_(o.enc1_),
      enc2_(o.enc2_),
      enc3_(o.enc3_),
      enc4_(o.enc4_),
      emb_(o.emb_),
      t1_(o.t1_),
      t2_(o.t2_),
      t3_(o.t3_),
      d_entry_(o.d_entry_),
      d_res_(o.d_res_),
      d_reduce_(o.d_reduce_),
      d_late_(o.d_late_),
      d_head_(o.d_head_),
      dom1_(o.dom1_),
      dom2_(o.dom2_) {
  register_params();
}

Model& Model::operator=(const Model& o) {
  if (this != &o) {
    cfg_ = o.cfg_;
    vocab_ = o.vocab_;
    enc1_ = o.enc1_;
    enc2_ = o.enc2_;
    enc3_ = o.enc3_;
    enc4_ = o.enc4_;
    emb_ = o.emb_;
    t1_ = o.t1_;
    t2_ = o.t2_;
    t3_ = o.t3_;
    d_entry_ = o.d_entry_;
    d_res_ = o.d_res_;
    d_reduce_ = o.d_reduce_;
    d_late_ = o.d_late_;
    d_head_ = o.d_head_;
    dom1_ = o.dom1_;
    dom2_ = o.dom2_;
    register_params();
  }
  return *this;
}

Model::Model(Model&& o) noexcept
    : cfg_(std::move(o.cfg_)),
      vocab_(std::move(o.vocab_)),
      enc1_(std::move(o.enc1_)),
      enc2_(std::move(o.enc2_)),
      enc3_(std::move(o.enc3_)),
      enc4_(std::move(o.enc4_)),
      emb_(std::move(o.emb_)),
      t1_(std::move(o.t1_)),
      t2_(std::move(o.t2_)),
      t3_(std::move(o.t3_)),
      d_entry_(std::move(o.d_entry_)),
      d_res_(std::move(o.d_res_)),
      d_reduce_(std::move(o.d_reduce_)),
      d_late_(std::move(o.d_late_)),
      d_head_(std::move(o.d_head_)),
      dom1_(std::move(o.dom1_)),
      dom2_(std::move(o.dom2_)) {
  register_params();
}

Model& Model::operator=(Model&& o) noexcept {
  if (this != &o) {
    cfg_ = std::move(o.cfg_);
    vocab_ = std::move(o.vocab_);
    enc1_ = std::move(o.enc1_);
    enc2_ = std::move(o.enc2_);
    enc3_ = std::move(o.enc3_);
    enc4_ = std::move(o.enc4_);
    emb_ = std::move(o.emb_);
    t1_ = std::move(o.t1_);
    t2_ = std::move(o.t2_);
    t3_ = std::move(o.t3_);
    d_entry_ = std::move(o.d_entry_);
    d_res_ = std::move(o.d_res_);
    d_reduce_ = std::move(o.d_reduce_);
    d_late_ = std::move(o.d_late_);
    d_head_ = std::move(o.d_head_);
    dom1_ = std::move(o.dom1_);
    dom2_ = std::move(o.dom2_);
    register_params();
  }
  return *this;
}

void Model::register_params() {
  registry_.clear();
  auto add = [&](const std::string& name, Tensor& t) { registry_.push_back({name, &t}); };
  add("enc.conv1.w", enc1_.w);
  add("enc.conv1.b", enc1_.b);
  add("enc.conv2.w", enc2_.w);
  add("enc.conv2.b", enc2_.b);
  add("enc.conv3.w", enc3_.w);
  add("enc.conv3.b", enc3_.b);
  add("enc.conv4.w", enc4_.w);
  add("enc.conv4.b", enc4_.b);
  if (cfg_.text_mode == TextMode::cbow) add("text.emb", emb_);
  if (cfg_.text_mode != TextMode::none) {
    add("text.fc1.w", t1_.w);
    add("text.fc1.b", t1_.b);
    add("text.fc2.w", t2_.w);
    add("text.fc2.b", t2_.b);
    add("text.fc3.w", t3_.w);
    add("text.fc3.b", t3_.b);
  }
  add("dec.entry.w", d_entry_.w);
  add("dec.entry.b", d_entry_.b);
  for (int i = 0; i < 3; ++i) {
    std::string p = "dec.res" + std::to_string(i + 1);
    add(p + ".conv1.w", d_res_[static_cast<size_t>(i)][0].w);
    add(p + ".conv1.b", d_res_[static_cast<size_t>(i)][0].b);
    add(p + ".conv2.w", d_res_[static_cast<size_t>(i)][1].w);
    add(p + ".conv2.b", d_res_[static_cast<size_t>(i)][1].b);
  }
  add("dec.reduce.w", d_reduce_.w);
  add("dec.reduce.b", d_reduce_.b);
  add("dec.late.w", d_late_.w);
  add("dec.late.b", d_late_.b);
  add("dec.head.w", d_head_.w);
  add("dec.head.b", d_head_.b);
  add("dom.fc1.w", dom1_.w);
  add("dom.fc1.b", dom1_.b);
  add("dom.fc2.w", dom2_.w);
  add("dom.fc2.b", dom2_.b);
}

std::vector<ParamRef> Model::params() { return registry_; }

std::vector<std::pair<std::string, const Tensor*>> Model::params_const() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(registry_.size());
  for (const auto& p : registry_) out.emplace_back(p.name, p.value);
  return out;
}

Grads Model::make_grads() const {
  Grads g;
  g.g.reserve(registry_.size());
  for (const auto& p : registry_) {
    Tensor t;
    if (p.value->ndim() == 1) t = Tensor::zeros1(p.value->dim(0));
    else if (p.value->ndim() == 2) t = Tensor::zeros2(p.value->dim(0), p.value->dim(1));
    else t = Tensor::zeros3(p.value->dim(0), p.value->dim(1), p.value->dim(2));
    g.g.push_back(std::move(t));
  }
  return g;
}

Tensor Model::assemble_input(const sim::Heightmap& hm) const {
  const int n = cfg_.image_size;
  hm.rgb.check_shape(n, n, 3, "heightmap rgb");
  hm.depth.check_shape(n, n, 1, "heightmap depth");
  Tensor x = Tensor::zeros3(n, n, cfg_.in_channels);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (int k = 0; k < 3; ++k) x.at(r, c, k) = hm.rgb.at(r, c, k);
      x.at(r, c, 3) = hm.depth.at(r, c) * cfg_.depth_scale;
    }
  }
  return x;
}

const Tensor& Model::encode_image(const sim::Heightmap& hm, EncoderWs& ws) const {
  ws.x = assemble_input(hm);
  const int n = cfg_.image_size;
  ws.a1 = Tensor::zeros3(n / 2, n / 2, cfg_.enc1);
  ws.a2 = Tensor::zeros3(n / 4, n / 4, cfg_.enc2);
  ws.a3 = Tensor::zeros3(n / 8, n / 8, cfg_.enc3);
  ws.a4 = Tensor::zeros3(n / 8, n / 8, cfg_.embed_dim);
  enc1_.forward(ws.x, ws.a1, ws.scratch);
  relu_inplace(ws.a1);
  enc2_.forward(ws.a1, ws.a2, ws.scratch);
  relu_inplace(ws.a2);
  enc3_.forward(ws.a2, ws.a3, ws.scratch);
  relu_inplace(ws.a3);
  enc4_.forward(ws.a3, ws.a4, ws.scratch);
  relu_inplace(ws.a4);
  ws.dphi = Tensor::zeros3(n / 8, n / 8, cfg_.embed_dim);
  ws.live = true;
  return ws.a4;
}

const Tensor& Model::encode_text(const QueryText& text, TextWs& ws) const {
  if (cfg_.text_mode == TextMode::none)
    throw PreconditionError("text encoder disabled in this configuration");
  ws.ids.clear();
  for (const auto& tok : text.tokens) ws.ids.push_back(vocab_.id(tok));
  if (ws.ids.empty()) throw PreconditionError("empty query text");

  if (cfg_.text_mode == TextMode::cbow) {
    ws.input = Tensor::zeros1(cfg_.token_dim);
    for (int id : ws.ids)
      for (int d = 0; d < cfg_.token_dim; ++d) ws.input[d] += emb_.at(id, d);
    for (int d = 0; d < cfg_.token_dim; ++d)
      ws.input[d] /= static_cast<double>(ws.ids.size());
  } else {
    ws.input = Tensor::zeros1(vocab_.size());
    for (int id : ws.ids) ws.input[id] = 1.0;
  }

  ws.h1 = Tensor::zeros1(cfg_.text_hidden);
  ws.h2 = Tensor::zeros1(cfg_.text_hidden);
  ws.vec = Tensor::zeros1(cfg_.embed_dim);
  t1_.forward(ws.input, ws.h1);
  relu_inplace(ws.h1);
  t2_.forward(ws.h1, ws.h2);
  relu_inplace(ws.h2);
  t3_.forward(ws.h2, ws.vec);
  ws.dvec = Tensor::zeros1(cfg_.embed_dim);
  ws.live = true;
  return ws.vec;
}

Tensor Model::fuse(const Tensor& phi_v, const Tensor& phi_t) {
  if (phi_v.channels() != phi_t.dim(0))
    throw DimensionMismatch("fusion channel dims differ: " +
                            std::to_string(phi_v.channels()) + " vs " +
                            std::to_string(phi_t.dim(0)));
  Tensor f = Tensor::zeros3(phi_v.rows(), phi_v.cols(), phi_v.channels());
  const int c = phi_v.channels();
  for (int64_t i = 0; i < phi_v.size(); ++i) f[i] = phi_v[i] * phi_t[i % c];
  return f;
}

Tensor Model::fuse_for_mode(const Tensor& phi_v, const TextWs* text) const {
  if (cfg_.text_mode == TextMode::none || text == nullptr) {
    Tensor f = phi_v;
    return f;
  }
  return fuse(phi_v, text->vec);
}

const Tensor& Model::decode_one(const Tensor& fused, int angle_index, DecodeWs& ws) const {
  const int fs = cfg_.feature_size();
  fused.check_shape(fs, fs, cfg_.embed_dim, "fusion tensor");
  ws.angle_index = angle_index;
  ws.rot = rotate_image(fused, cfg_.decode_rotation(angle_index));

  ws.entry = Tensor::zeros3(fs, fs, cfg_.dec_entry);
  d_entry_.forward(ws.rot, ws.entry, ws.scratch);
  relu_inplace(ws.entry);

  const Tensor* in = &ws.entry;
  for (int i = 0; i < cfg_.dec_res_blocks; ++i) {
    auto& mid = ws.block_mid[static_cast<size_t>(i)];
    auto& out = ws.block_out[static_cast<size_t>(i)];
    mid = Tensor::zeros3(fs, fs, cfg_.dec_entry);
    out = Tensor::zeros3(fs, fs, cfg_.dec_entry);
    d_res_[static_cast<size_t>(i)][0].forward(*in, mid, ws.scratch);
    relu_inplace(mid);
    d_res_[static_cast<size_t>(i)][1].forward(mid, out, ws.scratch);
    for (int64_t j = 0; j < out.size(); ++j) out[j] += (*in)[j];
    relu_inplace(out);
    in = &out;
  }

  ws.reduced = Tensor::zeros3(fs, fs, cfg_.dec_mid);
  d_reduce_.forward(*in, ws.reduced, ws.scratch);
  relu_inplace(ws.reduced);
  ws.up4 = upsample_bilinear(ws.reduced, 4);
  ws.late = Tensor::zeros3(fs * 4, fs * 4, cfg_.dec_late);
  d_late_.forward(ws.up4, ws.late, ws.scratch);
  relu_inplace(ws.late);
  ws.up2 = upsample_bilinear(ws.late, 2);
  ws.prob = Tensor::zeros3(cfg_.image_size, cfg_.image_size, 1);
  d_head_.forward(ws.up2, ws.prob, ws.scratch);
  sigmoid_inplace(ws.prob);
  Tensor counter = rotate_image(ws.prob, cfg_.angle_of(angle_index));
  ws.map = as_rank2(counter);
  return ws.map;
}

AffordanceMaps Model::decode_affordances(const Tensor& fused) const {
  AffordanceMaps maps;
  DecodeWs ws;
  for (int k = 0; k < cfg_.num_angles; ++k) {
    decode_one(fused, k, ws);
    maps.maps.push_back(ws.map);
  }
  return maps;
}

Tensor Model::visual_vector(const EncoderWs& ws) const {
  Tensor v = Tensor::zeros1(cfg_.embed_dim);
  gap_forward(ws.a4, v);
  return v;
}

Tensor Model::attention_heatmap(const Tensor& phi_v, const Tensor& phi_t) {
  if (phi_v.channels() != phi_t.dim(0))
    throw DimensionMismatch("attention channel dims differ");
  Tensor out = Tensor::zeros2(phi_v.rows(), phi_v.cols());
  const int c = phi_v.channels();
  for (int r = 0; r < phi_v.rows(); ++r)
    for (int col = 0; col < phi_v.cols(); ++col) {
      double dot = 0.0;
      for (int k = 0; k < c; ++k) dot += phi_v.at(r, col, k) * phi_t[k];
      out.at(r, col) = dot;
    }
  return out;
}

double Model::classify_domain(const Tensor& vec, DomainWs& ws) const {
  ws.h = Tensor::zeros1(cfg_.dom_hidden);
  ws.logit = Tensor::zeros1(1);
  dom1_.forward(vec, ws.h);
  relu_inplace(ws.h);
  dom2_.forward(ws.h, ws.logit);
  return ws.logit[0];
}

AffordanceMaps Model::predict(const sim::Heightmap& hm, const QueryText& text) const {
  EncoderWs enc;
  encode_image(hm, enc);
  Tensor fused;
  if (cfg_.text_mode == TextMode::none) {
    fused = fuse_for_mode(enc.a4, nullptr);
  } else {
    TextWs tw;
    encode_text(text, tw);
    fused = fuse_for_mode(enc.a4, &tw);
  }
  return decode_affordances(fused);
}

Tensor Model::attention_from(const sim::Heightmap& hm, const QueryText& text) const {
  EncoderWs enc;
  encode_image(hm, enc);
  TextWs tw;
  encode_text(text, tw);
  return attention_heatmap(enc.a4, tw.vec);
}

void Model::decode_one_backward(const Tensor& fused, DecodeWs& ws, const Tensor& dmap,
                                Tensor& dfused, Grads& grads) const {
  const int fs = cfg_.feature_size();
  const int n = cfg_.image_size;
  auto slot = [&](const std::string& name) -> Tensor& {
    for (size_t i = 0; i < registry_.size(); ++i)
      if (registry_[i].name == name) return grads.g[i];
    throw Error("unknown grad slot: " + name);
  };

  // counter-rotation transpose
  Tensor dprob = Tensor::zeros3(n, n, 1);
  rotate_image_backward(as_rank3(dmap), cfg_.angle_of(ws.angle_index), dprob);
  // sigmoid'
  for (int64_t i = 0; i < dprob.size(); ++i)
    dprob[i] *= ws.prob[i] * (1.0 - ws.prob[i]);

  Tensor du2 = Tensor::zeros3(n, n, cfg_.dec_late);
  d_head_.backward(ws.up2, dprob, &du2, slot("dec.head.w"), slot("dec.head.b"),
                   ws.scratch);

  Tensor dlate = Tensor::zeros3(fs * 4, fs * 4, cfg_.dec_late);
  upsample_bilinear_backward(du2, 2, dlate);
  Tensor dlate_pre = Tensor::zeros3(fs * 4, fs * 4, cfg_.dec_late);
  relu_backward(dlate, ws.late, dlate_pre);
  Tensor du4 = Tensor::zeros3(fs * 4, fs * 4, cfg_.dec_mid);
  d_late_.backward(ws.up4, dlate_pre, &du4, slot("dec.late.w"), slot("dec.late.b"),
                   ws.scratch);

  Tensor dred = Tensor::zeros3(fs, fs, cfg_.dec_mid);
  upsample_bilinear_backward(du4, 4, dred);
  Tensor dred_pre = Tensor::zeros3(fs, fs, cfg_.dec_mid);
  relu_backward(dred, ws.reduced, dred_pre);
  Tensor dblock = Tensor::zeros3(fs, fs, cfg_.dec_entry);
  const Tensor& last_out = ws.block_out[static_cast<size_t>(cfg_.dec_res_blocks - 1)];
  d_reduce_.backward(last_out, dred_pre, &dblock, slot("dec.reduce.w"),
                     slot("dec.reduce.b"), ws.scratch);

  for (int i = cfg_.dec_res_blocks - 1; i >= 0; --i) {
    const Tensor& in =
        i == 0 ? ws.entry : ws.block_out[static_cast<size_t>(i - 1)];
    const Tensor& mid = ws.block_mid[static_cast<size_t>(i)];
    const Tensor& out = ws.block_out[static_cast<size_t>(i)];
    Tensor dsum = Tensor::zeros3(fs, fs, cfg_.dec_entry);
    relu_backward(dblock, out, dsum);
    Tensor din = Tensor::zeros3(fs, fs, cfg_.dec_entry);
    // skip connection
    for (int64_t j = 0; j < din.size(); ++j) din[j] = dsum[j];
    Tensor dmid = Tensor::zeros3(fs, fs, cfg_.dec_entry);
    std::string p = "dec.res" + std::to_string(i + 1);
    d_res_[static_cast<size_t>(i)][1].backward(mid, dsum, &dmid, slot(p + ".conv2.w"),
                                               slot(p + ".conv2.b"), ws.scratch);
    Tensor dmid_pre = Tensor::zeros3(fs, fs, cfg_.dec_entry);
    relu_backward(dmid, mid, dmid_pre);
    d_res_[static_cast<size_t>(i)][0].backward(in, dmid_pre, &din, slot(p + ".conv1.w"),
                                               slot(p + ".conv1.b"), ws.scratch);
    dblock = std::move(din);
  }

  Tensor dentry_pre = Tensor::zeros3(fs, fs, cfg_.dec_entry);
  relu_backward(dblock, ws.entry, dentry_pre);
  Tensor drot = Tensor::zeros3(fs, fs, cfg_.embed_dim);
  d_entry_.backward(ws.rot, dentry_pre, &drot, slot("dec.entry.w"), slot("dec.entry.b"),
                    ws.scratch);
  (void)fused;
  rotate_image_backward(drot, cfg_.decode_rotation(ws.angle_index), dfused);
}

void Model::fuse_backward(const Tensor& dfused, EncoderWs& enc, TextWs* text) const {
  const int c = cfg_.embed_dim;
  if (cfg_.text_mode == TextMode::none || text == nullptr) {
    for (int64_t i = 0; i < dfused.size(); ++i) enc.dphi[i] += dfused[i];
    return;
  }
  for (int64_t i = 0; i < dfused.size(); ++i) {
    int ch = static_cast<int>(i % c);
    enc.dphi[i] += dfused[i] * text->vec[ch];
    text->dvec[ch] += dfused[i] * enc.a4[i];
  }
}

void Model::gap_backward_into(const Tensor& dvec, EncoderWs& enc) const {
  gap_backward(dvec, enc.dphi);
}

void Model::encoder_backward(EncoderWs& ws, Grads& grads) const {
  auto slot = [&](const std::string& name) -> Tensor& {
    for (size_t i = 0; i < registry_.size(); ++i)
      if (registry_[i].name == name) return grads.g[i];
    throw Error("unknown grad slot: " + name);
  };
  const int n = cfg_.image_size;
  Tensor da4 = Tensor::zeros3(n / 8, n / 8, cfg_.embed_dim);
  relu_backward(ws.dphi, ws.a4, da4);
  Tensor da3 = Tensor::zeros3(n / 8, n / 8, cfg_.enc3);
  enc4_.backward(ws.a3, da4, &da3, slot("enc.conv4.w"), slot("enc.conv4.b"), ws.scratch);
  Tensor da3_pre = Tensor::zeros3(n / 8, n / 8, cfg_.enc3);
  relu_backward(da3, ws.a3, da3_pre);
  Tensor da2 = Tensor::zeros3(n / 4, n / 4, cfg_.enc2);
  enc3_.backward(ws.a2, da3_pre, &da2, slot("enc.conv3.w"), slot("enc.conv3.b"), ws.scratch);
  Tensor da2_pre = Tensor::zeros3(n / 4, n / 4, cfg_.enc2);
  relu_backward(da2, ws.a2, da2_pre);
  Tensor da1 = Tensor::zeros3(n / 2, n / 2, cfg_.enc1);
  enc2_.backward(ws.a1, da2_pre, &da1, slot("enc.conv2.w"), slot("enc.conv2.b"), ws.scratch);
  Tensor da1_pre = Tensor::zeros3(n / 2, n / 2, cfg_.enc1);
  relu_backward(da1, ws.a1, da1_pre);
  enc1_.backward(ws.x, da1_pre, nullptr, slot("enc.conv1.w"), slot("enc.conv1.b"),
                 ws.scratch);
  ws.dphi.fill(0.0);
}

void Model::text_backward(TextWs& ws, Grads& grads) const {
  auto slot = [&](const std::string& name) -> Tensor& {
    for (size_t i = 0; i < registry_.size(); ++i)
      if (registry_[i].name == name) return grads.g[i];
    throw Error("unknown grad slot: " + name);
  };
  Tensor dh2 = Tensor::zeros1(cfg_.text_hidden);
  t3_.backward(ws.h2, ws.dvec, &dh2, slot("text.fc3.w"), slot("text.fc3.b"));
  Tensor dh2_pre = Tensor::zeros1(cfg_.text_hidden);
  relu_backward(dh2, ws.h2, dh2_pre);
  Tensor dh1 = Tensor::zeros1(cfg_.text_hidden);
  t2_.backward(ws.h1, dh2_pre, &dh1, slot("text.fc2.w"), slot("text.fc2.b"));
  Tensor dh1_pre = Tensor::zeros1(cfg_.text_hidden);
  relu_backward(dh1, ws.h1, dh1_pre);
  Tensor dinput = Tensor::zeros1(ws.input.dim(0));
  t1_.backward(ws.input, dh1_pre, &dinput, slot("text.fc1.w"), slot("text.fc1.b"));
  if (cfg_.text_mode == TextMode::cbow) {
    Tensor& demb = slot("text.emb");
    const double inv = 1.0 / static_cast<double>(ws.ids.size());
    for (int id : ws.ids)
      for (int d = 0; d < cfg_.token_dim; ++d) demb.at(id, d) += dinput[d] * inv;
  }
  ws.dvec.fill(0.0);
}

void Model::domain_backward(const Tensor& vec, const DomainWs& ws, double dlogit,
                            Tensor* dvec, Grads& grads) const {
  auto slot = [&](const std::string& name) -> Tensor& {
    for (size_t i = 0; i < registry_.size(); ++i)
      if (registry_[i].name == name) return grads.g[i];
    throw Error("unknown grad slot: " + name);
  };
  Tensor dl = Tensor::zeros1(1);
  dl[0] = dlogit;
  Tensor dh = Tensor::zeros1(cfg_.dom_hidden);
  dom2_.backward(ws.h, dl, &dh, slot("dom.fc2.w"), slot("dom.fc2.b"));
  Tensor dh_pre = Tensor::zeros1(cfg_.dom_hidden);
  relu_backward(dh, ws.h, dh_pre);
  dom1_.backward(vec, dh_pre, dvec, slot("dom.fc1.w"), slot("dom.fc1.b"));
}

void Model::extend_vocabulary_mean_init(const std::string& name,
                                        const std::vector<std::string>& context_tokens) {
  if (cfg_.text_mode != TextMode::cbow)
    throw PreconditionError("vocabulary extension requires the CBOW text encoder");
  if (context_tokens.empty()) throw PreconditionError("context tokens required");
  Vocabulary extended = vocab_.extended(name);  // throws DuplicateToken
  Tensor new_emb = Tensor::zeros2(extended.size(), cfg_.token_dim);
  for (int64_t i = 0; i < emb_.size(); ++i) new_emb[i] = emb_[i];
  const int row = extended.size() - 1;
  for (const auto& tok : context_tokens) {
    int id = vocab_.id(tok);
    for (int d = 0; d < cfg_.token_dim; ++d) new_emb.at(row, d) += emb_.at(id, d);
  }
  for (int d = 0; d < cfg_.token_dim; ++d)
    new_emb.at(row, d) /= static_cast<double>(context_tokens.size());
  emb_ = std::move(new_emb);
  vocab_ = std::move(extended);
}

void Model::reinit_domain_classifier(uint64_t seed) {
  Rng rng(mix64(seed ^ 0xD0D0ULL));
  dom1_.build(cfg_.embed_dim, cfg_.dom_hidden, rng);
  dom2_.build(cfg_.dom_hidden, 1, rng);
}

sim::GraspAction select_action(const AffordanceMaps& maps, double eps, Rng& rng,
                               const Tensor& background_mask) {
  if (maps.maps.empty()) throw PreconditionError("no affordance maps");
  if (eps > 0.0 && rng.coin(eps)) {
    const int h = background_mask.rows(), w = background_mask.cols();
    std::vector<int> fg;
    fg.reserve(static_cast<size_t>(h) * w / 4);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        if (background_mask.at(r, c) == 0.0) fg.push_back(r * w + c);
    int pix;
    if (fg.empty()) {
      pix = static_cast<int>(rng.next_u64() % (static_cast<uint64_t>(h) * w));
    } else {
      pix = fg[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(fg.size()) - 1))];
    }
    int angle = rng.uniform_int(0, static_cast<int>(maps.maps.size()) - 1);
    return {pix / w, pix % w, angle};
  }
  sim::GraspAction best{0, 0, 0};
  double best_v = -1.0;
  for (size_t k = 0; k < maps.maps.size(); ++k) {
    const Tensor& m = maps.maps[k];
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        if (m.at(r, c) > best_v) {
          best_v = m.at(r, c);
          best = {r, c, static_cast<int>(k)};
        }
  }
  return best;
}

}  // namespace attgrasp::net
