#ifndef ATTGRASP_NET_MODEL_H_
#define ATTGRASP_NET_MODEL_H_

#include <array>
#include <string>
#include <vector>

#include "attgrasp/attributes.h"
#include "attgrasp/net/layers.h"
#include "attgrasp/rng.h"
#include "attgrasp/sim/types.h"

namespace attgrasp::net {

enum class TextMode { cbow, attr_id, none };

struct ModelConfig {
  int image_size = 96;
  int in_channels = 4;
  int embed_dim = 128;  // D: text vector dim == visual channel dim
  int token_dim = 128;  // per-token embedding width
  int enc1 = 12, enc2 = 24, enc3 = 48;  // last encoder stage has embed_dim channels
  int dec_entry = 48, dec_mid = 24, dec_late = 12;
  int dec_res_blocks = 3;
  int num_angles = 6;
  int text_hidden = 128;
  int dom_hidden = 64;
  double depth_scale = 8.0;  // input depth pre-scaling into ~unit range
  TextMode text_mode = TextMode::cbow;

  int feature_size() const { return image_size / 8; }
  double angle_of(int k) const { return k * (sim::kPi / num_angles); }
  // content rotation applied to the fusion tensor before decoding map k
  double decode_rotation(int k) const { return -angle_of(k); }
};

struct ParamRef {
  std::string name;
  Tensor* value;
};

// Per-step gradient buffers, index-aligned with Model::params().
struct Grads {
  std::vector<Tensor> g;
  void zero() {
    for (auto& t : g) t.fill(0.0);
  }
};

struct AffordanceMaps {
  std::vector<Tensor> maps;  // N tensors of H x W, values in [0, 1]
};

// ---- per-sample activation workspaces (reused across iterations) ----

struct EncoderWs {
  Tensor x;                   // assembled H x W x 4 input
  Tensor a1, a2, a3, a4;      // post-relu stage outputs
  Tensor dphi;                // accumulated upstream grad on a4
  Scratch scratch;
  bool live = false;
};

struct TextWs {
  std::vector<int> ids;
  Tensor input;               // mean embedding (cbow) or multi-hot (attr_id)
  Tensor h1, h2, vec;
  Tensor dvec;                // accumulated upstream grad on vec
  bool live = false;
};

struct DecodeWs {
  int angle_index = 0;
  Tensor rot;                             // rotated fusion tensor
  Tensor entry;                           // post-relu entry conv
  std::array<Tensor, 3> block_mid;        // post-relu conv1 of each res block
  std::array<Tensor, 3> block_out;        // post-relu block outputs
  Tensor reduced, up4, late, up2, prob;   // prob: sigmoid output (rotated frame)
  Tensor map;                             // counter-rotated workspace-frame map
  Scratch scratch;
};

struct DomainWs {
  Tensor h, logit;  // hidden (post-relu), scalar logit
};

// The differentiable model. Forward methods fill workspaces; backward methods
// consume them and accumulate parameter gradients. Inference is const and
// re-entrant; parameter mutation is the optimizer's job.
class Model {
 public:
  Model(ModelConfig cfg, Vocabulary vocab, uint64_t seed);
  // the parameter registry points into our own members; rebuild it on copy
  Model(const Model& o);
  Model& operator=(const Model& o);
  Model(Model&& o) noexcept;
  Model& operator=(Model&& o) noexcept;

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }

  std::vector<ParamRef> params();
  std::vector<std::pair<std::string, const Tensor*>> params_const() const;
  Grads make_grads() const;

  // -- forward --
  // RGB-D heightmap -> spatial features (feature_size x feature_size x D)
  const Tensor& encode_image(const sim::Heightmap& hm, EncoderWs& ws) const;
  // query text -> D-vector (order invariant: CBOW mean)
  const Tensor& encode_text(const QueryText& text, TextWs& ws) const;
  // gated attention: F[h,w,c] = phi_v[h,w,c] * phi_t[c]
  static Tensor fuse(const Tensor& phi_v, const Tensor& phi_t);
  Tensor fuse_for_mode(const Tensor& phi_v, const TextWs* text) const;
  // one angle map in the workspace frame
  const Tensor& decode_one(const Tensor& fused, int angle_index, DecodeWs& ws) const;
  AffordanceMaps decode_affordances(const Tensor& fused) const;
  // GAP of the spatial features
  Tensor visual_vector(const EncoderWs& ws) const;
  // per-pixel <phi_v[h,w,:], phi_t>
  static Tensor attention_heatmap(const Tensor& phi_v, const Tensor& phi_t);
  double classify_domain(const Tensor& vec, DomainWs& ws) const;

  // convenience: full forward from a heightmap + query
  AffordanceMaps predict(const sim::Heightmap& hm, const QueryText& text) const;
  Tensor attention_from(const sim::Heightmap& hm, const QueryText& text) const;

  // -- backward (gradients accumulate into `grads`) --
  // dmap: gradient on ws.map; adds the fusion-tensor gradient into dfused
  void decode_one_backward(const Tensor& fused, DecodeWs& ws, const Tensor& dmap,
                           Tensor& dfused, Grads& grads) const;
  // splits fusion grad into ws_enc.dphi and ws_text.dvec (or just dphi)
  void fuse_backward(const Tensor& dfused, EncoderWs& enc, TextWs* text) const;
  void gap_backward_into(const Tensor& dvec, EncoderWs& enc) const;
  void encoder_backward(EncoderWs& ws, Grads& grads) const;
  void text_backward(TextWs& ws, Grads& grads) const;
  // reversal = -lambda_r applied to the upstream gradient entering the
  // encoder path (the classifier itself gets the unreversed gradient)
  void domain_backward(const Tensor& vec, const DomainWs& ws, double dlogit,
                       Tensor* dvec, Grads& grads) const;

  Tensor assemble_input(const sim::Heightmap& hm) const;

  // appends a name token whose embedding is the mean of `context_tokens`'
  // embeddings, so the CBOW mean of (context + name) equals that of context
  void extend_vocabulary_mean_init(const std::string& name,
                                   const std::vector<std::string>& context_tokens);

  void reinit_domain_classifier(uint64_t seed);

  // direct access for checkpoints/tests
  Tensor& token_embeddings() { return emb_; }

 private:
  void register_params();

  ModelConfig cfg_;
  Vocabulary vocab_;

  Conv2D enc1_, enc2_, enc3_, enc4_;
  Tensor emb_;  // [V, token_dim]
  Linear t1_, t2_, t3_;
  Conv2D d_entry_;
  std::array<std::array<Conv2D, 2>, 3> d_res_;
  Conv2D d_reduce_, d_late_, d_head_;
  Linear dom1_, dom2_;

  std::vector<ParamRef> registry_;
};

// epsilon-greedy action selection: with prob 1-eps the argmax over all maps
// (ties -> lowest (angle, row, col)); with prob eps a uniform random
// foreground pixel (background mask 0) and uniform random angle.
sim::GraspAction select_action(const AffordanceMaps& maps, double eps, Rng& rng,
                               const Tensor& background_mask);

}  // namespace attgrasp::net

#endif  // ATTGRASP_NET_MODEL_H_
