#ifndef ATTGRASP_LEARN_EPISODE_H_
#define ATTGRASP_LEARN_EPISODE_H_

#include <memory>

#include "attgrasp/attributes.h"
#include "attgrasp/sim/types.h"
#include "attgrasp/tensor.h"

namespace attgrasp::learn {

enum class Domain { source, target };

// One replay-buffer row. Tensors are float32-quantized at creation and
// shared between a record and its hindsight relabel, so HER rows cost no
// extra image memory and serialize to the same files.
struct EpisodeRecord {
  int64_t id = 0;
  QueryText text;  // empty for the indiscriminate baseline
  sim::GraspAction action;
  double label_q = 0.0;
  Domain domain = Domain::source;
  bool her_origin = false;
  std::shared_ptr<const TensorF32> rgb, depth, mask;
  std::shared_ptr<const TensorF32> post_rgb, post_depth;  // present iff success

  bool success() const { return post_rgb != nullptr; }
  sim::Heightmap heightmap_pre() const;
  sim::Heightmap heightmap_post() const;
  Tensor mask_tensor() const { return mask->to_tensor(); }
};

EpisodeRecord make_record(int64_t id, const sim::Heightmap& pre, const Tensor& mask,
                          const QueryText& text, const sim::GraspAction& action,
                          double label_q, Domain domain,
                          const sim::Heightmap* post = nullptr);

// Hindsight relabel: a copy of `record` whose query text describes the object
// actually grasped, with label 1 and her_origin set. Only the text, label,
// and flag change (tensors are shared). Throws PreconditionError unless the
// grasp succeeded.
EpisodeRecord her_relabel(const EpisodeRecord& record, const sim::SceneObject& grasped,
                          const Vocabulary& vocab);

}  // namespace attgrasp::learn

#endif  // ATTGRASP_LEARN_EPISODE_H_
