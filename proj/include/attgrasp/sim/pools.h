#ifndef ATTGRASP_SIM_POOLS_H_
#define ATTGRASP_SIM_POOLS_H_

#include <vector>

#include "attgrasp/rng.h"
#include "attgrasp/sim/types.h"

namespace attgrasp::sim {

enum class PoolKind { basic, novel };

struct PoolSpec {
  PoolKind kind = PoolKind::basic;
  // restrict the novel pool to these indices (empty = all)
  std::vector<int> novel_subset;

  static PoolSpec basic() { return PoolSpec{}; }
  static PoolSpec novel(std::vector<int> subset = {}) {
    return PoolSpec{PoolKind::novel, std::move(subset)};
  }
};

// Draws a basic object (pose unset) with randomized color rgb, size, height
// and occasionally a texture.
SceneObject sample_basic_object(Rng& rng, const SimConfig& cfg);

// Builds a composite from its primitives. The largest-area part decides the
// color and shape attributes (ties break toward the earlier part); the name
// fills the third label slot once the vocabulary knows it.
SceneObject compose_novel_object(const std::vector<PartSpec>& parts, uint64_t rng_seed,
                                 const std::string& name = "");

// The 12 fixed composite test objects.
const std::vector<SceneObject>& novel_pool();

SceneObject sample_pool_object(Rng& rng, const SimConfig& cfg, const PoolSpec& pool);

}  // namespace attgrasp::sim

#endif  // ATTGRASP_SIM_POOLS_H_
