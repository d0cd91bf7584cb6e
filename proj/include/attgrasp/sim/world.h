#ifndef ATTGRASP_SIM_WORLD_H_
#define ATTGRASP_SIM_WORLD_H_

#include <utility>

#include "attgrasp/rng.h"
#include "attgrasp/sim/geometry.h"
#include "attgrasp/sim/pools.h"
#include "attgrasp/sim/types.h"

namespace attgrasp::sim {

// Deterministic 2D top-down tabletop world. Every method is a pure function
// of its arguments and the held config, so instances may be shared across
// callers/threads freely.
class SimWorld {
 public:
  SimWorld() = default;
  explicit SimWorld(SimConfig cfg) : cfg_(std::move(cfg)) {}

  const SimConfig& config() const { return cfg_; }

  // Rejection-samples poses until objects fit without overlap (footprint
  // circumcircles kept disjoint, which implies pairwise footprint IoU = 0).
  // Throws PlacementError after max_place_attempts for any object.
  Scene sample_scene(int num_objects, const PoolSpec& pool, uint64_t rng_seed,
                     bool unique_attributes) const;

  // Places one object at the given pose (used by one-grasp collection and
  // confusion matrices). Throws PlacementError if the footprint leaves the
  // workspace.
  Scene single_object_scene(const SceneObject& obj, double x, double y, double yaw,
                            uint64_t rng_seed) const;

  std::pair<Heightmap, BackgroundMask> render(const Scene& scene,
                                              const JitterSpec& jitter) const;

  GraspOutcome grasp_oracle(const Scene& scene, const GraspAction& action) const;

  std::pair<GraspOutcome, Heightmap> execute_and_diff(const Scene& scene,
                                                      const GraspAction& action,
                                                      const JitterSpec& jitter) const;

  Tensor target_mask(const Scene& scene, size_t object_index) const;

 private:
  SimConfig cfg_;
};

namespace detail {
// Oracle with individually defeatable conditions; exists so the mutation
// tests can verify each condition is load-bearing.
GraspOutcome grasp_oracle_conditions(const SimConfig& cfg, const Scene& scene,
                                     const GraspAction& action, bool use_center,
                                     bool use_extent, bool use_clearance);
}  // namespace detail

}  // namespace attgrasp::sim

#endif  // ATTGRASP_SIM_WORLD_H_
