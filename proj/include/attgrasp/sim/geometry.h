#ifndef ATTGRASP_SIM_GEOMETRY_H_
#define ATTGRASP_SIM_GEOMETRY_H_

#include <optional>
#include <utility>
#include <vector>

#include "attgrasp/sim/types.h"

namespace attgrasp::sim {

// A primitive placed in the workspace frame. Circles come from
// cylinders/spheres, boxes from cubes/cuboids.
struct WorldPart {
  bool is_circle = false;
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;            // circle
  double hx = 0.0, hy = 0.0;      // box half extents (hx along yaw axis)
  double yaw = 0.0;               // box orientation
  double height = 0.0;
  Shape shape = Shape::cube;      // source primitive (sphere tops are domed)
  std::array<double, 3> rgb{0, 0, 0};
};

// Materializes an object's primitives in the workspace frame. Non-composite
// objects yield exactly one part, so composites with a single centered part
// render identically to the equivalent basic object.
std::vector<WorldPart> world_parts(const SceneObject& obj);

// Radius of the smallest circle centered at the object pose covering its
// footprint.
double circumradius(const SceneObject& obj);

bool part_contains(const WorldPart& p, double x, double y);
bool object_contains(const std::vector<WorldPart>& parts, double x, double y);

// Height of the part's top surface at (x, y); 0 if outside the footprint.
double part_height_at(const WorldPart& p, double x, double y);

// Oriented box used for the jaw sweep test.
struct Obb {
  double cx, cy, hx, hy, yaw;
};

bool obb_intersects_part(const Obb& box, const WorldPart& part);

// Intersection interval of the line {origin + t*dir} with a part footprint.
std::optional<std::pair<double, double>> line_part_interval(const WorldPart& p,
                                                            double ox, double oy,
                                                            double ux, double uy);

// Length of the merged intersection component containing t = 0, i.e. the
// object's span along the jaw-closing direction through the grasp center.
// Returns 0 if no interval contains t = 0. With require_origin = false the
// component nearest to t = 0 is used instead (mutation-test fallback when the
// center condition is disabled).
double extent_through(const std::vector<WorldPart>& parts, double ox, double oy,
                      double ux, double uy, bool require_origin = true);

// Rasterized footprint mask (pixel centers inside the footprint).
Tensor footprint_mask(const SceneObject& obj, int image_size);

}  // namespace attgrasp::sim

#endif  // ATTGRASP_SIM_GEOMETRY_H_
