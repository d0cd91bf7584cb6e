#ifndef ATTGRASP_SIM_TYPES_H_
#define ATTGRASP_SIM_TYPES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attgrasp/attributes.h"
#include "attgrasp/tensor.h"

namespace attgrasp::sim {

constexpr double kPi = 3.14159265358979323846264338327950288;

enum class Shape { cube, cuboid, cylinder, sphere, composite };
enum class Color { red, green, blue, yellow, black };

const char* shape_token(Shape s);
const char* color_token(Color c);
std::array<double, 3> canonical_rgb(Color c);

// One primitive of a composite object, in the object's local frame.
struct PartSpec {
  Shape shape = Shape::cube;  // never composite
  Color color = Color::red;   // the color this part claims if dominant
  std::array<double, 3> rgb{0.5, 0.5, 0.5};
  double length = 0.1, width = 0.1, height = 0.05;
  double dx = 0.0, dy = 0.0, yaw = 0.0;
  double area() const;
};

struct SceneObject {
  Shape shape = Shape::cube;
  Color color = Color::red;
  std::array<double, 3> rgb{0.5, 0.5, 0.5};
  double length = 0.1, width = 0.1, height = 0.05;
  double x = 0.5, y = 0.5, yaw = 0.0;
  int texture_seed = 0;  // 0 = solid color
  AttributeLabel attr_label;
  std::string name;             // composites only
  std::vector<PartSpec> parts;  // composites only

  // Label including the name slot (0 if the name token is absent from vocab).
  AttributeLabel label_with_name(const Vocabulary& vocab) const;
};

struct Scene {
  std::vector<SceneObject> objects;
  int background_seed = 0;
  uint64_t rng_seed = 0;
};

struct Heightmap {
  Tensor rgb;    // H x W x 3, unit interval
  Tensor depth;  // H x W, workspace units above table
  double resolution = 0.0;
};

using BackgroundMask = Tensor;  // H x W, 1 where pre-jitter depth == 0

struct GraspAction {
  int row = 0;
  int col = 0;
  int angle_index = 0;
};

struct GraspOutcome {
  std::optional<size_t> grasped;  // index into scene.objects
  bool collided = false;
};

struct Gripper {
  double jaw_opening = 0.13;
  double jaw_thickness = 0.028;
  double jaw_width = 0.11;
};

struct JitterSpec {
  bool color = false;
  double color_strength = 0.2;  // brightness/contrast/saturation range
  double depth_sigma = 0.0;     // additive Gaussian, workspace units
  bool background_swap = false;
  uint64_t seed = 0;

  static JitterSpec none() { return JitterSpec{}; }
  static JitterSpec full(uint64_t seed, double sigma = 0.01) {
    JitterSpec j;
    j.color = true;
    j.depth_sigma = sigma;
    j.background_swap = true;
    j.seed = seed;
    return j;
  }
  bool any() const { return color || depth_sigma > 0.0 || background_swap; }
};

struct SimConfig {
  int image_size = 96;
  int num_angles = 6;
  Gripper gripper;
  double margin = 0.02;
  double place_padding = 0.008;
  int max_place_attempts = 250;
  double color_rgb_jitter = 0.06;
  double textured_fraction = 0.25;
  // basic object size ranges (workspace units); chosen so cubes, cylinders
  // and spheres fit the jaws at every discrete angle while cuboids fit only
  // within +/-30 degrees of their width axis
  double cube_min = 0.078, cube_max = 0.090;
  double cuboid_w_min = 0.066, cuboid_w_max = 0.072;
  double cuboid_l_min = 0.19, cuboid_l_max = 0.25;
  double round_min = 0.085, round_max = 0.118;
  double height_min = 0.035, height_max = 0.070;

  double resolution() const { return 1.0 / image_size; }
  double grasp_angle(int k) const { return k * (kPi / num_angles); }
};

}  // namespace attgrasp::sim

#endif  // ATTGRASP_SIM_TYPES_H_
