#include "attgrasp/sim/pools.h"

#include <algorithm>
#include <cmath>

#include "attgrasp/errors.h"
#include "attgrasp/sim/geometry.h"

namespace attgrasp::sim {

namespace {

const Vocabulary& label_vocab() {
  static const Vocabulary v = Vocabulary::standard();
  return v;
}

AttributeLabel make_label(Color c, Shape s) {
  const auto& v = label_vocab();
  return AttributeLabel({v.id(color_token(c)), v.id(shape_token(s))});
}

PartSpec part(Shape shape, Color color, std::array<double, 3> rgb, double length,
              double width, double height, double dx, double dy, double yaw = 0.0) {
  PartSpec p;
  p.shape = shape;
  p.color = color;
  p.rgb = rgb;
  p.length = length;
  p.width = width;
  p.height = height;
  p.dx = dx;
  p.dy = dy;
  p.yaw = yaw;
  return p;
}

}  // namespace

const char* shape_token(Shape s) {
  switch (s) {
    case Shape::cube: return "cube";
    case Shape::cuboid: return "cuboid";
    case Shape::cylinder: return "cylinder";
    case Shape::sphere: return "sphere";
    default: return "composite";
  }
}

const char* color_token(Color c) {
  switch (c) {
    case Color::red: return "red";
    case Color::green: return "green";
    case Color::blue: return "blue";
    case Color::yellow: return "yellow";
    default: return "black";
  }
}

std::array<double, 3> canonical_rgb(Color c) {
  switch (c) {
    case Color::red: return {0.82, 0.12, 0.10};
    case Color::green: return {0.12, 0.65, 0.18};
    case Color::blue: return {0.14, 0.22, 0.82};
    case Color::yellow: return {0.90, 0.84, 0.12};
    default: return {0.09, 0.09, 0.10};
  }
}

AttributeLabel SceneObject::label_with_name(const Vocabulary& vocab) const {
  AttributeLabel l = attr_label.padded(3);
  if (!name.empty() && vocab.contains(name)) l.values[2] = vocab.id(name);
  return l;
}

SceneObject sample_basic_object(Rng& rng, const SimConfig& cfg) {
  SceneObject o;
  o.color = static_cast<Color>(rng.uniform_int(0, 4));
  o.shape = static_cast<Shape>(rng.uniform_int(0, 3));
  auto rgb = canonical_rgb(o.color);
  for (auto& v : rgb)
    v = std::clamp(v + rng.uniform(-cfg.color_rgb_jitter, cfg.color_rgb_jitter), 0.0, 1.0);
  o.rgb = rgb;
  switch (o.shape) {
    case Shape::cube: {
      double s = rng.uniform(cfg.cube_min, cfg.cube_max);
      o.length = o.width = s;
      o.height = rng.uniform(cfg.height_min, cfg.height_max);
      break;
    }
    case Shape::cuboid: {
      o.length = rng.uniform(cfg.cuboid_l_min, cfg.cuboid_l_max);
      o.width = rng.uniform(cfg.cuboid_w_min, cfg.cuboid_w_max);
      o.height = rng.uniform(cfg.height_min, cfg.height_max);
      break;
    }
    case Shape::cylinder: {
      double d = rng.uniform(cfg.round_min, cfg.round_max);
      o.length = o.width = d;
      o.height = rng.uniform(cfg.height_min, cfg.height_max);
      break;
    }
    default: {  // sphere: height is the diameter
      double d = rng.uniform(cfg.round_min, cfg.round_max);
      o.length = o.width = d;
      o.height = d;
      break;
    }
  }
  o.texture_seed =
      rng.coin(cfg.textured_fraction) ? 1 + static_cast<int>(rng.next_u64() % 1000000) : 0;
  o.attr_label = make_label(o.color, o.shape);
  return o;
}

SceneObject compose_novel_object(const std::vector<PartSpec>& parts, uint64_t rng_seed,
                                 const std::string& name) {
  if (parts.empty() || parts.size() > 3)
    throw PreconditionError("composite needs 1 to 3 parts");
  SceneObject o;
  o.shape = Shape::composite;
  o.parts = parts;
  o.name = name;
  // dominant part: largest footprint area, earlier part on ties
  size_t best = 0;
  for (size_t i = 1; i < parts.size(); ++i)
    if (parts[i].area() > parts[best].area()) best = i;
  o.color = parts[best].color;
  o.rgb = parts[best].rgb;
  o.attr_label = make_label(parts[best].color, parts[best].shape).padded(3);
  o.height = 0.0;
  for (const auto& p : parts) o.height = std::max(o.height, p.height);
  double r = 0.0;
  for (const auto& p : parts) {
    double pr = (p.shape == Shape::cylinder || p.shape == Shape::sphere)
                    ? 0.5 * p.length
                    : std::hypot(0.5 * p.length, 0.5 * p.width);
    r = std::max(r, std::hypot(p.dx, p.dy) + pr);
  }
  o.length = o.width = 2.0 * r;
  o.texture_seed = static_cast<int>(rng_seed % 1000000);
  return o;
}

const std::vector<SceneObject>& novel_pool() {
  static const std::vector<SceneObject> pool = [] {
    std::vector<SceneObject> v;
    v.push_back(compose_novel_object(
        {part(Shape::sphere, Color::red, {0.75, 0.16, 0.12}, 0.110, 0.110, 0.110, 0, 0),
         part(Shape::cuboid, Color::red, {0.45, 0.30, 0.15}, 0.018, 0.034, 0.125, 0, -0.058, kPi / 2)},
        0, "apple"));
    v.push_back(compose_novel_object(
        {part(Shape::sphere, Color::green, {0.36, 0.66, 0.20}, 0.095, 0.095, 0.095, 0, 0.018),
         part(Shape::sphere, Color::green, {0.42, 0.62, 0.22}, 0.064, 0.064, 0.085, 0, -0.046)},
        0, "pear"));
    v.push_back(compose_novel_object(
        {part(Shape::cuboid, Color::yellow, {0.86, 0.76, 0.24}, 0.100, 0.034, 0.040, -0.032, 0.008, 0.35),
         part(Shape::cuboid, Color::yellow, {0.88, 0.78, 0.28}, 0.100, 0.034, 0.040, 0.032, -0.008, -0.35)},
        0, "banana"));
    v.push_back(compose_novel_object(
        {part(Shape::cuboid, Color::black, {0.24, 0.20, 0.18}, 0.160, 0.030, 0.040, 0, 0.030, kPi / 2),
         part(Shape::cuboid, Color::black, {0.52, 0.52, 0.56}, 0.090, 0.036, 0.055, 0, -0.058)},
        0, "hammer"));
    v.push_back(compose_novel_object(
        {part(Shape::cylinder, Color::blue, {0.22, 0.32, 0.78}, 0.100, 0.100, 0.060, 0, 0),
         part(Shape::cuboid, Color::blue, {0.26, 0.36, 0.74}, 0.046, 0.020, 0.045, 0.064, 0)},
        0, "mug"));
    v.push_back(compose_novel_object(
        {part(Shape::cylinder, Color::red, {0.78, 0.22, 0.26}, 0.086, 0.086, 0.070, 0, 0),
         part(Shape::cylinder, Color::red, {0.74, 0.74, 0.78}, 0.040, 0.040, 0.074, 0, 0)},
        0, "soda"));
    v.push_back(compose_novel_object(
        {part(Shape::cuboid, Color::red, {0.90, 0.54, 0.60}, 0.115, 0.074, 0.045, 0, 0)},
        0, "soap"));
    v.push_back(compose_novel_object(
        {part(Shape::cube, Color::yellow, {0.88, 0.85, 0.70}, 0.085, 0.085, 0.065, 0, 0)},
        0, "dice"));
    v.push_back(compose_novel_object(
        {part(Shape::sphere, Color::yellow, {0.90, 0.82, 0.20}, 0.085, 0.085, 0.085, 0, 0),
         part(Shape::sphere, Color::yellow, {0.86, 0.80, 0.26}, 0.050, 0.050, 0.060, 0.044, 0)},
        0, "lemon"));
    v.push_back(compose_novel_object(
        {part(Shape::cuboid, Color::red, {0.70, 0.26, 0.20}, 0.170, 0.064, 0.050, 0, 0)},
        77, "brick"));
    v.push_back(compose_novel_object(
        {part(Shape::cylinder, Color::black, {0.13, 0.13, 0.15}, 0.120, 0.120, 0.028, 0, 0)},
        0, "puck"));
    v.push_back(compose_novel_object(
        {part(Shape::cylinder, Color::green, {0.22, 0.56, 0.30}, 0.076, 0.076, 0.060, 0, 0.020),
         part(Shape::cylinder, Color::green, {0.26, 0.52, 0.32}, 0.036, 0.036, 0.080, 0, -0.034)},
        0, "bottle"));
    return v;
  }();
  return pool;
}

SceneObject sample_pool_object(Rng& rng, const SimConfig& cfg, const PoolSpec& pool) {
  if (pool.kind == PoolKind::basic) return sample_basic_object(rng, cfg);
  const auto& np = novel_pool();
  if (pool.novel_subset.empty()) {
    return np[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(np.size()) - 1))];
  }
  int pick = rng.uniform_int(0, static_cast<int>(pool.novel_subset.size()) - 1);
  int idx = pool.novel_subset[static_cast<size_t>(pick)];
  if (idx < 0 || idx >= static_cast<int>(np.size()))
    throw PreconditionError("novel pool index out of range");
  return np[static_cast<size_t>(idx)];
}

}  // namespace attgrasp::sim
