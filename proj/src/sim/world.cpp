#include "attgrasp/sim/world.h"

#include <algorithm>
#include <cmath>

#include "attgrasp/errors.h"

namespace attgrasp::sim {

namespace {

// Per-pixel texture factor in [1-amp, 1]; evaluated in the part's local frame
// so textures rotate with the object.
double texture_factor(int texture_seed, const WorldPart& p, double x, double y) {
  if (texture_seed == 0) return 1.0;
  double lx = std::cos(p.yaw) * (x - p.cx) + std::sin(p.yaw) * (y - p.cy);
  double ly = -std::sin(p.yaw) * (x - p.cx) + std::cos(p.yaw) * (y - p.cy);
  Rng r(mix64(static_cast<uint64_t>(texture_seed)));
  double fx = r.uniform(90.0, 260.0), fy = r.uniform(90.0, 260.0);
  double phase = r.uniform(0.0, 2.0 * kPi);
  int mode = r.uniform_int(0, 2);
  double t;
  switch (mode) {
    case 0: t = 0.5 + 0.5 * std::sin(fx * lx + phase); break;                    // stripes
    case 1: t = 0.5 + 0.5 * std::sin(fx * lx + phase) * std::sin(fy * ly); break;  // checker-ish
    default: t = 0.5 + 0.5 * std::sin(fx * lx + fy * ly + phase); break;          // diagonal
  }
  return 1.0 - 0.35 * t;
}

void background_rgb(int texture_id, uint64_t params_seed, double x, double y,
                    double* rgb) {
  Rng pr(mix64(params_seed ^ 0xBA5Eu));
  switch (texture_id % 8) {
    case 0: rgb[0] = 0.56; rgb[1] = 0.52; rgb[2] = 0.46; break;  // plain table
    case 1: {
      double g = 0.66 + 0.06 * pr.uniform();
      rgb[0] = g; rgb[1] = g; rgb[2] = g + 0.02;
      break;
    }
    case 2: {  // checkerboard
      double cell = pr.uniform(0.08, 0.16);
      int k = (static_cast<int>(std::floor(x / cell)) + static_cast<int>(std::floor(y / cell))) & 1;
      double a = pr.uniform(0.35, 0.5), b = pr.uniform(0.6, 0.75);
      double g = k ? a : b;
      rgb[0] = g; rgb[1] = g * 0.98; rgb[2] = g * 0.92;
      break;
    }
    case 3: {  // horizontal waves
      double f = pr.uniform(15.0, 40.0), ph = pr.uniform(0.0, 6.28);
      double t = 0.5 + 0.22 * std::sin(f * y + ph);
      rgb[0] = t * 0.8; rgb[1] = t; rgb[2] = t * 0.75;
      break;
    }
    case 4: {  // diagonal stripes
      double f = pr.uniform(20.0, 50.0), ph = pr.uniform(0.0, 6.28);
      double t = std::sin(f * (x + y) + ph) > 0 ? pr.uniform(0.45, 0.55) : pr.uniform(0.62, 0.72);
      rgb[0] = t * 0.9; rgb[1] = t * 0.93; rgb[2] = t;
      break;
    }
    case 5: {  // radial gradient
      double cx = pr.uniform(0.3, 0.7), cy = pr.uniform(0.3, 0.7);
      double d = std::hypot(x - cx, y - cy);
      double t = 0.72 - 0.35 * std::min(1.0, d / 0.7);
      rgb[0] = t; rgb[1] = t * 0.95; rgb[2] = t * 0.88;
      break;
    }
    case 6: {  // smooth blobs
      double f1 = pr.uniform(8.0, 18.0), f2 = pr.uniform(8.0, 18.0);
      double ph1 = pr.uniform(0.0, 6.28), ph2 = pr.uniform(0.0, 6.28);
      double t = 0.55 + 0.14 * std::sin(f1 * x + ph1) * std::sin(f2 * y + ph2);
      rgb[0] = t * 0.92; rgb[1] = t; rgb[2] = t * 0.9;
      break;
    }
    default: {  // wood-ish
      double f = pr.uniform(25.0, 55.0), wob = pr.uniform(2.0, 5.0);
      double t = 0.5 + 0.5 * std::sin(f * x + wob * std::sin(7.0 * y));
      rgb[0] = 0.48 + 0.14 * t; rgb[1] = 0.34 + 0.10 * t; rgb[2] = 0.22 + 0.06 * t;
      break;
    }
  }
}

}  // namespace

Scene SimWorld::sample_scene(int num_objects, const PoolSpec& pool, uint64_t rng_seed,
                             bool unique_attributes) const {
  if (num_objects < 1) throw PreconditionError("num_objects must be >= 1");
  Rng rng(rng_seed);
  Scene scene;
  scene.rng_seed = rng_seed;
  scene.background_seed = static_cast<int>(rng.next_u64() % 1000000);
  std::vector<double> radii;
  for (int i = 0; i < num_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg_.max_place_attempts && !placed; ++attempt) {
      SceneObject obj = sample_pool_object(rng, cfg_, pool);
      if (unique_attributes) {
        bool dup = false;
        for (const auto& other : scene.objects)
          if (other.attr_label.padded(2).values[0] == obj.attr_label.padded(2).values[0] &&
              other.attr_label.padded(2).values[1] == obj.attr_label.padded(2).values[1])
            dup = true;
        if (dup) continue;
      }
      double r = circumradius(obj);
      double lo = r + cfg_.margin, hi = 1.0 - r - cfg_.margin;
      if (lo >= hi) continue;
      obj.x = rng.uniform(lo, hi);
      obj.y = rng.uniform(lo, hi);
      obj.yaw = rng.uniform(0.0, 2.0 * kPi);
      bool overlap = false;
      for (size_t j = 0; j < scene.objects.size(); ++j) {
        double d = std::hypot(obj.x - scene.objects[j].x, obj.y - scene.objects[j].y);
        if (d < r + radii[j] + cfg_.place_padding) overlap = true;
      }
      if (overlap) continue;
      scene.objects.push_back(std::move(obj));
      radii.push_back(r);
      placed = true;
    }
    if (!placed)
      throw PlacementError("could not place object " + std::to_string(i) + " of " +
                           std::to_string(num_objects));
  }
  return scene;
}

Scene SimWorld::single_object_scene(const SceneObject& obj, double x, double y,
                                    double yaw, uint64_t rng_seed) const {
  Scene scene;
  scene.rng_seed = rng_seed;
  scene.background_seed = static_cast<int>(mix64(rng_seed) % 1000000);
  SceneObject o = obj;
  o.x = x;
  o.y = y;
  o.yaw = yaw;
  double r = circumradius(o);
  if (x - r < 0.0 || x + r > 1.0 || y - r < 0.0 || y + r > 1.0)
    throw PlacementError("object footprint leaves the workspace");
  scene.objects.push_back(std::move(o));
  return scene;
}

std::pair<Heightmap, BackgroundMask> SimWorld::render(const Scene& scene,
                                                      const JitterSpec& jitter) const {
  const int n = cfg_.image_size;
  const double res = cfg_.resolution();
  Heightmap hm;
  hm.resolution = res;
  hm.rgb = Tensor::zeros3(n, n, 3);
  hm.depth = Tensor::zeros2(n, n);
  Tensor mask = Tensor::zeros2(n, n);

  // background
  int bg_tex = 0;
  uint64_t bg_params = 0;
  if (jitter.background_swap) {
    uint64_t s = mix64(jitter.seed ^ mix64(static_cast<uint64_t>(scene.background_seed)));
    bg_tex = static_cast<int>(s % 8);
    bg_params = mix64(s);
  }
  for (int r = 0; r < n; ++r) {
    double y = (r + 0.5) * res;
    for (int c = 0; c < n; ++c) {
      double x = (c + 0.5) * res;
      double rgb[3];
      background_rgb(bg_tex, bg_params, x, y, rgb);
      for (int k = 0; k < 3; ++k) hm.rgb.at(r, c, k) = rgb[k];
    }
  }

  // paint objects: per pixel the tallest covering part wins
  for (const auto& obj : scene.objects) {
    auto parts = world_parts(obj);
    for (const auto& p : parts) {
      double pr = p.is_circle ? p.radius : std::hypot(p.hx, p.hy);
      int r0 = std::max(0, static_cast<int>(std::floor((p.cy - pr) / res)));
      int r1 = std::min(n - 1, static_cast<int>(std::ceil((p.cy + pr) / res)));
      int c0 = std::max(0, static_cast<int>(std::floor((p.cx - pr) / res)));
      int c1 = std::min(n - 1, static_cast<int>(std::ceil((p.cx + pr) / res)));
      for (int r = r0; r <= r1; ++r) {
        double y = (r + 0.5) * res;
        for (int c = c0; c <= c1; ++c) {
          double x = (c + 0.5) * res;
          double h = part_height_at(p, x, y);
          if (h > hm.depth.at(r, c)) {
            hm.depth.at(r, c) = h;
            double f = texture_factor(obj.texture_seed, p, x, y);
            for (int k = 0; k < 3; ++k)
              hm.rgb.at(r, c, k) = std::clamp(p.rgb[static_cast<size_t>(k)] * f, 0.0, 1.0);
          }
        }
      }
    }
  }

  // background mask from pre-jitter depth
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) mask.at(r, c) = hm.depth.at(r, c) == 0.0 ? 1.0 : 0.0;

  if (jitter.color) {
    Rng jr(mix64(jitter.seed ^ 0xC0108ULL));
    double sat = jr.uniform(1.0 - jitter.color_strength, 1.0 + jitter.color_strength);
    double con = jr.uniform(1.0 - jitter.color_strength, 1.0 + jitter.color_strength);
    double bri = jr.uniform(1.0 - jitter.color_strength, 1.0 + jitter.color_strength);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double g = (hm.rgb.at(r, c, 0) + hm.rgb.at(r, c, 1) + hm.rgb.at(r, c, 2)) / 3.0;
        for (int k = 0; k < 3; ++k) {
          double v = hm.rgb.at(r, c, k);
          v = g + (v - g) * sat;        // saturation about per-pixel gray
          v = 0.5 + (v - 0.5) * con;    // contrast about fixed pivot
          v = v * bri;
          hm.rgb.at(r, c, k) = std::clamp(v, 0.0, 1.0);
        }
      }
    }
  }

  if (jitter.depth_sigma > 0.0) {
    // per-pixel hash noise: the field depends only on (seed, pixel), so
    // pre/post renders under the same seed agree on unchanged pixels
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        Rng px(mix64(jitter.seed ^ 0xD3B7ULL) ^ static_cast<uint64_t>(r * n + c));
        double d = hm.depth.at(r, c) + jitter.depth_sigma * px.normal();
        hm.depth.at(r, c) = d < 0.0 ? 0.0 : d;
      }
    }
  }

  return {std::move(hm), std::move(mask)};
}

namespace detail {

GraspOutcome grasp_oracle_conditions(const SimConfig& cfg, const Scene& scene,
                                     const GraspAction& action, bool use_center,
                                     bool use_extent, bool use_clearance) {
  const int n = cfg.image_size;
  if (action.row < 0 || action.row >= n || action.col < 0 || action.col >= n ||
      action.angle_index < 0 || action.angle_index >= cfg.num_angles)
    throw IndexError("grasp action out of bounds");

  const double res = cfg.resolution();
  const double px = (action.col + 0.5) * res;
  const double py = (action.row + 0.5) * res;
  const double theta = cfg.grasp_angle(action.angle_index);
  const double ux = std::cos(theta), uy = std::sin(theta);

  // (a) candidate object under the grasp center
  std::vector<std::vector<WorldPart>> parts;
  parts.reserve(scene.objects.size());
  for (const auto& o : scene.objects) parts.push_back(world_parts(o));
  std::optional<size_t> candidate;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (object_contains(parts[i], px, py)) {
      candidate = i;
      break;
    }
  }
  bool a_ok = candidate.has_value();
  if (!use_center && !candidate && !scene.objects.empty()) {
    // condition (a) disabled: fall back to the nearest object
    size_t best = 0;
    double best_d = 1e30;
    for (size_t i = 0; i < scene.objects.size(); ++i) {
      double d = std::hypot(scene.objects[i].x - px, scene.objects[i].y - py);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    candidate = best;
  }

  // (b) the object's span along the closing direction must fit the jaws
  bool fits = false;
  if (candidate) {
    double extent = extent_through(parts[*candidate], px, py, ux, uy, use_center);
    fits = extent > 0.0 && extent <= cfg.gripper.jaw_opening;
  }

  // (c) jaw sweep clearance against every other object
  const double jc = 0.5 * cfg.gripper.jaw_opening + 0.5 * cfg.gripper.jaw_thickness;
  Obb jaw1{px + jc * ux, py + jc * uy, 0.5 * cfg.gripper.jaw_thickness,
           0.5 * cfg.gripper.jaw_width, theta};
  Obb jaw2{px - jc * ux, py - jc * uy, 0.5 * cfg.gripper.jaw_thickness,
           0.5 * cfg.gripper.jaw_width, theta};
  bool clear = true;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (candidate && i == *candidate) continue;
    for (const auto& p : parts[i]) {
      if (obb_intersects_part(jaw1, p) || obb_intersects_part(jaw2, p)) {
        clear = false;
        break;
      }
    }
    if (!clear) break;
  }

  GraspOutcome out;
  out.collided = !clear;
  bool a_pass = use_center ? a_ok : true;
  bool b_pass = use_extent ? fits : true;
  bool c_pass = use_clearance ? clear : true;
  if (candidate && a_pass && b_pass && c_pass) {
    out.grasped = candidate;
    out.collided = false;
  }
  return out;
}

}  // namespace detail

GraspOutcome SimWorld::grasp_oracle(const Scene& scene, const GraspAction& action) const {
  return detail::grasp_oracle_conditions(cfg_, scene, action, true, true, true);
}

std::pair<GraspOutcome, Heightmap> SimWorld::execute_and_diff(
    const Scene& scene, const GraspAction& action, const JitterSpec& jitter) const {
  GraspOutcome outcome = grasp_oracle(scene, action);
  if (!outcome.grasped) {
    return {outcome, render(scene, jitter).first};
  }
  Scene after = scene;
  after.objects.erase(after.objects.begin() + static_cast<long>(*outcome.grasped));
  return {outcome, render(after, jitter).first};
}

Tensor SimWorld::target_mask(const Scene& scene, size_t object_index) const {
  return footprint_mask(scene.objects[object_index], cfg_.image_size);
}

}  // namespace attgrasp::sim
