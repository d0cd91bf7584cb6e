#include "attgrasp/sim/geometry.h"

#include <algorithm>
#include <cmath>

namespace attgrasp::sim {

namespace {

constexpr double kEps = 1e-12;

WorldPart make_part(Shape shape, const std::array<double, 3>& rgb, double length,
                    double width, double height, double x, double y, double yaw) {
  WorldPart p;
  p.shape = shape;
  p.rgb = rgb;
  p.cx = x;
  p.cy = y;
  p.height = height;
  if (shape == Shape::cylinder || shape == Shape::sphere) {
    p.is_circle = true;
    p.radius = 0.5 * length;
  } else {
    p.is_circle = false;
    p.hx = 0.5 * length;
    p.hy = 0.5 * width;
    p.yaw = yaw;
  }
  return p;
}

void to_local(double cx, double cy, double yaw, double x, double y, double& lx,
              double& ly) {
  double ca = std::cos(yaw), sa = std::sin(yaw);
  double dx = x - cx, dy = y - cy;
  lx = ca * dx + sa * dy;
  ly = -sa * dx + ca * dy;
}

}  // namespace

double PartSpec::area() const {
  if (shape == Shape::cylinder || shape == Shape::sphere)
    return kPi * 0.25 * length * length;
  return length * width;
}

std::vector<WorldPart> world_parts(const SceneObject& obj) {
  std::vector<WorldPart> out;
  double ca = std::cos(obj.yaw), sa = std::sin(obj.yaw);
  if (obj.shape == Shape::composite) {
    out.reserve(obj.parts.size());
    for (const auto& ps : obj.parts) {
      double wx = obj.x + ca * ps.dx - sa * ps.dy;
      double wy = obj.y + sa * ps.dx + ca * ps.dy;
      out.push_back(make_part(ps.shape, ps.rgb, ps.length, ps.width, ps.height, wx, wy,
                              obj.yaw + ps.yaw));
    }
  } else {
    out.push_back(make_part(obj.shape, obj.rgb, obj.length, obj.width, obj.height,
                            obj.x, obj.y, obj.yaw));
  }
  return out;
}

double circumradius(const SceneObject& obj) {
  double r = 0.0;
  if (obj.shape == Shape::composite) {
    for (const auto& ps : obj.parts) {
      double off = std::hypot(ps.dx, ps.dy);
      double pr = (ps.shape == Shape::cylinder || ps.shape == Shape::sphere)
                      ? 0.5 * ps.length
                      : std::hypot(0.5 * ps.length, 0.5 * ps.width);
      r = std::max(r, off + pr);
    }
  } else if (obj.shape == Shape::cylinder || obj.shape == Shape::sphere) {
    r = 0.5 * obj.length;
  } else {
    r = std::hypot(0.5 * obj.length, 0.5 * obj.width);
  }
  return r;
}

bool part_contains(const WorldPart& p, double x, double y) {
  if (p.is_circle) {
    double dx = x - p.cx, dy = y - p.cy;
    return dx * dx + dy * dy <= p.radius * p.radius;
  }
  double lx, ly;
  to_local(p.cx, p.cy, p.yaw, x, y, lx, ly);
  return std::abs(lx) <= p.hx && std::abs(ly) <= p.hy;
}

bool object_contains(const std::vector<WorldPart>& parts, double x, double y) {
  for (const auto& p : parts)
    if (part_contains(p, x, y)) return true;
  return false;
}

double part_height_at(const WorldPart& p, double x, double y) {
  if (!part_contains(p, x, y)) return 0.0;
  if (p.shape == Shape::sphere) {
    // resting sphere: top surface at R + sqrt(R^2 - d^2)
    double dx = x - p.cx, dy = y - p.cy;
    double r2 = p.radius * p.radius - (dx * dx + dy * dy);
    double half = 0.5 * p.height;
    double s = r2 > 0 ? std::sqrt(r2) / p.radius : 0.0;
    return half + half * s;
  }
  return p.height;
}

bool obb_intersects_part(const Obb& box, const WorldPart& part) {
  if (part.is_circle) {
    double lx, ly;
    to_local(box.cx, box.cy, box.yaw, part.cx, part.cy, lx, ly);
    double qx = std::clamp(lx, -box.hx, box.hx);
    double qy = std::clamp(ly, -box.hy, box.hy);
    double dx = lx - qx, dy = ly - qy;
    return dx * dx + dy * dy <= part.radius * part.radius;
  }
  // separating-axis test over both boxes' axes
  const double axes[4][2] = {
      {std::cos(box.yaw), std::sin(box.yaw)},
      {-std::sin(box.yaw), std::cos(box.yaw)},
      {std::cos(part.yaw), std::sin(part.yaw)},
      {-std::sin(part.yaw), std::cos(part.yaw)},
  };
  auto project = [](double ax, double ay, double cx, double cy, double hx, double hy,
                    double yaw, double& lo, double& hi) {
    double ex = std::cos(yaw), ey = std::sin(yaw);
    double c = ax * cx + ay * cy;
    double r = hx * std::abs(ax * ex + ay * ey) + hy * std::abs(-ax * ey + ay * ex);
    lo = c - r;
    hi = c + r;
  };
  for (const auto& a : axes) {
    double lo1, hi1, lo2, hi2;
    project(a[0], a[1], box.cx, box.cy, box.hx, box.hy, box.yaw, lo1, hi1);
    project(a[0], a[1], part.cx, part.cy, part.hx, part.hy, part.yaw, lo2, hi2);
    if (hi1 < lo2 || hi2 < lo1) return false;
  }
  return true;
}

std::optional<std::pair<double, double>> line_part_interval(const WorldPart& p,
                                                            double ox, double oy,
                                                            double ux, double uy) {
  if (p.is_circle) {
    double dx = ox - p.cx, dy = oy - p.cy;
    double b = dx * ux + dy * uy;
    double c = dx * dx + dy * dy - p.radius * p.radius;
    double disc = b * b - c;
    if (disc < 0) return std::nullopt;
    double s = std::sqrt(disc);
    return std::make_pair(-b - s, -b + s);
  }
  double lox, loy, lux, luy;
  to_local(p.cx, p.cy, p.yaw, ox, oy, lox, loy);
  double ca = std::cos(p.yaw), sa = std::sin(p.yaw);
  lux = ca * ux + sa * uy;
  luy = -sa * ux + ca * uy;
  double t0 = -1e30, t1 = 1e30;
  const double orig[2] = {lox, loy}, dir[2] = {lux, luy}, half[2] = {p.hx, p.hy};
  for (int i = 0; i < 2; ++i) {
    if (std::abs(dir[i]) < kEps) {
      if (std::abs(orig[i]) > half[i]) return std::nullopt;
    } else {
      double a = (-half[i] - orig[i]) / dir[i];
      double b = (half[i] - orig[i]) / dir[i];
      if (a > b) std::swap(a, b);
      t0 = std::max(t0, a);
      t1 = std::min(t1, b);
      if (t0 > t1) return std::nullopt;
    }
  }
  return std::make_pair(t0, t1);
}

double extent_through(const std::vector<WorldPart>& parts, double ox, double oy,
                      double ux, double uy, bool require_origin) {
  std::vector<std::pair<double, double>> ivals;
  for (const auto& p : parts) {
    auto iv = line_part_interval(p, ox, oy, ux, uy);
    if (iv) ivals.push_back(*iv);
  }
  if (ivals.empty()) return 0.0;
  std::sort(ivals.begin(), ivals.end());
  // merge touching intervals, then find the component containing t = 0
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : ivals) {
    if (!merged.empty() && iv.first <= merged.back().second + 1e-9)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  for (const auto& m : merged)
    if (m.first <= 1e-9 && m.second >= -1e-9) return m.second - m.first;
  if (!require_origin) {
    const std::pair<double, double>* best = nullptr;
    double best_d = 1e30;
    for (const auto& m : merged) {
      double d = std::min(std::abs(m.first), std::abs(m.second));
      if (d < best_d) {
        best_d = d;
        best = &m;
      }
    }
    if (best) return best->second - best->first;
  }
  return 0.0;
}

Tensor footprint_mask(const SceneObject& obj, int image_size) {
  Tensor mask = Tensor::zeros2(image_size, image_size);
  auto parts = world_parts(obj);
  double res = 1.0 / image_size;
  for (int r = 0; r < image_size; ++r) {
    double y = (r + 0.5) * res;
    for (int c = 0; c < image_size; ++c) {
      double x = (c + 0.5) * res;
      if (object_contains(parts, x, y)) mask.at(r, c) = 1.0;
    }
  }
  return mask;
}

}  // namespace attgrasp::sim
