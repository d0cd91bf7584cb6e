#include "attgrasp/imageops.h"

#include <cmath>

namespace attgrasp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Snap near-quarter-turn angles so 0/90/180/270 degree rotations are exact
// pixel permutations (the net's rotate-then-unrotate identity property and
// the 180-degree one-grasp augmentation rely on this).
bool quarter_turn(double angle, int& quarters) {
  double q = angle / (kTwoPi / 4.0);
  double qr = std::round(q);
  if (std::abs(q - qr) < 1e-9) {
    int m = static_cast<int>(qr) % 4;
    if (m < 0) m += 4;
    quarters = m;
    return true;
  }
  return false;
}

Tensor like(const Tensor& src) {
  if (src.ndim() == 3) return Tensor::zeros3(src.rows(), src.cols(), src.channels());
  return Tensor::zeros2(src.rows(), src.cols());
}

}  // namespace

std::pair<double, double> rotate_point(double row, double col, double angle,
                                       int rows, int cols) {
  double cy = 0.5 * (rows - 1), cx = 0.5 * (cols - 1);
  double ca = std::cos(angle), sa = std::sin(angle);
  double x = col - cx, y = row - cy;
  // content rotation: p' = R(angle) p  with (x, y) = (col, row)
  double xr = ca * x - sa * y;
  double yr = sa * x + ca * y;
  return {yr + cy, xr + cx};
}

Tensor rotate_image(const Tensor& src, double angle) {
  const int h = src.rows(), w = src.cols(), ch = src.channels();
  Tensor out = like(src);
  int quarters = 0;
  const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);

  if (h == w && quarter_turn(angle, quarters)) {
    // inverse permutation per output pixel
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int sr, sc;
        switch (quarters) {
          case 0: sr = r; sc = c; break;
          case 1: sr = h - 1 - c; sc = r; break;        // content +90
          case 2: sr = h - 1 - r; sc = w - 1 - c; break; // content 180
          default: sr = c; sc = w - 1 - r; break;        // content +270
        }
        for (int k = 0; k < ch; ++k) out.at(r, c, k) = src.at(sr, sc, k);
      }
    }
    return out;
  }

  const double ca = std::cos(-angle), sa = std::sin(-angle);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      // inverse-rotate the output pixel into source coordinates
      double x = c - cx, y = r - cy;
      double sx = ca * x - sa * y + cx;
      double sy = sa * x + ca * y + cy;
      int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      double fx = sx - x0, fy = sy - y0;
      double w00 = (1 - fy) * (1 - fx), w01 = (1 - fy) * fx;
      double w10 = fy * (1 - fx), w11 = fy * fx;
      for (int k = 0; k < ch; ++k) {
        double v = 0.0;
        if (y0 >= 0 && y0 < h) {
          if (x0 >= 0 && x0 < w) v += w00 * src.at(y0, x0, k);
          if (x0 + 1 >= 0 && x0 + 1 < w) v += w01 * src.at(y0, x0 + 1, k);
        }
        if (y0 + 1 >= 0 && y0 + 1 < h) {
          if (x0 >= 0 && x0 < w) v += w10 * src.at(y0 + 1, x0, k);
          if (x0 + 1 >= 0 && x0 + 1 < w) v += w11 * src.at(y0 + 1, x0 + 1, k);
        }
        out.at(r, c, k) = v;
      }
    }
  }
  return out;
}

void rotate_image_backward(const Tensor& dout, double angle, Tensor& dsrc) {
  const int h = dout.rows(), w = dout.cols(), ch = dout.channels();
  int quarters = 0;
  const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);

  if (h == w && quarter_turn(angle, quarters)) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int sr, sc;
        switch (quarters) {
          case 0: sr = r; sc = c; break;
          case 1: sr = h - 1 - c; sc = r; break;
          case 2: sr = h - 1 - r; sc = w - 1 - c; break;
          default: sr = c; sc = w - 1 - r; break;
        }
        for (int k = 0; k < ch; ++k) dsrc.at(sr, sc, k) += dout.at(r, c, k);
      }
    }
    return;
  }

  const double ca = std::cos(-angle), sa = std::sin(-angle);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double x = c - cx, y = r - cy;
      double sx = ca * x - sa * y + cx;
      double sy = sa * x + ca * y + cy;
      int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      double fx = sx - x0, fy = sy - y0;
      double w00 = (1 - fy) * (1 - fx), w01 = (1 - fy) * fx;
      double w10 = fy * (1 - fx), w11 = fy * fx;
      for (int k = 0; k < ch; ++k) {
        double g = dout.at(r, c, k);
        if (g == 0.0) continue;
        if (y0 >= 0 && y0 < h) {
          if (x0 >= 0 && x0 < w) dsrc.at(y0, x0, k) += w00 * g;
          if (x0 + 1 >= 0 && x0 + 1 < w) dsrc.at(y0, x0 + 1, k) += w01 * g;
        }
        if (y0 + 1 >= 0 && y0 + 1 < h) {
          if (x0 >= 0 && x0 < w) dsrc.at(y0 + 1, x0, k) += w10 * g;
          if (x0 + 1 >= 0 && x0 + 1 < w) dsrc.at(y0 + 1, x0 + 1, k) += w11 * g;
        }
      }
    }
  }
}

Tensor upsample_bilinear(const Tensor& src, int factor) {
  const int h = src.rows(), w = src.cols(), ch = src.channels();
  const int oh = h * factor, ow = w * factor;
  Tensor out = src.ndim() == 3 ? Tensor::zeros3(oh, ow, ch) : Tensor::zeros2(oh, ow);
  const double inv = 1.0 / factor;
  for (int r = 0; r < oh; ++r) {
    double sy = (r + 0.5) * inv - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int y0c = y0 < 0 ? 0 : (y0 > h - 1 ? h - 1 : y0);
    int y1c = y0 + 1 < 0 ? 0 : (y0 + 1 > h - 1 ? h - 1 : y0 + 1);
    for (int c = 0; c < ow; ++c) {
      double sx = (c + 0.5) * inv - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int x0c = x0 < 0 ? 0 : (x0 > w - 1 ? w - 1 : x0);
      int x1c = x0 + 1 < 0 ? 0 : (x0 + 1 > w - 1 ? w - 1 : x0 + 1);
      for (int k = 0; k < ch; ++k) {
        double v = (1 - fy) * ((1 - fx) * src.at(y0c, x0c, k) + fx * src.at(y0c, x1c, k)) +
                   fy * ((1 - fx) * src.at(y1c, x0c, k) + fx * src.at(y1c, x1c, k));
        out.at(r, c, k) = v;
      }
    }
  }
  return out;
}

void upsample_bilinear_backward(const Tensor& dout, int factor, Tensor& dsrc) {
  const int h = dsrc.rows(), w = dsrc.cols(), ch = dsrc.channels();
  const int oh = dout.rows(), ow = dout.cols();
  const double inv = 1.0 / factor;
  for (int r = 0; r < oh; ++r) {
    double sy = (r + 0.5) * inv - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int y0c = y0 < 0 ? 0 : (y0 > h - 1 ? h - 1 : y0);
    int y1c = y0 + 1 < 0 ? 0 : (y0 + 1 > h - 1 ? h - 1 : y0 + 1);
    for (int c = 0; c < ow; ++c) {
      double sx = (c + 0.5) * inv - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int x0c = x0 < 0 ? 0 : (x0 > w - 1 ? w - 1 : x0);
      int x1c = x0 + 1 < 0 ? 0 : (x0 + 1 > w - 1 ? w - 1 : x0 + 1);
      for (int k = 0; k < ch; ++k) {
        double g = dout.at(r, c, k);
        dsrc.at(y0c, x0c, k) += (1 - fy) * (1 - fx) * g;
        dsrc.at(y0c, x1c, k) += (1 - fy) * fx * g;
        dsrc.at(y1c, x0c, k) += fy * (1 - fx) * g;
        dsrc.at(y1c, x1c, k) += fy * fx * g;
      }
    }
  }
}

Tensor resize_bilinear(const Tensor& src, int out_rows, int out_cols) {
  const int h = src.rows(), w = src.cols(), ch = src.channels();
  Tensor out = src.ndim() == 3 ? Tensor::zeros3(out_rows, out_cols, ch)
                               : Tensor::zeros2(out_rows, out_cols);
  const double ry = static_cast<double>(h) / out_rows;
  const double rx = static_cast<double>(w) / out_cols;
  for (int r = 0; r < out_rows; ++r) {
    double sy = (r + 0.5) * ry - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int y0c = y0 < 0 ? 0 : (y0 > h - 1 ? h - 1 : y0);
    int y1c = y0 + 1 < 0 ? 0 : (y0 + 1 > h - 1 ? h - 1 : y0 + 1);
    for (int c = 0; c < out_cols; ++c) {
      double sx = (c + 0.5) * rx - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int x0c = x0 < 0 ? 0 : (x0 > w - 1 ? w - 1 : x0);
      int x1c = x0 + 1 < 0 ? 0 : (x0 + 1 > w - 1 ? w - 1 : x0 + 1);
      for (int k = 0; k < ch; ++k) {
        out.at(r, c, k) =
            (1 - fy) * ((1 - fx) * src.at(y0c, x0c, k) + fx * src.at(y0c, x1c, k)) +
            fy * ((1 - fx) * src.at(y1c, x0c, k) + fx * src.at(y1c, x1c, k));
      }
    }
  }
  return out;
}

Tensor flip_horizontal(const Tensor& src) {
  const int h = src.rows(), w = src.cols(), ch = src.channels();
  Tensor out = like(src);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int k = 0; k < ch; ++k) out.at(r, c, k) = src.at(r, w - 1 - c, k);
  return out;
}

}  // namespace attgrasp
