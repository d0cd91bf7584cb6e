#include "attgrasp/net/layers.h"

#include <Eigen/Dense>
#include <cmath>

namespace attgrasp::net {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using CMapVec = Eigen::Map<const Eigen::VectorXd>;

// gathers x into columns: row = output pixel, col = (ky*k + kx)*in_c + ci
void im2col(const Tensor& x, int k, int stride, int pad, int oh, int ow,
            std::vector<double>& col) {
  const int h = x.rows(), w = x.cols(), c = x.channels();
  col.assign(static_cast<size_t>(oh) * ow * k * k * c, 0.0);
  const int patch = k * k * c;
  for (int orow = 0; orow < oh; ++orow) {
    for (int ocol = 0; ocol < ow; ++ocol) {
      double* dst = col.data() + (static_cast<size_t>(orow) * ow + ocol) * patch;
      const int base_r = orow * stride - pad;
      const int base_c = ocol * stride - pad;
      for (int ky = 0; ky < k; ++ky) {
        const int r = base_r + ky;
        if (r < 0 || r >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int cc = base_c + kx;
          if (cc < 0 || cc >= w) continue;
          const double* src = x.data() + (static_cast<int64_t>(r) * w + cc) * c;
          double* d = dst + (ky * k + kx) * c;
          for (int ci = 0; ci < c; ++ci) d[ci] = src[ci];
        }
      }
    }
  }
}

void col2im_add(const std::vector<double>& dcol, int k, int stride, int pad, int oh,
                int ow, Tensor& dx) {
  const int h = dx.rows(), w = dx.cols(), c = dx.channels();
  const int patch = k * k * c;
  for (int orow = 0; orow < oh; ++orow) {
    for (int ocol = 0; ocol < ow; ++ocol) {
      const double* src = dcol.data() + (static_cast<size_t>(orow) * ow + ocol) * patch;
      const int base_r = orow * stride - pad;
      const int base_c = ocol * stride - pad;
      for (int ky = 0; ky < k; ++ky) {
        const int r = base_r + ky;
        if (r < 0 || r >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int cc = base_c + kx;
          if (cc < 0 || cc >= w) continue;
          double* dst = dx.data() + (static_cast<int64_t>(r) * w + cc) * c;
          const double* s = src + (ky * k + kx) * c;
          for (int ci = 0; ci < c; ++ci) dst[ci] += s[ci];
        }
      }
    }
  }
}

}  // namespace

void Conv2D::build(int in_channels, int out_channels, int kernel, int stride_, Rng& rng) {
  in_c = in_channels;
  out_c = out_channels;
  k = kernel;
  stride = stride_;
  pad = kernel == 1 ? 0 : kernel / 2;
  w = Tensor::zeros2(k * k * in_c, out_c);
  b = Tensor::zeros1(out_c);
  double sd = std::sqrt(2.0 / (k * k * in_c));
  for (int64_t i = 0; i < w.size(); ++i) w[i] = sd * rng.normal();
}

void Conv2D::forward(const Tensor& x, Tensor& y, Scratch& s) const {
  const int oh = out_size(x.rows()), ow = out_size(x.cols());
  y.check_shape(oh, ow, out_c, "conv output");
  im2col(x, k, stride, pad, oh, ow, s.col);
  CMapMat col(s.col.data(), static_cast<Eigen::Index>(oh) * ow, k * k * in_c);
  CMapMat wm(w.data(), k * k * in_c, out_c);
  MapMat ym(y.data(), static_cast<Eigen::Index>(oh) * ow, out_c);
  ym.noalias() = col * wm;
  CMapVec bv(b.data(), out_c);
  ym.rowwise() += bv.transpose();
}

void Conv2D::backward(const Tensor& x, const Tensor& dy, Tensor* dx, Tensor& gw,
                      Tensor& gb, Scratch& s) const {
  const int oh = out_size(x.rows()), ow = out_size(x.cols());
  const Eigen::Index rows = static_cast<Eigen::Index>(oh) * ow;
  im2col(x, k, stride, pad, oh, ow, s.col);
  CMapMat col(s.col.data(), rows, k * k * in_c);
  CMapMat dym(dy.data(), rows, out_c);
  MapMat gwm(gw.data(), k * k * in_c, out_c);
  gwm.noalias() += col.transpose() * dym;
  MapVec gbv(gb.data(), out_c);
  gbv.noalias() += dym.colwise().sum().transpose();
  if (dx) {
    s.dcol.assign(static_cast<size_t>(rows) * k * k * in_c, 0.0);
    MapMat dcolm(s.dcol.data(), rows, k * k * in_c);
    CMapMat wm(w.data(), k * k * in_c, out_c);
    dcolm.noalias() = dym * wm.transpose();
    col2im_add(s.dcol, k, stride, pad, oh, ow, *dx);
  }
}

void Linear::build(int in_dim, int out_dim, Rng& rng) {
  in = in_dim;
  out = out_dim;
  w = Tensor::zeros2(in, out);
  b = Tensor::zeros1(out);
  double sd = std::sqrt(2.0 / in);
  for (int64_t i = 0; i < w.size(); ++i) w[i] = sd * rng.normal();
}

void Linear::forward(const Tensor& x, Tensor& y) const {
  CMapMat wm(w.data(), in, out);
  CMapVec xv(x.data(), in);
  MapVec yv(y.data(), out);
  yv.noalias() = wm.transpose() * xv;
  CMapVec bv(b.data(), out);
  yv += bv;
}

void Linear::backward(const Tensor& x, const Tensor& dy, Tensor* dx, Tensor& gw,
                      Tensor& gb) const {
  CMapVec xv(x.data(), in), dyv(dy.data(), out);
  MapMat gwm(gw.data(), in, out);
  gwm.noalias() += xv * dyv.transpose();
  MapVec gbv(gb.data(), out);
  gbv += dyv;
  if (dx) {
    CMapMat wm(w.data(), in, out);
    MapVec dxv(dx->data(), in);
    dxv.noalias() += wm * dyv;
  }
}

void relu_inplace(Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i)
    if (t[i] < 0.0) t[i] = 0.0;
}

void relu_backward(const Tensor& dy, const Tensor& y, Tensor& dx) {
  for (int64_t i = 0; i < dy.size(); ++i)
    if (y[i] > 0.0) dx[i] += dy[i];
}

void sigmoid_inplace(Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i) t[i] = 1.0 / (1.0 + std::exp(-t[i]));
}

void gap_forward(const Tensor& x, Tensor& y) {
  const int hw = x.rows() * x.cols(), c = x.channels();
  y.check_shape(c, 1, 1, "gap output");
  y.fill(0.0);
  for (int64_t i = 0; i < x.size(); ++i) y[i % c] += x[i];
  for (int d = 0; d < c; ++d) y[d] /= hw;
}

void gap_backward(const Tensor& dy, Tensor& dx) {
  const int hw = dx.rows() * dx.cols(), c = dx.channels();
  for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy[i % c] / hw;
}

}  // namespace attgrasp::net
