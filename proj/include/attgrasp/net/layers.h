#ifndef ATTGRASP_NET_LAYERS_H_
#define ATTGRASP_NET_LAYERS_H_

#include <vector>

#include "attgrasp/rng.h"
#include "attgrasp/tensor.h"

namespace attgrasp::net {

// Reusable im2col buffers; callers keep one per live forward/backward chain.
struct Scratch {
  std::vector<double> col;
  std::vector<double> dcol;
};

// 3x3 (or 1x1) convolution, channel-last, implemented as im2col + GEMM.
// Weights are [k*k*in_c, out_c]; bias [out_c].
struct Conv2D {
  int in_c = 0, out_c = 0, k = 3, stride = 1, pad = 1;
  Tensor w, b;

  void build(int in_channels, int out_channels, int kernel, int stride_, Rng& rng);
  int out_size(int in_size) const { return (in_size + 2 * pad - k) / stride + 1; }

  void forward(const Tensor& x, Tensor& y, Scratch& s) const;
  // dx may be null for the first layer. Gradients accumulate.
  void backward(const Tensor& x, const Tensor& dy, Tensor* dx, Tensor& gw, Tensor& gb,
                Scratch& s) const;
};

// Fully-connected layer on rank-1 tensors. Weights [in, out], bias [out].
struct Linear {
  int in = 0, out = 0;
  Tensor w, b;

  void build(int in_dim, int out_dim, Rng& rng);
  void forward(const Tensor& x, Tensor& y) const;
  void backward(const Tensor& x, const Tensor& dy, Tensor* dx, Tensor& gw,
                Tensor& gb) const;
};

void relu_inplace(Tensor& t);
// dx += dy masked by y > 0 (y is the post-activation value)
void relu_backward(const Tensor& dy, const Tensor& y, Tensor& dx);

void sigmoid_inplace(Tensor& t);

// Global average pooling over the spatial grid of [H, W, C] -> [C].
void gap_forward(const Tensor& x, Tensor& y);
void gap_backward(const Tensor& dy, Tensor& dx);  // accumulates

}  // namespace attgrasp::net

#endif  // ATTGRASP_NET_LAYERS_H_
