#ifndef ATTGRASP_TENSOR_H_
#define ATTGRASP_TENSOR_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "attgrasp/errors.h"

namespace attgrasp {

// Dense row-major tensor of doubles, rank 1..3. Images are stored
// channel-last: index(r, c, ch) = (r * cols + c) * channels + ch.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros1(int n) { return Tensor({n, 1, 1}, 1); }
  static Tensor zeros2(int rows, int cols) { return Tensor({rows, cols, 1}, 2); }
  static Tensor zeros3(int rows, int cols, int ch) { return Tensor({rows, cols, ch}, 3); }

  int ndim() const { return ndim_; }
  int dim(int i) const { return dims_[i]; }
  int rows() const { return dims_[0]; }
  int cols() const { return dims_[1]; }
  int channels() const { return dims_[2]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  bool same_shape(const Tensor& o) const {
    return ndim_ == o.ndim_ && dims_ == o.dims_;
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](int64_t i) { return data_[i]; }
  double operator[](int64_t i) const { return data_[i]; }

  double& at(int r, int c) { return data_[static_cast<int64_t>(r) * dims_[1] + c]; }
  double at(int r, int c) const { return data_[static_cast<int64_t>(r) * dims_[1] + c]; }

  double& at(int r, int c, int ch) {
    return data_[(static_cast<int64_t>(r) * dims_[1] + c) * dims_[2] + ch];
  }
  double at(int r, int c, int ch) const {
    return data_[(static_cast<int64_t>(r) * dims_[1] + c) * dims_[2] + ch];
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  void check_shape(int rows, int cols, int ch, const std::string& what) const {
    if (dims_[0] != rows || dims_[1] != cols || dims_[2] != ch) {
      throw ShapeError(what + ": expected " + std::to_string(rows) + "x" +
                       std::to_string(cols) + "x" + std::to_string(ch) + ", got " +
                       std::to_string(dims_[0]) + "x" + std::to_string(dims_[1]) + "x" +
                       std::to_string(dims_[2]));
    }
  }

 private:
  Tensor(std::array<int, 3> dims, int ndim) : dims_(dims), ndim_(ndim) {
    data_.assign(static_cast<size_t>(dims[0]) * dims[1] * dims[2], 0.0);
  }

  std::vector<double> data_;
  std::array<int, 3> dims_{0, 0, 0};
  int ndim_ = 0;
};

// Compact float32 storage for dataset records and file payloads. Records are
// quantized exactly once (at creation), so replay from RAM and from disk see
// identical data.
struct TensorF32 {
  std::array<int, 3> dims{0, 0, 0};
  int ndim = 0;
  std::vector<float> data;

  static TensorF32 from(const Tensor& t) {
    TensorF32 s;
    s.dims = {t.dim(0), t.dim(1), t.dim(2)};
    s.ndim = t.ndim();
    s.data.resize(static_cast<size_t>(t.size()));
    for (int64_t i = 0; i < t.size(); ++i) s.data[static_cast<size_t>(i)] = static_cast<float>(t[i]);
    return s;
  }

  Tensor to_tensor() const {
    Tensor t;
    if (ndim == 1) t = Tensor::zeros1(dims[0]);
    else if (ndim == 2) t = Tensor::zeros2(dims[0], dims[1]);
    else t = Tensor::zeros3(dims[0], dims[1], dims[2]);
    for (size_t i = 0; i < data.size(); ++i) t[static_cast<int64_t>(i)] = data[i];
    return t;
  }
};

}  // namespace attgrasp

#endif  // ATTGRASP_TENSOR_H_
