#ifndef ATTGRASP_TENSOR_IO_H_
#define ATTGRASP_TENSOR_IO_H_

#include <string>

#include "attgrasp/tensor.h"

namespace attgrasp {

// Raw tensor file: three little-endian uint32 (H, W, C) followed by H*W*C
// little-endian float32 values, row-major channel-last.
void write_tensor_f32(const std::string& path, const TensorF32& t);
TensorF32 read_tensor_f32(const std::string& path);

inline void write_tensor(const std::string& path, const Tensor& t) {
  write_tensor_f32(path, TensorF32::from(t));
}

}  // namespace attgrasp

#endif  // ATTGRASP_TENSOR_IO_H_
