#ifndef ATTGRASP_IMAGEOPS_H_
#define ATTGRASP_IMAGEOPS_H_

#include <utility>

#include "attgrasp/tensor.h"

namespace attgrasp {

// Rotation convention: rotate(src, angle) rotates the image CONTENT by
// `angle` (radians, mathematically positive in (x=col, y=row) coordinates)
// about the image center ((rows-1)/2, (cols-1)/2). Sampling is bilinear with
// zero padding; exact multiples of 90 degrees reduce to exact pixel
// permutations for square images. Works on rank-2 and rank-3 tensors.
Tensor rotate_image(const Tensor& src, double angle);

// Transpose of rotate_image as a linear map: scatters `dout` gradients back
// into `dsrc` (accumulating) with the same bilinear weights.
void rotate_image_backward(const Tensor& dout, double angle, Tensor& dsrc);

// Maps a content point (row, col) through the same rotation rotate_image
// applies. Returns unrounded coordinates.
std::pair<double, double> rotate_point(double row, double col, double angle,
                                       int rows, int cols);

// Bilinear upsampling by an integer factor, half-pixel aligned
// (in = (out + 0.5)/f - 0.5). Rank-2 or rank-3.
Tensor upsample_bilinear(const Tensor& src, int factor);
void upsample_bilinear_backward(const Tensor& dout, int factor, Tensor& dsrc);

// Bilinear resize to an arbitrary size (used by crop augmentation; not part
// of the differentiable path).
Tensor resize_bilinear(const Tensor& src, int out_rows, int out_cols);

Tensor flip_horizontal(const Tensor& src);

}  // namespace attgrasp

#endif  // ATTGRASP_IMAGEOPS_H_
