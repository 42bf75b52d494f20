#pragma once

#include <vector>

#include "voxlink/volume.hpp"

namespace voxlink {

/// Normalized symmetric Gaussian tap set of odd length `size`.
std::vector<float> gaussian_kernel(int size, double sigma);

/// Separable 3D correlation along all three axes. Near the border the
/// kernel is renormalized over its in-bounds support, so a constant field
/// stays exactly constant.
std::vector<float> separable_filter_3d(const std::vector<float>& src,
                                       const Dims& dims,
                                       const std::vector<float>& kernel);

/// Same, on a single 2D slice (nx * ny, x-fastest).
std::vector<float> separable_filter_2d(const std::vector<float>& src, int nx,
                                       int ny, const std::vector<float>& kernel);

/// 3D Sobel gradient magnitude (zero padding outside the volume).
std::vector<float> sobel_magnitude_3d(const std::vector<float>& src,
                                      const Dims& dims);

/// 2D correlation of a slice with an arbitrary 3x3 kernel, zero padded.
std::vector<float> conv2_3x3(const std::vector<float>& src, int nx, int ny,
                             const float kernel[9]);

/// 2x average pooling (truncates odd trailing rows/cols/slices).
std::vector<float> avg_pool2_3d(const std::vector<float>& src, const Dims& dims,
                                Dims& out_dims);

/// Gaussian smoothing of a full volume's payload.
std::vector<float> gaussian_smooth_3d(const std::vector<float>& src,
                                      const Dims& dims, double sigma);

}  // namespace voxlink
