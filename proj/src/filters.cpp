#include "voxlink/filters.hpp"

#include <algorithm>
#include <cmath>

namespace voxlink {

std::vector<float> gaussian_kernel(int size, double sigma) {
  std::vector<float> k(static_cast<std::size_t>(size));
  const int half = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    const double w = std::exp(-(d * d) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i)] = static_cast<float>(w);
    sum += w;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

namespace {

// One renormalized-correlation pass along a single axis.
void filter_axis(const std::vector<float>& src, std::vector<float>& dst,
                 const Dims& dims, int axis, const std::vector<float>& kernel) {
  const int n[3] = {dims[0], dims[1], dims[2]};
  const std::ptrdiff_t stride[3] = {
      1, dims[0], static_cast<std::ptrdiff_t>(dims[0]) * dims[1]};
  const int klen = static_cast<int>(kernel.size());
  const int half = klen / 2;
  const int len = n[axis];
  const std::ptrdiff_t s = stride[axis];

  // outer loops over the two other axes
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  for (int j2 = 0; j2 < n[a2]; ++j2) {
    for (int j1 = 0; j1 < n[a1]; ++j1) {
      const std::ptrdiff_t base = j1 * stride[a1] + j2 * stride[a2];
      for (int i = 0; i < len; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(len - 1, i + half);
        float acc = 0.0f, wsum = 0.0f;
        for (int t = lo; t <= hi; ++t) {
          const float w = kernel[static_cast<std::size_t>(t - i + half)];
          acc += w * src[static_cast<std::size_t>(base + t * s)];
          wsum += w;
        }
        dst[static_cast<std::size_t>(base + i * s)] = acc / wsum;
      }
    }
  }
}

}  // namespace

std::vector<float> separable_filter_3d(const std::vector<float>& src,
                                       const Dims& dims,
                                       const std::vector<float>& kernel) {
  std::vector<float> a(src), b(src.size());
  filter_axis(a, b, dims, 0, kernel);
  filter_axis(b, a, dims, 1, kernel);
  filter_axis(a, b, dims, 2, kernel);
  return b;
}

std::vector<float> separable_filter_2d(const std::vector<float>& src, int nx,
                                       int ny,
                                       const std::vector<float>& kernel) {
  Dims d{nx, ny, 1};
  std::vector<float> a(src), b(src.size());
  filter_axis(a, b, d, 0, kernel);
  filter_axis(b, a, d, 1, kernel);
  return a;
}

std::vector<float> sobel_magnitude_3d(const std::vector<float>& src,
                                      const Dims& dims) {
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  auto value = [&](int x, int y, int z) -> float {
    if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return 0.0f;
    return src[static_cast<std::size_t>(z) * ny * nx +
               static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)];
  };
  static const float deriv[3] = {-1.0f, 0.0f, 1.0f};
  static const float smooth[3] = {1.0f, 2.0f, 1.0f};
  std::vector<float> out(src.size());
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        double g[3] = {0.0, 0.0, 0.0};
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const float v = value(x + dx, y + dy, z + dz);
              if (v == 0.0f) continue;
              g[0] += v * deriv[dx + 1] * smooth[dy + 1] * smooth[dz + 1];
              g[1] += v * smooth[dx + 1] * deriv[dy + 1] * smooth[dz + 1];
              g[2] += v * smooth[dx + 1] * smooth[dy + 1] * deriv[dz + 1];
            }
        out[static_cast<std::size_t>(z) * ny * nx +
            static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)] =
            static_cast<float>(
                std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]));
      }
    }
  }
  return out;
}

std::vector<float> conv2_3x3(const std::vector<float>& src, int nx, int ny,
                             const float kernel[9]) {
  std::vector<float> out(src.size(), 0.0f);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || xx >= nx || yy < 0 || yy >= ny) continue;
          acc += src[static_cast<std::size_t>(yy) * nx + xx] *
                 kernel[(dy + 1) * 3 + (dx + 1)];
        }
      out[static_cast<std::size_t>(y) * nx + x] = static_cast<float>(acc);
    }
  }
  return out;
}

std::vector<float> avg_pool2_3d(const std::vector<float>& src, const Dims& dims,
                                Dims& out_dims) {
  out_dims = {dims[0] / 2, dims[1] / 2, dims[2] / 2};
  std::vector<float> out(static_cast<std::size_t>(out_dims[0]) * out_dims[1] *
                         out_dims[2]);
  auto idx = [&](const Dims& d, int x, int y, int z) {
    return static_cast<std::size_t>(z) * d[1] * d[0] +
           static_cast<std::size_t>(y) * d[0] + static_cast<std::size_t>(x);
  };
  for (int z = 0; z < out_dims[2]; ++z)
    for (int y = 0; y < out_dims[1]; ++y)
      for (int x = 0; x < out_dims[0]; ++x) {
        double s = 0.0;
        for (int dz = 0; dz < 2; ++dz)
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
              s += src[idx(dims, 2 * x + dx, 2 * y + dy, 2 * z + dz)];
        out[idx(out_dims, x, y, z)] = static_cast<float>(s / 8.0);
      }
  return out;
}

std::vector<float> gaussian_smooth_3d(const std::vector<float>& src,
                                      const Dims& dims, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  return separable_filter_3d(src, dims, gaussian_kernel(2 * radius + 1, sigma));
}

}  // namespace voxlink
