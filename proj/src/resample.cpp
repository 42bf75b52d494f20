#include "voxlink/resample.hpp"

#include <algorithm>
#include <cmath>

#include "voxlink/errors.hpp"

namespace voxlink {

namespace {

inline float sample_trilinear(const Volume& v, double fx, double fy,
                              double fz) {
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int z0 = static_cast<int>(std::floor(fz));
  const double wx = fx - x0, wy = fy - y0, wz = fz - z0;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const int x = x0 + dx, y = y0 + dy, z = z0 + dz;
        if (!v.in_bounds(x, y, z)) continue;
        const double w = (dx ? wx : 1.0 - wx) * (dy ? wy : 1.0 - wy) *
                         (dz ? wz : 1.0 - wz);
        acc += w * v.at(x, y, z);
      }
  return static_cast<float>(acc);
}

inline float sample_nearest(const Volume& v, double fx, double fy, double fz) {
  const int x = static_cast<int>(std::lround(fx));
  const int y = static_cast<int>(std::lround(fy));
  const int z = static_cast<int>(std::lround(fz));
  if (!v.in_bounds(x, y, z)) return 0.0f;
  return v.at(x, y, z);
}

}  // namespace

Volume resample(const Volume& v, const AffineTransform& t, Dims target_dims,
                Vec3 target_spacing, Vec3 target_origin, Interp interp) {
  const AffineTransform inv = t.inverse();  // throws SingularTransform

  Volume out;
  out.dims = target_dims;
  out.spacing = target_spacing;
  out.origin = target_origin;
  out.data.resize(static_cast<std::size_t>(target_dims[0]) * target_dims[1] *
                  target_dims[2]);
  const bool with_mask = v.has_mask();
  if (with_mask) out.mask.assign(out.data.size(), 0);

  Volume mask_vol;
  if (with_mask) {
    mask_vol.dims = v.dims;
    mask_vol.spacing = v.spacing;
    mask_vol.origin = v.origin;
    mask_vol.data.assign(v.mask.begin(), v.mask.end());
  }

  std::size_t i = 0;
  for (int z = 0; z < target_dims[2]; ++z) {
    for (int y = 0; y < target_dims[1]; ++y) {
      for (int x = 0; x < target_dims[0]; ++x, ++i) {
        const Vec3 phys = {target_origin[0] + target_spacing[0] * x,
                           target_origin[1] + target_spacing[1] * y,
                           target_origin[2] + target_spacing[2] * z};
        const Vec3 src = inv.apply(phys);
        const double fx = (src[0] - v.origin[0]) / v.spacing[0];
        const double fy = (src[1] - v.origin[1]) / v.spacing[1];
        const double fz = (src[2] - v.origin[2]) / v.spacing[2];
        out.data[i] = (interp == Interp::Trilinear)
                          ? sample_trilinear(v, fx, fy, fz)
                          : sample_nearest(v, fx, fy, fz);
        if (with_mask) {
          out.mask[i] =
              sample_nearest(mask_vol, fx, fy, fz) > 0.5f ? 1 : 0;
        }
      }
    }
  }
  return out;
}

Volume resample_to_grid(const Volume& v, const AffineTransform& t,
                        const Volume& reference, Interp interp) {
  return resample(v, t, reference.dims, reference.spacing, reference.origin,
                  interp);
}

Volume resize(const Volume& v, Dims target_dims, Interp interp) {
  Vec3 sp;
  for (int a = 0; a < 3; ++a) {
    sp[a] = v.spacing[a] * static_cast<double>(v.dims[a]) / target_dims[a];
  }
  // keep voxel-center alignment of the physical extent
  Vec3 org;
  for (int a = 0; a < 3; ++a) {
    org[a] = v.origin[a] - 0.5 * v.spacing[a] + 0.5 * sp[a];
  }
  return resample(v, AffineTransform::identity(), target_dims, sp, org, interp);
}

BBox mask_bbox(const Volume& v) {
  if (!v.has_mask()) throw EmptyMask("volume has no mask");
  BBox box{{v.dims[0], v.dims[1], v.dims[2]}, {-1, -1, -1}};
  std::size_t i = 0;
  for (int z = 0; z < v.dims[2]; ++z)
    for (int y = 0; y < v.dims[1]; ++y)
      for (int x = 0; x < v.dims[0]; ++x, ++i) {
        if (!v.mask[i]) continue;
        box.lo[0] = std::min(box.lo[0], x);
        box.lo[1] = std::min(box.lo[1], y);
        box.lo[2] = std::min(box.lo[2], z);
        box.hi[0] = std::max(box.hi[0], x);
        box.hi[1] = std::max(box.hi[1], y);
        box.hi[2] = std::max(box.hi[2], z);
      }
  if (box.hi[0] < 0) throw EmptyMask("mask contains no true voxel");
  return box;
}

Volume crop(const Volume& v, const BBox& box) {
  Volume out;
  out.dims = {box.hi[0] - box.lo[0] + 1, box.hi[1] - box.lo[1] + 1,
              box.hi[2] - box.lo[2] + 1};
  out.spacing = v.spacing;
  out.origin = v.physical(box.lo[0], box.lo[1], box.lo[2]);
  out.data.resize(static_cast<std::size_t>(out.dims[0]) * out.dims[1] *
                  out.dims[2]);
  if (v.has_mask()) out.mask.resize(out.data.size());
  std::size_t i = 0;
  for (int z = box.lo[2]; z <= box.hi[2]; ++z)
    for (int y = box.lo[1]; y <= box.hi[1]; ++y)
      for (int x = box.lo[0]; x <= box.hi[0]; ++x, ++i) {
        const std::size_t j = v.index(x, y, z);
        out.data[i] = v.data[j];
        if (v.has_mask()) out.mask[i] = v.mask[j];
      }
  return out;
}

Volume crop_to_mask_bbox(const Volume& v) { return crop(v, mask_bbox(v)); }

}  // namespace voxlink
