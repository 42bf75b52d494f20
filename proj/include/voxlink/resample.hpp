#pragma once

#include "voxlink/volume.hpp"

namespace voxlink {

enum class Interp { Trilinear, Nearest };

/// Resample `v` through affine `t` (moving physical mm -> fixed physical mm)
/// onto the grid given by target dims/spacing/origin. Every output voxel is
/// the interpolated input at t^-1(physical coordinate); samples outside the
/// input are 0. A mask, when present, is always resampled nearest-neighbor.
Volume resample(const Volume& v, const AffineTransform& t, Dims target_dims,
                Vec3 target_spacing, Vec3 target_origin, Interp interp);

/// Resample onto the grid of `reference` (dims, spacing and origin).
Volume resample_to_grid(const Volume& v, const AffineTransform& t,
                        const Volume& reference, Interp interp);

/// Resize to new dims over the same physical extent (identity transform).
Volume resize(const Volume& v, Dims target_dims, Interp interp);

/// Tight axis-aligned bounding box of mask-true voxels; data and mask are
/// cropped identically. Throws EmptyMask when no mask or all-false.
Volume crop_to_mask_bbox(const Volume& v);

struct BBox {
  int lo[3];
  int hi[3];  // inclusive
};

/// Bounding box of the mask (throws EmptyMask when absent/empty).
BBox mask_bbox(const Volume& v);

/// Crop to an explicit box (inclusive bounds).
Volume crop(const Volume& v, const BBox& box);

}  // namespace voxlink
