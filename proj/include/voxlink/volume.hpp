#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace voxlink {

using Dims = std::array<int, 3>;
using Vec3 = std::array<double, 3>;

/// A 3D scalar grid with voxel spacing, physical origin and an optional
/// brain mask. Voxels are float32, stored x-fastest. Immutable by
/// convention once built: every operation in the toolkit returns a new
/// Volume instead of mutating its input.
struct Volume {
  Dims dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};  // mm per voxel, strictly positive
  Vec3 origin{0.0, 0.0, 0.0};   // mm
  std::vector<float> data;                // dims[0]*dims[1]*dims[2] values
  std::vector<std::uint8_t> mask;         // empty, or one 0/1 byte per voxel

  Volume() = default;
  Volume(Dims d, float fill = 0.0f)
      : dims(d),
        data(static_cast<std::size_t>(d[0]) * d[1] * d[2], fill) {}

  std::size_t voxel_count() const { return data.size(); }
  bool has_mask() const { return !mask.empty(); }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(z) * dims[1] * dims[0] +
           static_cast<std::size_t>(y) * dims[0] + static_cast<std::size_t>(x);
  }

  float at(int x, int y, int z) const { return data[index(x, y, z)]; }
  float& at(int x, int y, int z) { return data[index(x, y, z)]; }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < dims[0] && y >= 0 && y < dims[1] && z >= 0 &&
           z < dims[2];
  }

  bool mask_at(std::size_t i) const { return mask.empty() || mask[i] != 0; }

  /// Physical position (mm) of a (possibly fractional) voxel index.
  Vec3 physical(double ix, double iy, double iz) const {
    return {origin[0] + spacing[0] * ix, origin[1] + spacing[1] * iy,
            origin[2] + spacing[2] * iz};
  }

  /// Number of mask-true voxels (voxel_count() if no mask).
  std::size_t mask_count() const;

  /// Throws DimensionMismatch / CorruptHeader-style errors when the
  /// invariants in the data model do not hold (dims vs payload, positive
  /// spacing, mask extent, finite intensities).
  void validate() const;
};

/// 4x4 homogeneous transform mapping moving-volume physical coordinates
/// (mm) into fixed-volume physical coordinates. Row-major.
///
/// The 12-parameter form is [tx ty tz, rx ry rz, log sx sy sz, shear xy xz yz]
/// composed as T * R * S * Sh with R = Rz(rz) * Ry(ry) * Rx(rx) and Sh unit
/// upper-triangular.
struct AffineTransform {
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  static AffineTransform identity() { return AffineTransform{}; }
  static AffineTransform from_params(const std::array<double, 12>& p);
  static AffineTransform translation(double tx, double ty, double tz);
  /// Rotation by `angle` radians about `axis` (unit), around `center` (mm).
  static AffineTransform rotation_about(const Vec3& axis, double angle,
                                        const Vec3& center);

  double operator()(int r, int c) const { return m[r * 4 + c]; }
  double& operator()(int r, int c) { return m[r * 4 + c]; }

  Vec3 apply(const Vec3& p) const;
  double det3() const;
  AffineTransform inverse() const;  // throws SingularTransform

  /// this ∘ other: apply `other` first, then this.
  AffineTransform compose(const AffineTransform& other) const;

  /// Recover the canonical 12 parameters (T*R*S*Sh factorization of an
  /// invertible matrix with positive upper-3x3 determinant).
  std::array<double, 12> to_params() const;
};

/// total rotation angle (radians) separating the rotation factors of a and b.
double rotation_angle_between(const AffineTransform& a,
                              const AffineTransform& b);

}  // namespace voxlink
