#pragma once

#include <cstdint>
#include <string>

#include "voxlink/volume.hpp"
#include "voxlink/volume_io.hpp"

namespace voxlink {

/// Recipe for one synthetic brain-like phantom: a three-shell ellipsoid
/// (CSF / gray / white, increasing intensity) warped by a per-subject
/// band-limited displacement field and overlaid with per-subject
/// value-noise texture. The mask is the warped outer surface.
struct PhantomSpec {
  std::uint64_t subject_seed = 1;
  Dims dims{64, 64, 64};
  Vec3 spacing{1.0, 1.0, 1.0};
  // CSF, gray, white intensities; must be strictly increasing.
  std::array<double, 3> tissue_means{25.0, 60.0, 100.0};
  // Ellipsoid semi-axes as fraction of each dimension (before jitter).
  Vec3 axes_frac{0.30, 0.26, 0.23};
  double axes_jitter = 0.08;        // relative per-subject semi-axis jitter
  double deform_amplitude = 2.5;    // voxels of smooth warp
  double texture_amplitude = 12.0;  // intensity units of value noise

  void validate() const;  // throws InvalidSpec
};

Volume generate_phantom(const PhantomSpec& spec);

/// The fixed-seed phantom that stands in for the registration atlas.
/// 64^3 at 1 mm isotropic.
Volume default_template();

/// One of the four per-image perturbations applied when simulating a
/// dataset. The numeric fields are validation bounds as well as the
/// sampling ranges; rotation/translation/scale limits are artifact
/// defaults (the bias and gamma ranges follow the source protocol).
struct TransformSpec {
  enum class Kind { AffineJitter, IntensityShift, GammaContrast, BiasField };
  Kind kind = Kind::AffineJitter;
  std::uint64_t seed = 0;

  // affine_jitter: rotation magnitude about a random axis, translation
  // magnitude along a random direction, independent per-axis scales.
  double rot_max_deg = 15.0;
  double trans_max_mm = 10.0;
  double scale_min = 0.9;
  double scale_max = 1.1;

  // intensity_shift: additive offset = +/- U[lo,hi] of the in-mask range.
  double shift_min_frac = 0.1;
  double shift_max_frac = 0.5;

  // gamma_contrast
  double gamma_min = 0.1;
  double gamma_max = 0.9;

  // bias_field: per-image coefficient range (lo ~ U[.1,.2], hi ~ U[.1,.8]),
  // degree-3 polynomial over coordinates normalized to [-1,1].
  double coeff_lo_min = 0.1;
  double coeff_lo_max = 0.2;
  double coeff_hi_min = 0.1;
  double coeff_hi_max = 0.8;
  int bias_degree = 3;

  void validate() const;  // throws InvalidSpec
};

Volume apply_transform(const Volume& v, const TransformSpec& spec);

/// Generate `n_subjects` originals plus `variants_per_subject` transformed
/// versions each (cycling affine / shift / gamma / bias), write them in the
/// raw format under out_dir and return the manifest (also written as
/// out_dir/manifest.csv with paths relative to it).
Manifest build_simulated_dataset(int n_subjects, int variants_per_subject,
                                 const std::string& out_dir,
                                 std::uint64_t seed, Dims dims = {64, 64, 64});

}  // namespace voxlink
