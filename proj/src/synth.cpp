#include "voxlink/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "voxlink/errors.hpp"
#include "voxlink/resample.hpp"
#include "voxlink/rng.hpp"

namespace fs = std::filesystem;

namespace voxlink {

void PhantomSpec::validate() const {
  if (dims[0] < 32 || dims[1] < 32 || dims[2] < 32) {
    throw InvalidSpec("phantom dims must be >= 32^3 for registration stability");
  }
  if (!(tissue_means[0] < tissue_means[1] && tissue_means[1] < tissue_means[2])) {
    throw InvalidSpec("tissue means must be strictly increasing (csf < gray < white)");
  }
  for (int a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0.0)) throw InvalidSpec("non-positive spacing");
    if (!(axes_frac[a] > 0.05 && axes_frac[a] < 0.5)) {
      throw InvalidSpec("ellipsoid axes fraction out of (0.05, 0.5)");
    }
  }
}

namespace {

double smoothstep(double x, double edge0, double edge1) {
  double t = (x - edge0) / (edge1 - edge0);
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Sum of a few low-frequency sinusoids; one instance per displacement axis.
struct WaveField {
  struct Wave {
    double fx, fy, fz, phase, amp;
  };
  std::vector<Wave> waves;

  static WaveField random(Rng& rng, double amplitude, const Dims& dims) {
    WaveField f;
    const double tau = 6.283185307179586;
    for (int k = 0; k < 4; ++k) {
      auto dir = rng.unit_vector();
      const double cycles = rng.uniform(0.7, 2.1);
      WaveField::Wave w;
      w.fx = tau * cycles * dir[0] / dims[0];
      w.fy = tau * cycles * dir[1] / dims[1];
      w.fz = tau * cycles * dir[2] / dims[2];
      w.phase = rng.uniform(0.0, tau);
      w.amp = amplitude * rng.uniform(0.5, 1.0) / 4.0 * 2.0;
      f.waves.push_back(w);
    }
    return f;
  }

  double operator()(double x, double y, double z) const {
    double s = 0.0;
    for (const auto& w : waves) {
      s += w.amp * std::sin(w.fx * x + w.fy * y + w.fz * z + w.phase);
    }
    return s;
  }
};

// Perlin-style value noise: random lattice values interpolated with a
// smoothstep fade, three octaves.
struct ValueNoise {
  int cells;
  std::vector<double> lattice;  // (cells+1)^3

  static ValueNoise random(Rng& rng, int cells) {
    ValueNoise n;
    n.cells = cells;
    const std::size_t side = static_cast<std::size_t>(cells) + 1;
    n.lattice.resize(side * side * side);
    for (auto& v : n.lattice) v = rng.uniform(-1.0, 1.0);
    return n;
  }

  double at(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t side = static_cast<std::size_t>(cells) + 1;
    return lattice[(k * side + j) * side + i];
  }

  // u,v,w in [0,1]
  double operator()(double u, double v, double w) const {
    const double gx = u * cells, gy = v * cells, gz = w * cells;
    const int x0 = std::min(static_cast<int>(gx), cells - 1);
    const int y0 = std::min(static_cast<int>(gy), cells - 1);
    const int z0 = std::min(static_cast<int>(gz), cells - 1);
    const double fx = smoothstep(gx - x0, 0.0, 1.0);
    const double fy = smoothstep(gy - y0, 0.0, 1.0);
    const double fz = smoothstep(gz - z0, 0.0, 1.0);
    double acc = 0.0;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) *
                             (dz ? fz : 1.0 - fz);
          acc += wgt * at(static_cast<std::size_t>(x0 + dx),
                          static_cast<std::size_t>(y0 + dy),
                          static_cast<std::size_t>(z0 + dz));
        }
    return acc;
  }
};

}  // namespace

Volume generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  Rng rng(spec.subject_seed);

  const Dims d = spec.dims;
  Vec3 semi_axes, center;
  for (int a = 0; a < 3; ++a) {
    semi_axes[a] = spec.axes_frac[a] * d[a] *
                   (1.0 + rng.uniform(-spec.axes_jitter, spec.axes_jitter));
    center[a] = 0.5 * (d[a] - 1) + rng.uniform(-1.0, 1.0);
  }

  WaveField warp[3] = {WaveField::random(rng, spec.deform_amplitude, d),
                       WaveField::random(rng, spec.deform_amplitude, d),
                       WaveField::random(rng, spec.deform_amplitude, d)};
  ValueNoise tex0 = ValueNoise::random(rng, 6);
  ValueNoise tex1 = ValueNoise::random(rng, 12);
  ValueNoise tex2 = ValueNoise::random(rng, 24);

  const double csf = spec.tissue_means[0];
  const double gray = spec.tissue_means[1];
  const double white = spec.tissue_means[2];

  Volume v(d);
  v.spacing = spec.spacing;
  v.mask.assign(v.data.size(), 0);

  std::size_t i = 0;
  for (int z = 0; z < d[2]; ++z) {
    for (int y = 0; y < d[1]; ++y) {
      for (int x = 0; x < d[0]; ++x, ++i) {
        const double wx = x + warp[0](x, y, z);
        const double wy = y + warp[1](x, y, z);
        const double wz = z + warp[2](x, y, z);
        const double ex = (wx - center[0]) / semi_axes[0];
        const double ey = (wy - center[1]) / semi_axes[1];
        const double ez = (wz - center[2]) / semi_axes[2];
        const double rho = std::sqrt(ex * ex + ey * ey + ez * ez);
        if (rho > 1.0) continue;
        v.mask[i] = 1;
        // white core -> gray shell -> csf rim, smooth transitions
        double val = white;
        val = val + (gray - white) * smoothstep(rho, 0.50, 0.62);
        val = val + (csf - gray) * smoothstep(rho, 0.78, 0.88);
        const double u = static_cast<double>(x) / (d[0] - 1);
        const double vv = static_cast<double>(y) / (d[1] - 1);
        const double w = static_cast<double>(z) / (d[2] - 1);
        const double noise =
            0.55 * tex0(u, vv, w) + 0.3 * tex1(u, vv, w) + 0.15 * tex2(u, vv, w);
        // fade the texture before the rim so the support boundary stays clean
        const double fade = 1.0 - smoothstep(rho, 0.90, 1.0);
        val += spec.texture_amplitude * noise * fade;
        v.data[i] = static_cast<float>(std::max(val, 1.0));
      }
    }
  }
  return v;
}

Volume default_template() {
  PhantomSpec spec;
  spec.subject_seed = 0x1CBA152ULL;
  return generate_phantom(spec);
}

void TransformSpec::validate() const {
  switch (kind) {
    case Kind::AffineJitter:
      if (rot_max_deg < 0.0 || rot_max_deg > 15.0) {
        throw InvalidSpec("affine_jitter rotation magnitude must be in [0, 15] deg");
      }
      if (trans_max_mm < 0.0 || trans_max_mm > 10.0) {
        throw InvalidSpec("affine_jitter translation must be in [0, 10] mm");
      }
      if (scale_min < 0.9 || scale_max > 1.1 || scale_min > scale_max) {
        throw InvalidSpec("affine_jitter scale range must lie in [0.9, 1.1]");
      }
      break;
    case Kind::IntensityShift:
      if (shift_min_frac < 0.0 || shift_min_frac > shift_max_frac) {
        throw InvalidSpec("bad intensity shift range");
      }
      break;
    case Kind::GammaContrast:
      if (!(gamma_min > 0.0) || gamma_min > gamma_max) {
        throw InvalidSpec("bad gamma range");
      }
      break;
    case Kind::BiasField:
      if (coeff_lo_min < 0.0 || coeff_lo_min > coeff_lo_max ||
          coeff_hi_min < 0.0 || coeff_hi_min > coeff_hi_max ||
          bias_degree < 1) {
        throw InvalidSpec("bad bias field coefficient ranges");
      }
      break;
  }
}

namespace {

Volume apply_affine_jitter(const Volume& v, const TransformSpec& spec,
                           Rng& rng) {
  const Vec3 center = v.physical(0.5 * (v.dims[0] - 1), 0.5 * (v.dims[1] - 1),
                                 0.5 * (v.dims[2] - 1));
  const auto axis = rng.unit_vector();
  const double angle =
      rng.uniform(0.0, spec.rot_max_deg) * 3.14159265358979323846 / 180.0;
  const auto tdir = rng.unit_vector();
  const double tmag = rng.uniform(0.0, spec.trans_max_mm);
  Vec3 scale;
  for (int a = 0; a < 3; ++a) {
    scale[a] = rng.uniform(spec.scale_min, spec.scale_max);
  }

  AffineTransform S;  // per-axis scaling about the volume center
  for (int a = 0; a < 3; ++a) {
    S(a, a) = scale[a];
    S(a, 3) = center[a] * (1.0 - scale[a]);
  }
  const auto R = AffineTransform::rotation_about(axis, angle, center);
  const auto T = AffineTransform::translation(tdir[0] * tmag, tdir[1] * tmag,
                                              tdir[2] * tmag);
  const auto A = T.compose(R.compose(S));
  return resample(v, A, v.dims, v.spacing, v.origin, Interp::Trilinear);
}

Volume apply_intensity_shift(const Volume& v, const TransformSpec& spec,
                             Rng& rng) {
  float lo = 0.0f, hi = 0.0f;
  bool first = true;
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    if (!v.mask_at(i)) continue;
    if (first) {
      lo = hi = v.data[i];
      first = false;
    } else {
      lo = std::min(lo, v.data[i]);
      hi = std::max(hi, v.data[i]);
    }
  }
  const double range = hi - lo;
  double c = rng.uniform(spec.shift_min_frac, spec.shift_max_frac) * range;
  if (rng.uniform() < 0.5) c = -c;
  Volume out = v;
  for (auto& x : out.data) x = static_cast<float>(x + c);
  return out;
}

Volume apply_gamma_contrast(const Volume& v, const TransformSpec& spec,
                            Rng& rng) {
  const double gamma = rng.uniform(spec.gamma_min, spec.gamma_max);
  const auto [lo_it, hi_it] = std::minmax_element(v.data.begin(), v.data.end());
  const double lo = *lo_it, hi = *hi_it;
  Volume out = v;
  if (hi <= lo) return out;
  const double range = hi - lo;
  for (auto& x : out.data) {
    const double t = (x - lo) / range;
    x = static_cast<float>(lo + range * std::pow(t, gamma));
  }
  return out;
}

Volume apply_bias_field(const Volume& v, const TransformSpec& spec, Rng& rng) {
  if (!v.has_mask()) throw MissingMask("bias_field needs a brain mask");
  double lo = rng.uniform(spec.coeff_lo_min, spec.coeff_lo_max);
  double hi = rng.uniform(spec.coeff_hi_min, spec.coeff_hi_max);
  if (hi < lo) std::swap(lo, hi);

  // one coefficient per monomial x^i y^j z^k, i+j+k <= degree
  std::vector<std::array<int, 3>> powers;
  for (int i = 0; i <= spec.bias_degree; ++i)
    for (int j = 0; i + j <= spec.bias_degree; ++j)
      for (int k = 0; i + j + k <= spec.bias_degree; ++k)
        powers.push_back({i, j, k});
  std::vector<double> coeff(powers.size());
  for (auto& c : coeff) c = rng.uniform(lo, hi);

  Volume out = v;
  std::size_t idx = 0;
  for (int z = 0; z < v.dims[2]; ++z) {
    const double nz = v.dims[2] > 1 ? 2.0 * z / (v.dims[2] - 1) - 1.0 : 0.0;
    for (int y = 0; y < v.dims[1]; ++y) {
      const double ny = v.dims[1] > 1 ? 2.0 * y / (v.dims[1] - 1) - 1.0 : 0.0;
      for (int x = 0; x < v.dims[0]; ++x, ++idx) {
        const double nx = v.dims[0] > 1 ? 2.0 * x / (v.dims[0] - 1) - 1.0 : 0.0;
        double p = 0.0;
        for (std::size_t t = 0; t < powers.size(); ++t) {
          p += coeff[t] * std::pow(nx, powers[t][0]) *
               std::pow(ny, powers[t][1]) * std::pow(nz, powers[t][2]);
        }
        out.data[idx] = static_cast<float>(out.data[idx] * std::exp(p));
      }
    }
  }
  return out;
}

}  // namespace

Volume apply_transform(const Volume& v, const TransformSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.kind) {
    case TransformSpec::Kind::AffineJitter:
      return apply_affine_jitter(v, spec, rng);
    case TransformSpec::Kind::IntensityShift:
      return apply_intensity_shift(v, spec, rng);
    case TransformSpec::Kind::GammaContrast:
      return apply_gamma_contrast(v, spec, rng);
    case TransformSpec::Kind::BiasField:
      return apply_bias_field(v, spec, rng);
  }
  throw InvalidSpec("unknown transform kind");
}

Manifest build_simulated_dataset(int n_subjects, int variants_per_subject,
                                 const std::string& out_dir,
                                 std::uint64_t seed, Dims dims) {
  if (n_subjects < 1) throw InvalidSpec("need at least one subject");
  if (variants_per_subject < 0) throw InvalidSpec("negative variant count");
  fs::create_directories(out_dir);

  static const char* kTags[4] = {"affine", "shift", "gamma", "bias"};
  const Rng master(seed);
  Manifest m;

  char name[64];
  for (int s = 0; s < n_subjects; ++s) {
    Rng subject_rng = master.split(static_cast<std::uint64_t>(s));
    PhantomSpec pspec;
    pspec.subject_seed = subject_rng.next_u64();
    pspec.dims = dims;
    const Volume original = generate_phantom(pspec);

    std::snprintf(name, sizeof(name), "sub%03d_orig.vol", s);
    save_volume(original, (fs::path(out_dir) / name).string());
    std::snprintf(name, sizeof(name), "sub%03d", s);
    const std::string subject_id = name;
    std::snprintf(name, sizeof(name), "sub%03d_orig.vol", s);
    m.entries.push_back({name, subject_id, "s00", "orig"});

    for (int k = 0; k < variants_per_subject; ++k) {
      TransformSpec tspec;
      tspec.kind = static_cast<TransformSpec::Kind>(k % 4);
      tspec.seed = subject_rng.next_u64();
      const Volume variant = apply_transform(original, tspec);

      const std::string tag = k < 4 ? kTags[k % 4]
                                    : std::string(kTags[k % 4]) +
                                          std::to_string(k / 4 + 1);
      std::snprintf(name, sizeof(name), "sub%03d_%s.vol", s, tag.c_str());
      save_volume(variant, (fs::path(out_dir) / name).string());
      std::snprintf(name, sizeof(name), "s%02d", k + 1);
      m.entries.push_back(
          {(fs::path("") / (subject_id + "_" + tag + ".vol")).string(),
           subject_id, name, kTags[k % 4]});
    }
  }
  save_manifest(m, (fs::path(out_dir) / "manifest.csv").string());
  return m;
}

}  // namespace voxlink
