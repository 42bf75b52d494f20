#include "voxlink/volume.hpp"

#include <cmath>

#include "voxlink/errors.hpp"

namespace voxlink {

std::size_t Volume::mask_count() const {
  if (mask.empty()) return voxel_count();
  std::size_t n = 0;
  for (auto v : mask) n += (v != 0);
  return n;
}

void Volume::validate() const {
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw DimensionMismatch("non-positive volume dims");
  }
  const std::size_t expected =
      static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (data.size() != expected) {
    throw DimensionMismatch("data payload does not match dims");
  }
  if (!mask.empty() && mask.size() != expected) {
    throw DimensionMismatch("mask extent does not match dims");
  }
  for (int a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0.0)) throw DimensionMismatch("non-positive spacing");
  }
  for (float v : data) {
    if (!std::isfinite(v)) {
      throw DimensionMismatch("non-finite intensity in volume");
    }
  }
}

namespace {

std::array<double, 9> mat3_mul(const std::array<double, 9>& a,
                               const std::array<double, 9>& b) {
  std::array<double, 9> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      r[i * 3 + j] = s;
    }
  return r;
}

std::array<double, 9> rotation_matrix(double rx, double ry, double rz) {
  const double cx = std::cos(rx), sx = std::sin(rx);
  const double cy = std::cos(ry), sy = std::sin(ry);
  const double cz = std::cos(rz), sz = std::sin(rz);
  std::array<double, 9> Rx{1, 0, 0, 0, cx, -sx, 0, sx, cx};
  std::array<double, 9> Ry{cy, 0, sy, 0, 1, 0, -sy, 0, cy};
  std::array<double, 9> Rz{cz, -sz, 0, sz, cz, 0, 0, 0, 1};
  return mat3_mul(Rz, mat3_mul(Ry, Rx));
}

}  // namespace

AffineTransform AffineTransform::from_params(
    const std::array<double, 12>& p) {
  const auto R = rotation_matrix(p[3], p[4], p[5]);
  const double sx = std::exp(p[6]), sy = std::exp(p[7]), sz = std::exp(p[8]);
  // S * Sh with Sh = [[1, hxy, hxz], [0, 1, hyz], [0, 0, 1]]
  std::array<double, 9> U{sx, sx * p[9], sx * p[10],
                          0,  sy,        sy * p[11],
                          0,  0,         sz};
  const auto M = mat3_mul(R, U);
  AffineTransform t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = M[i * 3 + j];
  t(0, 3) = p[0];
  t(1, 3) = p[1];
  t(2, 3) = p[2];
  return t;
}

AffineTransform AffineTransform::translation(double tx, double ty,
                                             double tz) {
  AffineTransform t;
  t(0, 3) = tx;
  t(1, 3) = ty;
  t(2, 3) = tz;
  return t;
}

AffineTransform AffineTransform::rotation_about(const Vec3& axis,
                                                double angle,
                                                const Vec3& center) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double x = axis[0], y = axis[1], z = axis[2];
  const double t = 1.0 - c;
  AffineTransform r;
  r(0, 0) = t * x * x + c;
  r(0, 1) = t * x * y - s * z;
  r(0, 2) = t * x * z + s * y;
  r(1, 0) = t * x * y + s * z;
  r(1, 1) = t * y * y + c;
  r(1, 2) = t * y * z - s * x;
  r(2, 0) = t * x * z - s * y;
  r(2, 1) = t * y * z + s * x;
  r(2, 2) = t * z * z + c;
  // shift so `center` is the fixed point
  for (int i = 0; i < 3; ++i) {
    r(i, 3) = center[i] - (r(i, 0) * center[0] + r(i, 1) * center[1] +
                           r(i, 2) * center[2]);
  }
  return r;
}

Vec3 AffineTransform::apply(const Vec3& p) const {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    out[i] = m[i * 4 + 0] * p[0] + m[i * 4 + 1] * p[1] + m[i * 4 + 2] * p[2] +
             m[i * 4 + 3];
  }
  return out;
}

double AffineTransform::det3() const {
  const auto& a = *this;
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

AffineTransform AffineTransform::inverse() const {
  const double d = det3();
  if (std::abs(d) <= 1e-9) {
    throw SingularTransform("upper-3x3 determinant below 1e-9");
  }
  const auto& a = *this;
  AffineTransform inv;
  // adjugate / det for the linear part
  inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
  inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
  inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
  inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
  inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
  inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
  inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
  inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
  inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
  for (int i = 0; i < 3; ++i) {
    inv(i, 3) = -(inv(i, 0) * a(0, 3) + inv(i, 1) * a(1, 3) +
                  inv(i, 2) * a(2, 3));
  }
  return inv;
}

AffineTransform AffineTransform::compose(const AffineTransform& other) const {
  AffineTransform r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += m[i * 4 + k] * other.m[k * 4 + j];
      r.m[i * 4 + j] = s;
    }
  return r;
}

std::array<double, 12> AffineTransform::to_params() const {
  if (det3() <= 1e-9) {
    throw SingularTransform("T*R*S*Sh factorization needs det > 0");
  }
  // Gram-Schmidt QR on the columns of the upper 3x3: M = R * U.
  double col[3][3];
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) col[j][i] = (*this)(i, j);

  double q[3][3];  // orthonormal columns
  double u[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (int j = 0; j < 3; ++j) {
    double v[3] = {col[j][0], col[j][1], col[j][2]};
    for (int k = 0; k < j; ++k) {
      double dot = 0.0;
      for (int i = 0; i < 3; ++i) dot += q[k][i] * col[j][i];
      u[k][j] = dot;
      for (int i = 0; i < 3; ++i) v[i] -= dot * q[k][i];
    }
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n <= 1e-12) throw SingularTransform("degenerate column in QR");
    u[j][j] = n;
    for (int i = 0; i < 3; ++i) q[j][i] = v[i] / n;
  }
  // Keep diag(U) > 0 and det(Q) = +1: with det(M) > 0, the Gram-Schmidt
  // construction already yields positive diagonals and a proper rotation.
  std::array<double, 12> p{};
  p[0] = (*this)(0, 3);
  p[1] = (*this)(1, 3);
  p[2] = (*this)(2, 3);
  // Q columns -> rotation matrix entries R(i,j) = q[j][i]
  const double r00 = q[0][0], r10 = q[0][1], r20 = q[0][2];
  const double r21 = q[1][2], r22 = q[2][2];
  // R = Rz * Ry * Rx  =>  ry = -asin(r20), rz = atan2(r10, r00), ...
  p[4] = std::asin(-std::max(-1.0, std::min(1.0, r20)));
  if (std::abs(std::cos(p[4])) > 1e-9) {
    p[3] = std::atan2(r21, r22);
    p[5] = std::atan2(r10, r00);
  } else {  // gimbal lock: fold rx into rz
    p[3] = std::atan2(-q[2][1], q[1][1]);
    p[5] = 0.0;
  }
  p[6] = std::log(u[0][0]);
  p[7] = std::log(u[1][1]);
  p[8] = std::log(u[2][2]);
  p[9] = u[0][1] / u[0][0];
  p[10] = u[0][2] / u[0][0];
  p[11] = u[1][2] / u[1][1];
  return p;
}

double rotation_angle_between(const AffineTransform& a,
                              const AffineTransform& b) {
  const auto pa = a.to_params();
  const auto pb = b.to_params();
  const auto Ra = rotation_matrix(pa[3], pa[4], pa[5]);
  const auto Rb = rotation_matrix(pb[3], pb[4], pb[5]);
  // trace(Ra * Rb^T)
  double tr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) tr += Ra[i * 3 + k] * Rb[i * 3 + k];
  double c = (tr - 1.0) / 2.0;
  c = std::max(-1.0, std::min(1.0, c));
  return std::acos(c);
}

}  // namespace voxlink
