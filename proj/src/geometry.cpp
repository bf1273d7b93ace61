#include "sagin/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sagin {

Mat3 rotation_from_euler(const EulerAngles& angles) {
  const double cx = std::cos(angles.beta_x), sx = std::sin(angles.beta_x);
  const double cy = std::cos(angles.beta_y), sy = std::sin(angles.beta_y);
  const double cz = std::cos(angles.beta_z), sz = std::sin(angles.beta_z);
  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rx * ry * rz;
}

bool is_valid_rotation(const Mat3& rotation, double tol) {
  if (!rotation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Vec3 to_local(const Frame& frame, const Vec3& point) {
  return frame.rotation.transpose() * (point - frame.translation);
}

Vec3 to_global(const Frame& frame, const Vec3& local_point) {
  return frame.rotation * local_point + frame.translation;
}

DirectionAngles direction_angles(const Frame& frame, const Vec3& target) {
  const Vec3 v = to_local(frame, target);
  const double norm = v.norm();
  if (norm < 1e-12) throw ZeroVector("direction_angles: target coincides with frame origin");
  DirectionAngles out;
  out.elevation = std::acos(std::clamp(std::abs(v.z()) / norm, 0.0, 1.0));
  // atan2 is undefined on the boresight; the steering vector does not depend on
  // azimuth there, so report 0.
  const double planar = std::hypot(v.x(), v.y());
  out.azimuth = planar <= 1e-15 * norm ? 0.0 : std::atan2(v.y(), v.x());
  return out;
}

bool forward_halfspace(const Frame& frame, const Vec3& point) {
  return to_local(frame, point).z() > 0.0;
}

Mat3 rotation_with_normal(const Vec3& normal) {
  const Vec3 z = normal.normalized();
  // Seed with the global axis least aligned with z.
  Vec3 seed = Vec3::UnitX();
  if (std::abs(z.x()) > std::abs(z.y()) && std::abs(z.x()) > std::abs(z.z())) seed = Vec3::UnitY();
  const Vec3 x = (seed - seed.dot(z) * z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / kPi;
}

}  // namespace sagin
