#pragma once

#include "sagin/types.hpp"

namespace sagin {

/// Rigid transform from the global frame into a local frame. A point p in the
/// global frame has local coordinates rotation^T (p - translation).
struct Frame {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Frame identity() { return {}; }
};

struct EulerAngles {
  double beta_x = 0.0;
  double beta_y = 0.0;
  double beta_z = 0.0;
};

/// Elevation is measured from the array boresight (local +z), azimuth from
/// local +x toward local +y.
struct DirectionAngles {
  double elevation = 0.0;
  double azimuth = 0.0;
};

inline constexpr double kRotationTolerance = 1e-9;

/// R_x(beta_x) * R_y(beta_y) * R_z(beta_z).
Mat3 rotation_from_euler(const EulerAngles& angles);

/// True when R^T R = I and det R = 1, elementwise within `tol`.
bool is_valid_rotation(const Mat3& rotation, double tol = kRotationTolerance);

Vec3 to_local(const Frame& frame, const Vec3& point);
Vec3 to_global(const Frame& frame, const Vec3& local_point);

/// Angles of `target` as seen from the frame origin. Throws ZeroVector when the
/// target coincides with the origin.
DirectionAngles direction_angles(const Frame& frame, const Vec3& target);

/// Third local coordinate of `point` is strictly positive.
bool forward_halfspace(const Frame& frame, const Vec3& point);

/// Rotation whose third column (the local z axis in global coordinates) is
/// `normal`. The remaining axes are chosen deterministically.
Mat3 rotation_with_normal(const Vec3& normal);

/// Angle in degrees between two non-zero vectors.
double angle_between_deg(const Vec3& a, const Vec3& b);

}  // namespace sagin
