#pragma once

// Rotation-group primitives: hat/vee, Rodrigues exponential, logarithm and
// the right Jacobian of the exponential.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

namespace geoavg::rot {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Coordinates on the basis e1 = E12 - E21, e2 = E23 - E32, e3 = E13 - E31.
inline Mat3 hat(const Vec3& u) {
  Mat3 X;
  X << 0.0, u[0], u[2],
      -u[0], 0.0, u[1],
      -u[2], -u[1], 0.0;
  return X;
}

inline Vec3 vee(const Mat3& X) {
  return {0.5 * (X(0, 1) - X(1, 0)), 0.5 * (X(1, 2) - X(2, 1)), 0.5 * (X(0, 2) - X(2, 0))};
}

/// Standard cross-product matrix [w]x, so that [w]x v = w x v.
inline Mat3 cross(const Vec3& w) {
  Mat3 W;
  W << 0.0, -w[2], w[1],
      w[2], 0.0, -w[0],
      -w[1], w[0], 0.0;
  return W;
}

/// Rotation vector w with cross(w) == X for skew X.
inline Vec3 uncross(const Mat3& X) {
  return {0.5 * (X(2, 1) - X(1, 2)), 0.5 * (X(0, 2) - X(2, 0)), 0.5 * (X(1, 0) - X(0, 1))};
}

inline Mat3 Exp(const Vec3& w) {
  const double th2 = w.squaredNorm();
  const double th = std::sqrt(th2);
  double a, b;
  if (th < 1e-4) {
    a = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
    b = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  const Mat3 W = cross(w);
  return Mat3::Identity() + a * W + b * W * W;
}

/// Exponential of a skew matrix given in matrix form.
inline Mat3 expm_skew(const Mat3& X) { return Exp(uncross(X)); }

inline double angle(const Mat3& R) {
  const double c = 0.5 * (R.trace() - 1.0);
  const double s = 0.5 * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)).norm();
  return std::atan2(s, c);
}

/// Rotation vector of R with angle in [0, pi].
inline Vec3 Log(const Mat3& R) {
  const double th = angle(R);
  const Vec3 s(0.5 * (R(2, 1) - R(1, 2)), 0.5 * (R(0, 2) - R(2, 0)), 0.5 * (R(1, 0) - R(0, 1)));
  if (th < 1e-4) {
    const double th2 = th * th;
    return (1.0 + th2 / 6.0 + 7.0 * th2 * th2 / 360.0) * s;
  }
  if (th < 3.0) return (th / std::sin(th)) * s;
  // Near pi the skew part vanishes; recover the axis from the symmetric part.
  const Mat3 B = 0.5 * (R + R.transpose());
  const double c = std::cos(th);
  const Mat3 aat = (B - c * Mat3::Identity()) / (1.0 - c);
  int k = 0;
  aat.diagonal().maxCoeff(&k);
  Vec3 a = aat.col(k) / std::sqrt(std::max(aat(k, k), 1e-300));
  if (a.dot(s) < 0.0) a = -a;
  return th * a.normalized();
}

/// Right Jacobian: d/dt Exp(w(t)) = Exp(w) [J_r(w) w']x.
inline Mat3 right_jacobian(const Vec3& w) {
  const double th2 = w.squaredNorm();
  const double th = std::sqrt(th2);
  double a, b;
  if (th < 1e-4) {
    a = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
    b = 1.0 / 6.0 - th2 / 120.0 + th2 * th2 / 5040.0;
  } else {
    a = (1.0 - std::cos(th)) / th2;
    b = (th - std::sin(th)) / (th2 * th);
  }
  const Mat3 W = cross(w);
  return Mat3::Identity() - a * W + b * W * W;
}

inline Mat3 right_jacobian_inverse(const Vec3& w) {
  const double th2 = w.squaredNorm();
  const double th = std::sqrt(th2);
  double c;
  if (th < 1e-4) {
    c = 1.0 / 12.0 + th2 / 720.0 + th2 * th2 / 30240.0;
  } else {
    c = 1.0 / th2 - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
  }
  const Mat3 W = cross(w);
  return Mat3::Identity() + 0.5 * W + c * W * W;
}

/// The 24 rotational symmetries of the cube, identity first.
inline const std::vector<Mat3>& cube_rotations() {
  static const std::vector<Mat3> rotations = [] {
    std::vector<Mat3> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Mat3 M = Mat3::Zero();
        for (int i = 0; i < 3; ++i) M(i, perm[i]) = (signs >> i & 1) ? -1.0 : 1.0;
        if (M.determinant() > 0.0) out.push_back(M);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return rotations;
}

inline double orthogonality_defect(const Mat3& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

}  // namespace geoavg::rot
