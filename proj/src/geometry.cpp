#include "simcr/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "simcr/errors.hpp"

namespace simcr {

namespace {

constexpr double kPoleGuard = 1e-9;

Vec3 local_coords(const Vec3& p_target, const Vec3& p_surface,
                  const Mat3& R_s) {
  return R_s.transpose() * (p_target - p_surface);
}

void check_off_axis(const Vec3& q) {
  double r = q.norm();
  if (r == 0.0) {
    throw DegenerateGeometryError("direction undefined: target at the surface");
  }
  double rho_xy = std::hypot(q[0], q[1]);
  if (rho_xy <= kPoleGuard * r) {
    throw DegenerateGeometryError(
        "direction undefined: target on the array's polar axis");
  }
}

}  // namespace

Direction local_direction(const Vec3& p_target, const Vec3& p_surface,
                          const Mat3& R_s) {
  Vec3 q = local_coords(p_target, p_surface, R_s);
  double r = q.norm();
  if (r == 0.0) {
    throw DegenerateGeometryError("direction undefined: target at the surface");
  }
  Direction dir;
  dir.el = std::acos(std::clamp(q[2] / r, -1.0, 1.0));
  dir.az = std::atan2(q[1], q[0]);  // polar axis: az defaults to 0
  return dir;
}

DirectionJacobian direction_jacobian(const Vec3& p_target,
                                     const Vec3& p_surface, const Mat3& R_s) {
  Vec3 q = local_coords(p_target, p_surface, R_s);
  check_off_axis(q);
  double r = q.norm();
  double rho_xy = std::hypot(q[0], q[1]);

  // el = acos(q_z/r): d(el)/dq = -(e_z*r^2 - q_z*q) / (r^2 * rho_xy)
  Vec3 del_dq = -(Vec3::UnitZ() * r * r - q[2] * q) / (r * r * rho_xy);
  // az = atan2(q_y, q_x)
  Vec3 daz_dq(-q[1] / (rho_xy * rho_xy), q[0] / (rho_xy * rho_xy), 0.0);
  // q = R_s^T (p - p_s)  =>  d/dp = R_s * d/dq
  DirectionJacobian J;
  J.del_dp = R_s * del_dq;
  J.daz_dp = R_s * daz_dq;
  J.dtau_dp = (p_target - p_surface) / (r * kSpeedOfLight);
  return J;
}

CVec steering_vector(const Direction& dir, double wavelength, double spacing,
                     int n_h, int n_v) {
  double w_h = spacing * std::sin(dir.az) * std::sin(dir.el) / wavelength;
  double w_v = spacing * std::cos(dir.el) / wavelength;
  CVec a(static_cast<Eigen::Index>(n_h) * n_v);
  for (int mh = 0; mh < n_h; ++mh) {
    cplx ah = std::polar(1.0, -2.0 * kPi * w_h * mh);
    for (int mv = 0; mv < n_v; ++mv) {
      a[static_cast<Eigen::Index>(mh) * n_v + mv] =
          ah * std::polar(1.0, -2.0 * kPi * w_v * mv);
    }
  }
  return a;
}

SteeringDerivatives steering_derivative_factors(const Direction& dir,
                                                double wavelength,
                                                double spacing, int n_h,
                                                int n_v) {
  double k = spacing / wavelength;
  double dwh_del = k * std::sin(dir.az) * std::cos(dir.el);
  double dwv_del = -k * std::sin(dir.el);
  double dwh_daz = k * std::cos(dir.az) * std::sin(dir.el);

  SteeringDerivatives out;
  Eigen::Index n = static_cast<Eigen::Index>(n_h) * n_v;
  out.del_factor.resize(n);
  out.daz_factor.resize(n);
  const cplx mj2pi(0.0, -2.0 * kPi);
  for (int mh = 0; mh < n_h; ++mh) {
    for (int mv = 0; mv < n_v; ++mv) {
      Eigen::Index idx = static_cast<Eigen::Index>(mh) * n_v + mv;
      out.del_factor[idx] = mj2pi * (dwh_del * mh + dwv_del * mv);
      out.daz_factor[idx] = mj2pi * (dwh_daz * mh);
    }
  }
  return out;
}

}  // namespace simcr
