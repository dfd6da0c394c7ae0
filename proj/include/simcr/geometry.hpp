#pragma once

#include "simcr/types.hpp"

namespace simcr {

// Departure direction in the surface's local frame. Elevation is measured
// from local +z in [0, pi]; azimuth from local +x toward +y in [-pi, pi).
// Broadside (the stack axis) is el = pi/2, az = 0.
struct Direction {
  double el = 0.0;
  double az = 0.0;
};

// Local direction of p_target seen from p_surface with orientation R_s
// (p_local = R_s^T (p_target - p_surface)). Throws DegenerateGeometryError
// only when the target sits exactly at the surface position; on the polar
// axis azimuth defaults to 0.
Direction local_direction(const Vec3& p_target, const Vec3& p_surface,
                          const Mat3& R_s);

// Gradients of (el, az, tau) with respect to the global target position;
// tau = ||p_target - p_surface|| / c. Throws DegenerateGeometryError on the
// polar axis (el within ~1e-9 of {0, pi}), where the azimuth gradient blows up.
struct DirectionJacobian {
  Vec3 del_dp;
  Vec3 daz_dp;
  Vec3 dtau_dp;
};
DirectionJacobian direction_jacobian(const Vec3& p_target,
                                     const Vec3& p_surface, const Mat3& R_s);

// Array response of an n_h x n_v grid with spacing `spacing` at wavelength
// `wavelength`: entry (m_h*n_v + m_v) carries phase
// -2*pi*(w_h*m_h + w_v*m_v), w_h = spacing*sin(az)*sin(el)/wavelength,
// w_v = spacing*cos(el)/wavelength.
CVec steering_vector(const Direction& dir, double wavelength, double spacing,
                     int n_h, int n_v);

// Elementwise angular derivative factors: d(entry_n)/d(el or az) equals
// entry_n * factor_n. Returned as two length-(n_h*n_v) vectors.
struct SteeringDerivatives {
  CVec del_factor;
  CVec daz_factor;
};
SteeringDerivatives steering_derivative_factors(const Direction& dir,
                                                double wavelength,
                                                double spacing, int n_h,
                                                int n_v);

}  // namespace simcr
