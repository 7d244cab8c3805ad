#pragma once
#include <cmath>

#include <Eigen/Dense>

#include "omnidensity/error.hpp"
#include "omnidensity/types.hpp"

namespace omni {

// Viewing geometry: unit sphere centered on the camera, projection center at
// the north pole N = (0,0,1), image plane Pi at z = -d with d >= 1. Plane
// coordinates (px, py) live on Pi with origin at the optical center O_c.
template <class S>
struct ProjectionParams {
  S d = S(1);
  int width = 0;
  int height = 0;
  S scale = S(1);     // pixels per plane unit
  S center_u = S(0);  // pixel position of O_c
  S center_v = S(0);

  void validate() const {
    require(d >= S(1), Err::bad_argument, "plane offset d must be >= 1");
    require(width > 0 && height > 0, Err::bad_argument, "raster dims must be positive");
    require(scale > S(0), Err::bad_argument, "scale must be positive");
    require(center_u >= S(0) && center_u < S(width), Err::bad_argument,
            "center_u out of raster");
    require(center_v >= S(0) && center_v < S(height), Err::bad_argument,
            "center_v out of raster");
  }
};

// Default framing: O_c at the raster center and the short image axis spanning
// plane radius r_span. (W-1)/2 is the exact midpoint under the pixel-center
// convention, which keeps 90-degree alignment rotations center-fixing.
template <class S>
ProjectionParams<S> make_params(int width, int height, S d = S(1), S r_span = S(4)) {
  require(r_span > S(0), Err::bad_argument, "r_span must be positive");
  ProjectionParams<S> p;
  p.d = d;
  p.width = width;
  p.height = height;
  p.scale = S(std::min(width, height)) / S(2) / r_span;
  p.center_u = S(width - 1) / S(2);
  p.center_v = S(height - 1) / S(2);
  p.validate();
  return p;
}

template <class S>
struct EquirectCoord {
  S lon;  // [-pi, pi)
  S lat;  // [-pi/2, pi/2]
};

template <class S>
Vec3<S> project_to_sphere(const Vec3<S>& p) {
  const S r = p.norm();
  require(r >= S(1e-15), Err::zero_vector, "cannot project the origin");
  return p / r;
}

// Stereographic projection from N onto Pi; input must be on the unit sphere.
template <class S>
Vec2<S> stereographic_project(const Vec3<S>& s, const ProjectionParams<S>& params) {
  const S denom = S(1) - s.z();
  require(denom >= S(1e-12), Err::at_projection_center,
          "point coincides with the projection center N");
  const S c = (S(1) + params.d) / denom;
  return Vec2<S>(c * s.x(), c * s.y());
}

// Closed-form inverse: with A = |q|^2/(1+d)^2 the preimage has
// z = (A-1)/(A+1) and (x,y) = 2 q / ((A+1)(1+d)). Never returns N.
template <class S>
Vec3<S> stereographic_unproject(const Vec2<S>& q, const ProjectionParams<S>& params) {
  const S od = S(1) + params.d;
  const S A = q.squaredNorm() / (od * od);
  const S inv = S(1) / (A + S(1));
  return Vec3<S>(S(2) * q.x() * inv / od, S(2) * q.y() * inv / od, (A - S(1)) * inv);
}

template <class S>
PixelCoord<S> plane_to_pixel(const Vec2<S>& q, const ProjectionParams<S>& params) {
  return {params.center_u + params.scale * q.x(),
          params.center_v + params.scale * q.y()};
}

template <class S>
Vec2<S> pixel_to_plane(S u, S v, const ProjectionParams<S>& params) {
  return Vec2<S>((u - params.center_u) / params.scale,
                 (v - params.center_v) / params.scale);
}

template <class S>
void validate_rotation(const Mat3<S>& rot, S tol = S(1e-9)) {
  require((rot * rot.transpose() - Mat3<S>::Identity()).cwiseAbs().maxCoeff() <= tol,
          Err::invalid_rotation, "matrix is not orthonormal");
  require(std::abs(rot.determinant() - S(1)) <= tol, Err::invalid_rotation,
          "determinant is not +1");
}

template <class S>
Vec3<S> rotate_sphere(const Vec3<S>& s, const Mat3<S>& rot) {
  validate_rotation(rot);
  return rot * s;
}

template <class S>
Mat3<S> rotation_axis_angle(const Vec3<S>& axis, S angle) {
  require(axis.norm() >= S(1e-15), Err::zero_vector, "rotation axis is zero");
  return Eigen::AngleAxis<S>(angle, axis.normalized()).toRotationMatrix();
}

// Sidecar rotation spec: R = Rz(yaw) * Ry(pitch) * Rx(roll).
template <class S>
Mat3<S> rotation_rpy(S roll, S pitch, S yaw) {
  return (Eigen::AngleAxis<S>(yaw, Vec3<S>::UnitZ()) *
          Eigen::AngleAxis<S>(pitch, Vec3<S>::UnitY()) *
          Eigen::AngleAxis<S>(roll, Vec3<S>::UnitX()))
      .toRotationMatrix();
}

// Convention anchors: lat +pi/2 is +z, lon 0 is +x, lon +pi/2 is +y.
template <class S>
Vec3<S> equirect_to_sphere(const EquirectCoord<S>& c) {
  const S cl = std::cos(c.lat);
  return Vec3<S>(cl * std::cos(c.lon), cl * std::sin(c.lon), std::sin(c.lat));
}

template <class S>
EquirectCoord<S> sphere_to_equirect(const Vec3<S>& s) {
  const S z = std::clamp(s.z(), S(-1), S(1));
  S lon = std::atan2(s.y(), s.x());
  if (lon >= S(M_PI)) lon = -S(M_PI);  // atan2 may return +pi exactly
  return {lon, std::asin(z)};
}

}  // namespace omni
