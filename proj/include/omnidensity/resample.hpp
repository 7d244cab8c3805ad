#pragma once
#include <cmath>
#include <vector>

#include "omnidensity/error.hpp"
#include "omnidensity/geom.hpp"
#include "omnidensity/image.hpp"
#include "omnidensity/parallel.hpp"

namespace omni {

enum class Interp { nearest, bilinear };

inline void validate_equirect(const Image& src) {
  require(src.width > 0 && src.height > 0 && src.width == 2 * src.height,
          Err::dimension_mismatch, "equirectangular source must be 2:1");
}

// Pixel-center addressing of an equirectangular raster.
inline Vec2<double> equirect_coord_to_pixel(const EquirectCoord<double>& c, int w, int h) {
  return Vec2<double>((c.lon + M_PI) / (2 * M_PI) * w - 0.5,
                      (M_PI / 2 - c.lat) / M_PI * h - 0.5);
}

namespace detail {

inline int wrap_x(int x, int w) {
  x %= w;
  return x < 0 ? x + w : x;
}

inline int clamp_y(int y, int h) { return y < 0 ? 0 : (y >= h ? h - 1 : y); }

// Longitude wraps, latitude clamps at the poles.
inline float sample_equirect(const Planef& plane, double x, double y, Interp interp) {
  const int w = static_cast<int>(plane.cols());
  const int h = static_cast<int>(plane.rows());
  if (interp == Interp::nearest) {
    return plane(clamp_y(static_cast<int>(std::lround(y)), h),
                 wrap_x(static_cast<int>(std::lround(x)), w));
  }
  const double xf = std::floor(x);
  const double yf = std::floor(y);
  const double ax = x - xf;
  const double ay = y - yf;
  const int x0 = wrap_x(static_cast<int>(xf), w);
  const int x1 = wrap_x(static_cast<int>(xf) + 1, w);
  const int y0 = clamp_y(static_cast<int>(yf), h);
  const int y1 = clamp_y(static_cast<int>(yf) + 1, h);
  const double top = plane(y0, x0) * (1 - ax) + plane(y0, x1) * ax;
  const double bot = plane(y1, x0) * (1 - ax) + plane(y1, x1) * ax;
  return static_cast<float>(top * (1 - ay) + bot * ay);
}

}  // namespace detail

// Destination-driven warp: each output pixel pulls its sample through
// plane -> sphere -> rot^-1 -> equirect. The output is the stereographic view
// of the source sphere rotated by rot. Deterministic for any thread count.
inline StereoImage reproject(const Image& src, const Mat3<double>& rot,
                             const ProjectionParams<double>& params,
                             Interp interp = Interp::bilinear, int threads = 1) {
  validate_equirect(src);
  params.validate();
  validate_rotation(rot);
  const Mat3<double> inv = rot.transpose();

  StereoImage out;
  out.raster = Image(params.width, params.height, src.channels());
  out.params = params;
  out.mask = Maskb::Constant(params.height, params.width, 1);

  const int nc = src.channels();
  parallel_for_rows(params.height, threads, [&](int row0, int row1) {
    for (int v = row0; v < row1; ++v) {
      for (int u = 0; u < params.width; ++u) {
        const Vec2<double> q = pixel_to_plane(double(u), double(v), params);
        const Vec3<double> dir = inv * stereographic_unproject(q, params);
        const auto ec = sphere_to_equirect(dir);
        const Vec2<double> px = equirect_coord_to_pixel(ec, src.width, src.height);
        for (int c = 0; c < nc; ++c)
          out.raster.at(u, v, c) =
              detail::sample_equirect(src.planes[static_cast<size_t>(c)], px.x(), px.y(), interp);
      }
    }
  });
  return out;
}

// The forward map of the same transform: exact on points, no interpolation.
inline std::vector<PixelCoord<double>> annotate_reproject(
    const std::vector<EquirectCoord<double>>& points, const Mat3<double>& rot,
    const ProjectionParams<double>& params) {
  params.validate();
  validate_rotation(rot);
  std::vector<PixelCoord<double>> out;
  out.reserve(points.size());
  for (const auto& c : points) {
    const Vec3<double> dir = rot * equirect_to_sphere(c);
    if (1.0 - dir.z() < 1e-12)
      fail(Err::point_at_projection_center, "annotation maps to the projection center");
    out.push_back(plane_to_pixel(stereographic_project(dir, params), params));
  }
  return out;
}

}  // namespace omni
