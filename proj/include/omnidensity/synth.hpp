#pragma once
#include <string>
#include <utility>
#include <vector>

#include "omnidensity/density.hpp"
#include "omnidensity/geom.hpp"
#include "omnidensity/image.hpp"

namespace omni {

// Virtual trellis: disks of one world radius on the plane z = k, viewed
// through the exact projection chain. k and the camera must not coincide.
struct SceneSpec {
  double k = -2.0;
  double disk_radius = 0.3;
  std::vector<Vec2<double>> disk_centers;
  ProjectionParams<double> params;
  Mat3<double> rotation = Mat3<double>::Identity();
  int supersample = 4;  // grid per pixel axis when rasterizing coverage

  void validate() const;
};

struct SynthDisk {
  Vec2<double> scene_xy;
  Vec2<double> centroid_px;  // coverage-weighted centroid of the projected disk
  double radius_px = 0;      // sqrt(area / pi) from sub-pixel coverage
  double distance_px = 0;    // centroid distance from the projection center
  Annotation annotation;     // bbox of the projected outline
};

// Binary raster (coverage thresholded at 0.5) plus per-disk measurements.
std::pair<StereoImage, std::vector<SynthDisk>> render_scene(const SceneSpec& spec);

// Local magnification (px per world unit) of the composed plane -> sphere ->
// plane -> pixel map: geometric mean of the two principal stretches of the
// numerical Jacobian, central differences with step 1e-5 * |k|.
double exact_scale_factor(const Vec2<double>& p, const SceneSpec& spec);

struct TissotSample {
  Vec3<double> direction;
  double eps = 0;
  std::vector<Vec2<double>> outline;
  Vec2<double> center{0, 0};
  double a = 0;  // semi-major
  double b = 0;  // semi-minor

  double eccentricity() const;
};

// Projected small circles with fitted ellipses. Stereographic mode works in
// pixel coordinates; the equirectangular comparison works in (lon, lat)
// radians, where a circle at latitude L stretches to axis ratio 1/cos(L).
std::vector<TissotSample> tissot(const std::vector<Vec3<double>>& directions, double eps,
                                 const ProjectionParams<double>& params);
std::vector<TissotSample> tissot_equirect(const std::vector<Vec3<double>>& directions,
                                          double eps);

// Ring layout for the distortion audit: 36 rings with t = rho/|k| uniform in
// [0.5, 12], disk counts growing with circumference, azimuths staggered per
// ring. Every ring lands inside [0.1, 1.0] * (width/2) of the default D anchor.
SceneSpec make_audit_scene(int size = 1024, double k = -2.0, double disk_radius = 0.3,
                           double d = 1.0, double r_span = 4.0, int supersample = 4);

struct AuditRow {
  double distance_px;
  double measured_radius_px;
  double exact_scale;
  double sigma_alpha_over_d;
};

struct AuditReport {
  std::vector<AuditRow> rows;         // every disk, sorted by distance
  double d_norm = 0;
  double sigma_alpha = 0;
  double annulus_lo = 0;              // 0.1 * d_norm
  double annulus_hi = 0;              // 1.0 * d_norm
  int in_annulus = 0;
  double pearson_measured = 0;        // measured radius vs sigma_alpha / D
  double pearson_exact = 0;           // exact scale vs sigma_alpha / D
  double max_rel_deviation = 0;       // exact scale vs best 1/D proportional fit
  bool radius_monotone = false;       // ring-mean radius strictly decreasing in D

  std::string csv() const;
};

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Core of the audit for disks already rendered; run_audit renders then delegates.
AuditReport audit_disks(const std::vector<SynthDisk>& disks, const SceneSpec& scene,
                        double sigma_alpha, double d_norm);

AuditReport run_audit(const SceneSpec& scene, double sigma_alpha = 12.0, double d_norm = 0.0);

}  // namespace omni
