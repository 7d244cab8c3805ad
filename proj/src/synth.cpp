#include "omnidensity/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "omnidensity/error.hpp"

namespace omni {

namespace {

// Forward map: scene point (x, y, k) -> rotated sphere -> plane Pi -> pixels.
Vec2<double> scene_to_pixel(const Vec2<double>& p, const SceneSpec& spec) {
  const Vec3<double> s =
      spec.rotation * project_to_sphere(Vec3<double>(p.x(), p.y(), spec.k));
  const auto px = plane_to_pixel(stereographic_project(s, spec.params), spec.params);
  return {px.u, px.v};
}

// Inverse: pixel -> plane -> sphere -> unrotate -> ray hit on z = k.
// Returns false when the ray does not reach the scene plane.
bool pixel_to_scene(double u, double v, const SceneSpec& spec, const Mat3<double>& rot_t,
                    Vec2<double>& out) {
  const Vec2<double> q = pixel_to_plane(u, v, spec.params);
  const Vec3<double> dir = rot_t * stereographic_unproject(q, spec.params);
  if (dir.z() * spec.k <= 0) return false;
  const double lambda = spec.k / dir.z();
  out = {lambda * dir.x(), lambda * dir.y()};
  return true;
}

}  // namespace

void SceneSpec::validate() const {
  require(std::abs(k) > 1e-12, Err::bad_argument, "scene plane passes through the camera");
  require(disk_radius > 0, Err::bad_argument, "disk radius must be positive");
  require(supersample >= 1 && supersample <= 64, Err::bad_argument,
          "supersample must be in [1, 64]");
  params.validate();
  validate_rotation(rotation);
  for (size_t i = 0; i < disk_centers.size(); ++i)
    for (size_t j = i + 1; j < disk_centers.size(); ++j)
      require((disk_centers[i] - disk_centers[j]).norm() > 2 * disk_radius,
              Err::bad_argument, "disks must be disjoint on the scene plane");
}

std::pair<StereoImage, std::vector<SynthDisk>> render_scene(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.params.width;
  const int h = spec.params.height;
  StereoImage img;
  img.raster = Image(w, h, 1);
  img.params = spec.params;
  img.mask = Maskb::Constant(h, w, 1);
  Planef& plane = img.raster.planes[0];

  const Mat3<double> rot_t = spec.rotation.transpose();
  const int ss = spec.supersample;
  const double r2 = spec.disk_radius * spec.disk_radius;
  std::vector<SynthDisk> disks;
  disks.reserve(spec.disk_centers.size());

  for (const auto& c : spec.disk_centers) {
    {  // reject disks whose center direction reaches the projection center
      const Vec3<double> s =
          spec.rotation * project_to_sphere(Vec3<double>(c.x(), c.y(), spec.k));
      require(1.0 - s.z() >= 1e-6, Err::disk_behind_camera,
              "disk projects onto the projection center");
    }
    // pixel window from the forward-mapped rim
    double u0 = 1e300, v0 = 1e300, u1 = -1e300, v1 = -1e300;
    for (int i = 0; i < 64; ++i) {
      const double phi = 2 * M_PI * i / 64;
      const Vec2<double> rim = c + spec.disk_radius * Vec2<double>(std::cos(phi), std::sin(phi));
      const Vec2<double> px = scene_to_pixel(rim, spec);
      u0 = std::min(u0, px.x());
      u1 = std::max(u1, px.x());
      v0 = std::min(v0, px.y());
      v1 = std::max(v1, px.y());
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(u0)) - 1);
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(u1)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(v0)) - 1);
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(v1)) + 1);

    double area = 0, mx = 0, my = 0;
    const double inv_n = 1.0 / (ss * ss);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        int hits = 0;
        for (int sy = 0; sy < ss; ++sy) {
          const double vv = y + (sy + 0.5) / ss - 0.5;
          for (int sx = 0; sx < ss; ++sx) {
            const double uu = x + (sx + 0.5) / ss - 0.5;
            Vec2<double> sp;
            if (pixel_to_scene(uu, vv, spec, rot_t, sp) && (sp - c).squaredNorm() <= r2)
              ++hits;
          }
        }
        if (hits == 0) continue;
        const double cov = hits * inv_n;
        area += cov;
        mx += cov * x;
        my += cov * y;
        if (cov >= 0.5) plane(y, x) = 1.0f;
      }
    }
    require(area > 0, Err::bad_argument, "disk rasterized to zero area");

    SynthDisk d;
    d.scene_xy = c;
    d.centroid_px = {mx / area, my / area};
    d.radius_px = std::sqrt(area / M_PI);
    d.distance_px = distance_from_center(
        d.centroid_px, Vec2<double>(spec.params.center_u, spec.params.center_v));
    d.annotation = Annotation::from_bbox(u0, v0, u1, v1);
    disks.push_back(std::move(d));
  }
  return {std::move(img), std::move(disks)};
}

double exact_scale_factor(const Vec2<double>& p, const SceneSpec& spec) {
  const double h = 1e-5 * std::abs(spec.k);
  Vec2<double> du, dv;
  try {
    const Vec2<double> xp = scene_to_pixel(p + Vec2<double>(h, 0), spec);
    const Vec2<double> xm = scene_to_pixel(p - Vec2<double>(h, 0), spec);
    const Vec2<double> yp = scene_to_pixel(p + Vec2<double>(0, h), spec);
    const Vec2<double> ym = scene_to_pixel(p - Vec2<double>(0, h), spec);
    du = (xp - xm) / (2 * h);
    dv = (yp - ym) / (2 * h);
  } catch (const Error& e) {
    if (e.code == Err::at_projection_center)
      fail(Err::near_singularity, "probe point maps onto the projection center");
    throw;
  }
  // geometric mean of the principal stretches = sqrt(|det J|)
  const double det = du.x() * dv.y() - du.y() * dv.x();
  return std::sqrt(std::abs(det));
}

double TissotSample::eccentricity() const {
  require(a > 0 && b > 0 && a >= b, Err::bad_argument, "invalid ellipse axes");
  return std::sqrt(1.0 - (b * b) / (a * a));
}

namespace {

// Algebraic conic fit through the outline, then axes from the quadratic form.
TissotSample fit_ellipse(std::vector<Vec2<double>> outline) {
  require(outline.size() >= 6, Err::bad_argument, "need >= 6 outline points");
  Vec2<double> mean{0, 0};
  for (const auto& p : outline) mean += p;
  mean /= static_cast<double>(outline.size());
  double scale = 0;
  for (const auto& p : outline) scale = std::max(scale, (p - mean).norm());
  require(scale > 0, Err::bad_argument, "degenerate outline");

  Eigen::MatrixXd A(static_cast<Eigen::Index>(outline.size()), 6);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Vec2<double> q = (outline[static_cast<size_t>(i)] - mean) / scale;
    A(i, 0) = q.x() * q.x();
    A(i, 1) = q.x() * q.y();
    A(i, 2) = q.y() * q.y();
    A(i, 3) = q.x();
    A(i, 4) = q.y();
    A(i, 5) = 1.0;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd c = svd.matrixV().col(5);
  const double ca = c(0), cb = c(1), cc = c(2), cd = c(3), ce = c(4), cf = c(5);

  Eigen::Matrix2d M;
  M << ca, cb / 2, cb / 2, cc;
  const Eigen::Vector2d rhs(-cd / 2, -ce / 2);
  const Eigen::Vector2d x0 = M.fullPivLu().solve(rhs);
  const double f0 = ca * x0.x() * x0.x() + cb * x0.x() * x0.y() + cc * x0.y() * x0.y() +
                    cd * x0.x() + ce * x0.y() + cf;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  const double l0 = es.eigenvalues()(0);
  const double l1 = es.eigenvalues()(1);
  require(l0 * f0 < 0 && l1 * f0 < 0, Err::bad_argument, "outline is not an ellipse");

  TissotSample s;
  const double ax0 = std::sqrt(-f0 / l0) * scale;
  const double ax1 = std::sqrt(-f0 / l1) * scale;
  s.a = std::max(ax0, ax1);
  s.b = std::min(ax0, ax1);
  s.center = mean + Vec2<double>(x0.x(), x0.y()) * scale;
  s.outline = std::move(outline);
  return s;
}

constexpr int kOutlineSamples = 256;

std::vector<Vec3<double>> small_circle(const Vec3<double>& dir, double eps) {
  Vec3<double> e1 = dir.cross(std::abs(dir.z()) < 0.9 ? Vec3<double>::UnitZ()
                                                      : Vec3<double>::UnitX());
  e1.normalize();
  const Vec3<double> e2 = dir.cross(e1).normalized();
  std::vector<Vec3<double>> pts;
  pts.reserve(kOutlineSamples);
  for (int i = 0; i < kOutlineSamples; ++i) {
    const double phi = 2 * M_PI * i / kOutlineSamples;
    pts.push_back(std::cos(eps) * dir + std::sin(eps) * (std::cos(phi) * e1 + std::sin(phi) * e2));
  }
  return pts;
}

void check_tissot_pre(const Vec3<double>& dir, double eps) {
  require(eps > 0 && eps <= 0.05, Err::bad_argument, "eps must be in (0, 0.05] rad");
  const double angle_from_n = std::acos(std::clamp(dir.z(), -1.0, 1.0));
  require(angle_from_n > 2 * eps, Err::near_projection_center,
          "direction too close to the projection center");
}

}  // namespace

std::vector<TissotSample> tissot(const std::vector<Vec3<double>>& directions, double eps,
                                 const ProjectionParams<double>& params) {
  params.validate();
  std::vector<TissotSample> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    const Vec3<double> dir = d.normalized();
    check_tissot_pre(dir, eps);
    std::vector<Vec2<double>> outline;
    outline.reserve(kOutlineSamples);
    for (const auto& s : small_circle(dir, eps)) {
      const auto px = plane_to_pixel(stereographic_project(s, params), params);
      outline.emplace_back(px.u, px.v);
    }
    TissotSample t = fit_ellipse(std::move(outline));
    t.direction = dir;
    t.eps = eps;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TissotSample> tissot_equirect(const std::vector<Vec3<double>>& directions,
                                          double eps) {
  std::vector<TissotSample> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    const Vec3<double> dir = d.normalized();
    check_tissot_pre(dir, eps);
    const auto c0 = sphere_to_equirect(dir);
    std::vector<Vec2<double>> outline;
    outline.reserve(kOutlineSamples);
    for (const auto& s : small_circle(dir, eps)) {
      const auto ec = sphere_to_equirect(s);
      double lon_rel = ec.lon - c0.lon;  // unwrap across the +-pi seam
      if (lon_rel > M_PI) lon_rel -= 2 * M_PI;
      if (lon_rel < -M_PI) lon_rel += 2 * M_PI;
      outline.emplace_back(c0.lon + lon_rel, ec.lat);
    }
    TissotSample t = fit_ellipse(std::move(outline));
    t.direction = dir;
    t.eps = eps;
    out.push_back(std::move(t));
  }
  return out;
}

SceneSpec make_audit_scene(int size, double k, double disk_radius, double d, double r_span,
                           int supersample) {
  SceneSpec spec;
  spec.k = k;
  spec.disk_radius = disk_radius;
  spec.supersample = supersample;
  spec.params = make_params<double>(size, size, d, r_span);
  constexpr int kRings = 36;
  constexpr double kT0 = 0.5, kT1 = 12.0;
  constexpr double kGolden = 2.399963229728653;
  for (int i = 0; i < kRings; ++i) {
    const double t = kT0 + (kT1 - kT0) * i / (kRings - 1);
    const double rho = std::abs(spec.k) * t;
    const int n = std::max(5, static_cast<int>(std::lround(2.2 * t)));
    for (int j = 0; j < n; ++j) {
      const double phi = kGolden * i + 2 * M_PI * j / n;
      spec.disk_centers.emplace_back(rho * std::cos(phi), rho * std::sin(phi));
    }
  }
  return spec;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), Err::length_mismatch, "pearson needs paired samples");
  require(x.size() >= 2, Err::empty_input, "pearson needs >= 2 samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  require(sxx > 0 && syy > 0, Err::bad_argument, "pearson undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

AuditReport audit_disks(const std::vector<SynthDisk>& disks, const SceneSpec& scene,
                        double sigma_alpha, double d_norm) {
  AuditReport rep;
  rep.sigma_alpha = sigma_alpha;
  rep.d_norm = d_norm > 0 ? d_norm : scene.params.width / 2.0;
  rep.annulus_lo = 0.1 * rep.d_norm;
  rep.annulus_hi = 1.0 * rep.d_norm;

  for (const auto& d : disks) {
    AuditRow row;
    row.distance_px = d.distance_px;
    row.measured_radius_px = d.radius_px;
    row.exact_scale = exact_scale_factor(d.scene_xy, scene);
    row.sigma_alpha_over_d =
        d.distance_px > 0 ? sigma_alpha / (d.distance_px / rep.d_norm) : 0.0;
    rep.rows.push_back(row);
  }
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const AuditRow& a, const AuditRow& b) { return a.distance_px < b.distance_px; });

  std::vector<double> xs, ym, ye;
  for (const auto& r : rep.rows) {
    if (r.distance_px < rep.annulus_lo || r.distance_px > rep.annulus_hi) continue;
    xs.push_back(r.sigma_alpha_over_d);
    ym.push_back(r.measured_radius_px);
    ye.push_back(r.exact_scale);
  }
  rep.in_annulus = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    rep.pearson_measured = pearson(xs, ym);
    rep.pearson_exact = pearson(xs, ye);
    // best proportional fit exact ~ c * (sigma_alpha / D)
    double num = 0, den = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      num += ye[i] * xs[i];
      den += xs[i] * xs[i];
    }
    const double c = num / den;
    for (size_t i = 0; i < xs.size(); ++i)
      rep.max_rel_deviation =
          std::max(rep.max_rel_deviation, std::abs(ye[i] - c * xs[i]) / ye[i]);
  }

  // ring-mean radius must fall strictly as ring distance grows
  std::map<long, std::pair<double, int>> rings;  // scene radius (quantized) -> radius sum, n
  for (const auto& d : disks) {
    const long key = std::lround(d.scene_xy.norm() * 1e6);
    auto& slot = rings[key];
    slot.first += d.radius_px;
    slot.second += 1;
  }
  rep.radius_monotone = rings.size() >= 2;
  double prev = 1e300;
  for (const auto& [key, slot] : rings) {  // keys ascend with distance
    const double mean_radius = slot.first / slot.second;
    if (mean_radius >= prev) rep.radius_monotone = false;
    prev = mean_radius;
  }
  return rep;
}

AuditReport run_audit(const SceneSpec& scene, double sigma_alpha, double d_norm) {
  auto [img, disks] = render_scene(scene);
  (void)img;
  return audit_disks(disks, scene, sigma_alpha, d_norm);
}

std::string AuditReport::csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "distance_px,measured_radius_px,exact_scale,sigma_alpha_over_d\n";
  for (const auto& r : rows)
    os << r.distance_px << ',' << r.measured_radius_px << ',' << r.exact_scale << ','
       << r.sigma_alpha_over_d << '\n';
  return os.str();
}

}  // namespace omni
