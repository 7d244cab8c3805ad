#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "omnidensity/error.hpp"
#include "omnidensity/hull.hpp"
#include "omnidensity/types.hpp"

namespace omni {

struct Annotation {
  double u_min = 0, v_min = 0, u_max = 0, v_max = 0;
  Vec2<double> center{0, 0};

  static Annotation from_bbox(double u0, double v0, double u1, double v1) {
    Annotation a;
    a.u_min = u0;
    a.v_min = v0;
    a.u_max = u1;
    a.v_max = v1;
    a.center = Vec2<double>((u0 + u1) / 2, (v0 + v1) / 2);
    a.validate();
    return a;
  }

  static Annotation from_center(double u, double v, double half = 0.5) {
    return from_bbox(u - half, v - half, u + half, v + half);
  }

  void validate() const {
    require(u_min < u_max && v_min < v_max, Err::malformed_record,
            "bbox must have positive extent");
  }
};

using Annotations = std::vector<Annotation>;

struct FixedKernel {
  double sigma = 8.0;
};

struct GeometryAdaptiveKernel {
  int k = 3;
  double beta = 0.3;
  double fallback_sigma = 8.0;  // used when fewer than k+1 annotations exist
};

struct DistortionAdaptiveKernel {
  double sigma_alpha = 12.0;
  double d_norm = 0.0;  // 0: resolve to width/2 at render time
  double sigma_min = 2.0;
  double sigma_max = 0.0;  // 0: resolve to 4 * sigma_alpha
};

struct KernelSpec {
  std::variant<FixedKernel, GeometryAdaptiveKernel, DistortionAdaptiveKernel> policy =
      FixedKernel{};
  double truncation_radius = 4.0;  // in multiples of sigma

  void validate() const {
    require(truncation_radius >= 3.0, Err::bad_argument, "truncation radius must be >= 3");
    if (const auto* f = std::get_if<FixedKernel>(&policy)) {
      require(f->sigma > 0, Err::bad_argument, "sigma must be positive");
    } else if (const auto* g = std::get_if<GeometryAdaptiveKernel>(&policy)) {
      require(g->k >= 1, Err::bad_argument, "k must be >= 1");
      require(g->beta > 0 && g->fallback_sigma > 0, Err::bad_argument,
              "beta and fallback sigma must be positive");
    } else if (const auto* a = std::get_if<DistortionAdaptiveKernel>(&policy)) {
      require(a->sigma_alpha > 0, Err::bad_argument, "sigma_alpha must be positive");
      require(a->d_norm >= 0, Err::bad_argument, "d_norm must be >= 0");
      require(a->sigma_min > 0, Err::bad_argument, "sigma_min must be positive");
      const double smax = a->sigma_max > 0 ? a->sigma_max : 4 * a->sigma_alpha;
      require(a->sigma_min <= smax, Err::bad_argument, "sigma_min must be <= sigma_max");
    }
  }
};

struct DensityMap {
  Planed values;
  KernelSpec kernel;
  bool geometry_fallback_used = false;

  double sum() const { return values.size() ? values.sum() : 0.0; }
};

inline double distance_from_center(const Vec2<double>& p, const Vec2<double>& center) {
  return (p - center).norm();
}

// Fills in the render-time defaults: d_norm = width/2, sigma_max = 4 sigma_alpha.
inline DistortionAdaptiveKernel resolve_adaptive(const DistortionAdaptiveKernel& spec,
                                                 int width) {
  DistortionAdaptiveKernel r = spec;
  if (r.d_norm <= 0) r.d_norm = width / 2.0;
  if (r.sigma_max <= 0) r.sigma_max = 4 * r.sigma_alpha;
  return r;
}

// sigma = sigma_alpha / (D / d_norm), clamped; the clamp also covers D = 0.
inline double adaptive_sigma(const Vec2<double>& p, const Vec2<double>& center,
                             const DistortionAdaptiveKernel& spec) {
  require(spec.d_norm > 0 && spec.sigma_max > 0, Err::bad_argument,
          "adaptive spec must be resolved");
  const double dist = distance_from_center(p, center);
  if (dist <= 0) return spec.sigma_max;
  return std::clamp(spec.sigma_alpha * spec.d_norm / dist, spec.sigma_min, spec.sigma_max);
}

// beta times the mean distance to the k nearest other centers; p must be an
// element of all_points (one zero-distance match is discarded as the self).
inline double geometry_adaptive_sigma(const Vec2<double>& p,
                                      const std::vector<Vec2<double>>& all_points, int k,
                                      double beta) {
  require(k >= 1, Err::bad_argument, "k must be >= 1");
  require(static_cast<int>(all_points.size()) >= k + 1, Err::too_few_points,
          "need at least k+1 annotations");
  std::vector<double> dist;
  dist.reserve(all_points.size());
  for (const auto& q : all_points) dist.push_back((q - p).norm());
  std::sort(dist.begin(), dist.end());
  double mean = 0;
  for (int i = 1; i <= k; ++i) mean += dist[static_cast<size_t>(i)];  // dist[0] is the self
  return beta * mean / k;
}

namespace detail {

// One truncated Gaussian, renormalized on its clamped window so every
// annotation deposits exactly unit mass.
inline void splat_gaussian(Planed& map, const Vec2<double>& c, double sigma, double trunc) {
  const int w = static_cast<int>(map.cols());
  const int h = static_cast<int>(map.rows());
  const double r = trunc * sigma;
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x() - r)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x() + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y() - r)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y() + r)));
  require(x0 <= x1 && y0 <= y1, Err::bad_argument, "annotation window left the raster");

  const double inv2s2 = 1.0 / (2 * sigma * sigma);
  Planed win(y1 - y0 + 1, x1 - x0 + 1);
  for (int y = y0; y <= y1; ++y) {
    const double dy2 = (y - c.y()) * (y - c.y());
    for (int x = x0; x <= x1; ++x) {
      const double dx2 = (x - c.x()) * (x - c.x());
      win(y - y0, x - x0) = std::exp(-(dx2 + dy2) * inv2s2);
    }
  }
  const double total = win.sum();
  if (total <= std::numeric_limits<double>::min()) {
    // Degenerate sigma: the whole window underflowed. Deposit on the nearest pixel.
    const int nx = std::clamp(static_cast<int>(std::lround(c.x())), 0, w - 1);
    const int ny = std::clamp(static_cast<int>(std::lround(c.y())), 0, h - 1);
    map(ny, nx) += 1.0;
    return;
  }
  map.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1) += win / total;
}

}  // namespace detail

// Per-annotation sigma under the spec's policy. Exposed for tests and reports.
inline std::vector<double> kernel_sigmas(const Annotations& anns, int width,
                                         const Vec2<double>& center, const KernelSpec& spec,
                                         bool* fallback_used = nullptr) {
  spec.validate();
  std::vector<double> sigmas(anns.size(), 0.0);
  if (fallback_used) *fallback_used = false;
  if (const auto* f = std::get_if<FixedKernel>(&spec.policy)) {
    std::fill(sigmas.begin(), sigmas.end(), f->sigma);
  } else if (const auto* g = std::get_if<GeometryAdaptiveKernel>(&spec.policy)) {
    if (static_cast<int>(anns.size()) < g->k + 1) {
      std::fill(sigmas.begin(), sigmas.end(), g->fallback_sigma);
      if (fallback_used) *fallback_used = true;
    } else {
      std::vector<Vec2<double>> pts;
      pts.reserve(anns.size());
      for (const auto& a : anns) pts.push_back(a.center);
      for (size_t i = 0; i < anns.size(); ++i)
        sigmas[i] = geometry_adaptive_sigma(pts[i], pts, g->k, g->beta);
    }
  } else {
    const auto a = resolve_adaptive(std::get<DistortionAdaptiveKernel>(spec.policy), width);
    for (size_t i = 0; i < anns.size(); ++i)
      sigmas[i] = adaptive_sigma(anns[i].center, center, a);
  }
  return sigmas;
}

inline DensityMap render_density(const Annotations& anns, int width, int height,
                                 const Vec2<double>& center, const KernelSpec& spec) {
  require(width > 0 && height > 0, Err::bad_argument, "map dims must be positive");
  for (const auto& a : anns)
    require(a.center.x() >= -0.5 && a.center.x() <= width - 0.5 && a.center.y() >= -0.5 &&
                a.center.y() <= height - 0.5,
            Err::bad_argument, "annotation center outside the raster");

  DensityMap out;
  out.values = Planed::Zero(height, width);
  out.kernel = spec;
  const auto sigmas = kernel_sigmas(anns, width, center, spec, &out.geometry_fallback_used);
  for (size_t i = 0; i < anns.size(); ++i)
    detail::splat_gaussian(out.values, anns[i].center, sigmas[i], spec.truncation_radius);
  return out;
}

// Sum over the whole map, or over pixels whose centers fall inside the region.
inline double integrate_count(const DensityMap& map, const Polygon* region = nullptr) {
  if (!region) return map.sum();
  Vec2<double> lo, hi;
  polygon_bounds(*region, lo, hi);
  require(lo.x() >= -0.5 && lo.y() >= -0.5 && hi.x() <= map.values.cols() - 0.5 &&
              hi.y() <= map.values.rows() - 0.5,
          Err::bad_argument, "region outside map bounds");
  double total = 0;
  const int y0 = std::max(0, static_cast<int>(std::floor(lo.y())));
  const int y1 = std::min<int>(static_cast<int>(map.values.rows()) - 1,
                               static_cast<int>(std::ceil(hi.y())));
  const int x0 = std::max(0, static_cast<int>(std::floor(lo.x())));
  const int x1 = std::min<int>(static_cast<int>(map.values.cols()) - 1,
                               static_cast<int>(std::ceil(hi.x())));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (point_in_polygon(Vec2<double>(x, y), *region)) total += map.values(y, x);
  return total;
}

struct CountBins {
  double fine_step = 0.05;
  double fine_limit = 0.5;
  double coarse_step = 0.5;
  double c_max = 0.5;

  void validate() const {
    require(fine_step > 0 && coarse_step > 0 && fine_limit > 0 && c_max > 0,
            Err::bad_argument, "bin parameters must be positive");
    const double fine_n = fine_limit / fine_step;
    require(std::abs(fine_n - std::round(fine_n)) < 1e-9, Err::bad_argument,
            "fine_step must divide fine_limit evenly");
    const double coarse_n = (c_max - fine_limit) / coarse_step;
    require(c_max >= fine_limit && std::abs(coarse_n - std::round(coarse_n)) < 1e-9,
            Err::bad_argument, "c_max must be fine_limit plus a multiple of coarse_step");
  }

  // Upper boundaries [fine_step, ..., fine_limit, ..., c_max]; class i >= 1 is
  // (b[i-1], b[i]] with b[0] = 0, class 0 the {0} singleton, and one overflow
  // class past c_max. Shared by discretize and bin_bounds so the two agree by
  // construction.
  std::vector<double> boundaries() const {
    validate();
    std::vector<double> b{0.0};
    const int nf = static_cast<int>(std::round(fine_limit / fine_step));
    for (int i = 1; i <= nf; ++i) b.push_back(i * fine_step);
    const int nc = static_cast<int>(std::round((c_max - fine_limit) / coarse_step));
    for (int i = 1; i <= nc; ++i) b.push_back(fine_limit + i * coarse_step);
    return b;
  }

  int num_classes() const { return static_cast<int>(boundaries().size()) + 1; }
};

inline int discretize_count(double value, const CountBins& bins) {
  require(value >= 0, Err::negative_count, "count must be >= 0");
  if (value == 0) return 0;
  const auto b = bins.boundaries();
  if (value > b.back()) return static_cast<int>(b.size());  // overflow class
  // smallest i with value <= b[i]; value > 0 so i >= 1
  const auto it = std::lower_bound(b.begin(), b.end(), value);
  return static_cast<int>(it - b.begin());
}

struct BinInterval {
  double lo;  // exclusive, except the {0} singleton
  double hi;  // inclusive; +inf for the overflow class
  bool singleton_zero;
};

inline BinInterval bin_bounds(int index, const CountBins& bins) {
  const auto b = bins.boundaries();
  require(index >= 0 && index <= static_cast<int>(b.size()), Err::bad_argument,
          "class index out of range");
  if (index == 0) return {0.0, 0.0, true};
  if (index == static_cast<int>(b.size()))
    return {b.back(), std::numeric_limits<double>::infinity(), false};
  return {b[static_cast<size_t>(index) - 1], b[static_cast<size_t>(index)], false};
}

}  // namespace omni
