#pragma once
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "omnidensity/density.hpp"
#include "omnidensity/error.hpp"
#include "omnidensity/image.hpp"
#include "omnidensity/rng.hpp"

namespace omni {

enum class Quadrant { NW, NE, SW, SE };

// Alignment rotations are named by the on-screen counterclockwise angle
// (v-axis down). Each quadrant gets the unique one that moves the original
// image center, sitting on one of its corners, to the upper-left corner.
enum class Align { rot0, rot90, rot180, rot270 };

inline Align align_for(Quadrant q) {
  switch (q) {
    case Quadrant::NW: return Align::rot180;
    case Quadrant::NE: return Align::rot270;
    case Quadrant::SW: return Align::rot90;
    case Quadrant::SE: return Align::rot0;
  }
  fail(Err::bad_argument, "bad quadrant");
}

inline const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::NW: return "NW";
    case Quadrant::NE: return "NE";
    case Quadrant::SW: return "SW";
    case Quadrant::SE: return "SE";
  }
  return "?";
}

inline const char* align_name(Align a) {
  switch (a) {
    case Align::rot0: return "rot0";
    case Align::rot90: return "rot90";
    case Align::rot180: return "rot180";
    case Align::rot270: return "rot270";
  }
  return "?";
}

struct AugmentOp {
  double theta = 0.0;
  bool flip = false;
  Quadrant quadrant = Quadrant::SE;
  Align align = Align::rot0;
};

// A training sample plus enough provenance to replay its transform chain.
// distortion_center is the original image center in this tile's coordinates;
// for an aligned quadrant it is exactly the upper-left corner (-0.5, -0.5).
struct Tile {
  Image raster;
  Maskb mask;
  Annotations anns;
  std::string source_id;
  AugmentOp op;
  Vec2<double> offset{0, 0};
  Vec2<double> distortion_center{0, 0};
};

namespace detail {

template <class T>
Plane<T> align_plane(const Plane<T>& p, Align a) {
  switch (a) {
    case Align::rot0: return p;
    case Align::rot90: return p.transpose().colwise().reverse();
    case Align::rot180: return p.reverse();
    case Align::rot270: return p.transpose().rowwise().reverse();
  }
  fail(Err::bad_argument, "bad alignment");
}

inline Vec2<double> align_point(const Vec2<double>& p, Align a, int n) {
  const double m = n - 1.0;
  switch (a) {
    case Align::rot0: return p;
    case Align::rot90: return {p.y(), m - p.x()};
    case Align::rot180: return {m - p.x(), m - p.y()};
    case Align::rot270: return {m - p.y(), p.x()};
  }
  fail(Err::bad_argument, "bad alignment");
}

inline Annotation align_annotation(const Annotation& a, Align al, int n) {
  const Vec2<double> c0 = align_point({a.u_min, a.v_min}, al, n);
  const Vec2<double> c1 = align_point({a.u_max, a.v_max}, al, n);
  Annotation out;
  out.u_min = std::min(c0.x(), c1.x());
  out.u_max = std::max(c0.x(), c1.x());
  out.v_min = std::min(c0.y(), c1.y());
  out.v_max = std::max(c0.y(), c1.y());
  out.center = align_point(a.center, al, n);
  return out;
}

inline float sample_bilinear_zero(const Planef& p, double x, double y, bool& inside) {
  const int w = static_cast<int>(p.cols());
  const int h = static_cast<int>(p.rows());
  inside = x >= -0.5 && x <= w - 0.5 && y >= -0.5 && y <= h - 0.5;
  if (!inside) return 0.0f;
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double ax = x - x0;
  const double ay = y - y0;
  auto clamped = [&](int yy, int xx) -> double {
    return p(std::clamp(yy, 0, h - 1), std::clamp(xx, 0, w - 1));
  };
  const double top = clamped(y0, x0) * (1 - ax) + clamped(y0, x0 + 1) * ax;
  const double bot = clamped(y0 + 1, x0) * (1 - ax) + clamped(y0 + 1, x0 + 1) * ax;
  return static_cast<float>(top * (1 - ay) + bot * ay);
}

}  // namespace detail

// Counterclockwise in (u, v): theta = pi/2 carries (c + a, c) to (c, c + a).
inline Vec2<double> rotate_point_about(const Vec2<double>& p, const Vec2<double>& c,
                                       double theta) {
  const double co = std::cos(theta);
  const double si = std::sin(theta);
  const Vec2<double> r = p - c;
  return {c.x() + co * r.x() - si * r.y(), c.y() + si * r.x() + co * r.y()};
}

// Raster rotation about the projection center with bilinear resampling.
// Annotation centers rotate exactly; bboxes become the bounds of their rotated
// corners. Annotations whose center leaves the raster are dropped. Pixels that
// sample outside the source are black with mask 0.
inline std::pair<StereoImage, Annotations> rotate_about_center(const StereoImage& img,
                                                               const Annotations& anns,
                                                               double theta) {
  img.validate();
  require(img.raster.width == img.raster.height, Err::non_square_image,
          "rotation requires a square raster");
  const Vec2<double> c(img.params.center_u, img.params.center_v);
  const int w = img.raster.width;
  const int h = img.raster.height;
  const int nc = img.raster.channels();

  StereoImage out;
  out.raster = Image(w, h, nc);
  out.params = img.params;
  out.mask = Maskb::Zero(h, w);
  const double co = std::cos(-theta);
  const double si = std::sin(-theta);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double ru = u - c.x();
      const double rv = v - c.y();
      const double sx = c.x() + co * ru - si * rv;
      const double sy = c.y() + si * ru + co * rv;
      bool inside = false;
      for (int ch = 0; ch < nc; ++ch)
        out.raster.at(u, v, ch) =
            detail::sample_bilinear_zero(img.raster.planes[static_cast<size_t>(ch)], sx, sy,
                                         inside);
      if (inside) {
        bool valid = true;
        if (img.mask) {
          const int mx = std::clamp(static_cast<int>(std::lround(sx)), 0, w - 1);
          const int my = std::clamp(static_cast<int>(std::lround(sy)), 0, h - 1);
          valid = (*img.mask)(my, mx) != 0;
        }
        (*out.mask)(v, u) = valid ? 1 : 0;
      }
    }
  }

  Annotations out_anns;
  for (const auto& a : anns) {
    const Vec2<double> p00 = rotate_point_about({a.u_min, a.v_min}, c, theta);
    const Vec2<double> p01 = rotate_point_about({a.u_min, a.v_max}, c, theta);
    const Vec2<double> p10 = rotate_point_about({a.u_max, a.v_min}, c, theta);
    const Vec2<double> p11 = rotate_point_about({a.u_max, a.v_max}, c, theta);
    Annotation r;
    r.center = rotate_point_about(a.center, c, theta);
    r.u_min = std::min({p00.x(), p01.x(), p10.x(), p11.x()});
    r.u_max = std::max({p00.x(), p01.x(), p10.x(), p11.x()});
    r.v_min = std::min({p00.y(), p01.y(), p10.y(), p11.y()});
    r.v_max = std::max({p00.y(), p01.y(), p10.y(), p11.y()});
    if (r.center.x() >= -0.5 && r.center.x() <= w - 0.5 && r.center.y() >= -0.5 &&
        r.center.y() <= h - 0.5)
      out_anns.push_back(r);
  }
  return {std::move(out), std::move(out_anns)};
}

// Exact column reversal; the mirror axis is the vertical line through the
// raster center under the pixel-center convention.
inline std::pair<StereoImage, Annotations> flip_horizontal(const StereoImage& img,
                                                           const Annotations& anns) {
  img.validate();
  const int w = img.raster.width;
  StereoImage out;
  out.raster = img.raster;
  for (auto& p : out.raster.planes) p = p.rowwise().reverse().eval();
  out.params = img.params;
  if (img.mask) out.mask = img.mask->rowwise().reverse().eval();

  Annotations out_anns;
  out_anns.reserve(anns.size());
  for (const auto& a : anns) {
    Annotation f = a;
    f.u_min = (w - 1.0) - a.u_max;
    f.u_max = (w - 1.0) - a.u_min;
    f.center = {(w - 1.0) - a.center.x(), a.center.y()};
    out_anns.push_back(f);
  }
  return {std::move(out), std::move(out_anns)};
}

// Quadrant split plus alignment. Each annotation belongs to the quadrant that
// contains its center (half-open split at the midlines), and every aligned
// output carries the original image center at its upper-left corner.
inline std::vector<Tile> divide_and_align(const StereoImage& img, const Annotations& anns,
                                          const std::string& source_id = "",
                                          double theta = 0.0, bool flip = false) {
  img.validate();
  require(img.raster.width % 2 == 0 && img.raster.height % 2 == 0, Err::odd_dimensions,
          "quadrant split needs even dimensions");
  require(img.raster.width == img.raster.height, Err::non_square_image,
          "quadrant split requires a square raster");
  const int n = img.raster.width / 2;
  const double mid = n - 0.5;  // split line in pixel-center coordinates

  std::vector<Tile> tiles;
  for (Quadrant q : {Quadrant::NW, Quadrant::NE, Quadrant::SW, Quadrant::SE}) {
    const bool east = q == Quadrant::NE || q == Quadrant::SE;
    const bool south = q == Quadrant::SW || q == Quadrant::SE;
    const int ou = east ? n : 0;
    const int ov = south ? n : 0;
    const Align al = align_for(q);

    Tile t;
    t.source_id = source_id;
    t.op = {theta, flip, q, al};
    t.offset = {double(ou), double(ov)};
    t.distortion_center = {-0.5, -0.5};
    t.raster = Image(n, n, img.raster.channels());
    for (int c = 0; c < img.raster.channels(); ++c)
      t.raster.planes[static_cast<size_t>(c)] = detail::align_plane<float>(
          img.raster.planes[static_cast<size_t>(c)].block(ov, ou, n, n).eval(), al);
    t.mask = img.mask ? detail::align_plane<std::uint8_t>(img.mask->block(ov, ou, n, n).eval(), al)
                      : Maskb::Constant(n, n, 1);

    for (const auto& a : anns) {
      const bool a_east = a.center.x() >= mid;
      const bool a_south = a.center.y() >= mid;
      if (a_east != east || a_south != south) continue;
      Annotation local = a;
      local.u_min -= ou;
      local.u_max -= ou;
      local.v_min -= ov;
      local.v_max -= ov;
      local.center -= Vec2<double>(ou, ov);
      t.anns.push_back(detail::align_annotation(local, al, n));
    }
    tiles.push_back(std::move(t));
  }
  return tiles;
}

// Bilinear resize; annotation coordinates follow the pixel-center mapping
// u' = (u + 0.5) * (new / old) - 0.5.
inline std::pair<Image, Annotations> resize_bilinear(const Image& img, const Annotations& anns,
                                                     int new_w, int new_h) {
  require(new_w > 0 && new_h > 0, Err::bad_argument, "resize dims must be positive");
  Image out(new_w, new_h, img.channels());
  const double fx = double(img.width) / new_w;
  const double fy = double(img.height) / new_h;
  for (int c = 0; c < img.channels(); ++c) {
    const Planef& src = img.planes[static_cast<size_t>(c)];
    for (int y = 0; y < new_h; ++y) {
      const double sy = (y + 0.5) * fy - 0.5;
      for (int x = 0; x < new_w; ++x) {
        const double sx = (x + 0.5) * fx - 0.5;
        bool inside = false;
        out.at(x, y, c) = detail::sample_bilinear_zero(src, sx, sy, inside);
      }
    }
  }
  const double gx = double(new_w) / img.width;
  const double gy = double(new_h) / img.height;
  Annotations out_anns;
  out_anns.reserve(anns.size());
  for (const auto& a : anns) {
    Annotation s = a;
    s.u_min = (a.u_min + 0.5) * gx - 0.5;
    s.u_max = (a.u_max + 0.5) * gx - 0.5;
    s.v_min = (a.v_min + 0.5) * gy - 0.5;
    s.v_max = (a.v_max + 0.5) * gy - 0.5;
    s.center = {(a.center.x() + 0.5) * gx - 0.5, (a.center.y() + 0.5) * gy - 0.5};
    out_anns.push_back(s);
  }
  return {std::move(out), std::move(out_anns)};
}

// Downscale to target x target, then cut into (target/tile)^2 plain tiles.
// Annotations follow their centers under the same half-open rule as quadrants.
inline std::vector<Tile> downscale_and_tile(const Image& img, const Annotations& anns,
                                            int target = 1024, int tile = 512,
                                            const std::string& source_id = "",
                                            const Vec2<double>& distortion_center = {-0.5,
                                                                                     -0.5}) {
  require(img.width == img.height, Err::non_square_image, "tiling requires a square raster");
  require(target % tile == 0, Err::bad_argument, "tile size must divide target");
  auto [small, sanns] = resize_bilinear(img, anns, target, target);
  const double g = double(target) / img.width;
  const Vec2<double> dc{(distortion_center.x() + 0.5) * g - 0.5,
                        (distortion_center.y() + 0.5) * g - 0.5};

  const int per_side = target / tile;
  std::vector<Tile> tiles;
  for (int ty = 0; ty < per_side; ++ty) {
    for (int tx = 0; tx < per_side; ++tx) {
      Tile t;
      t.source_id = source_id;
      t.offset = {double(tx * tile), double(ty * tile)};
      t.distortion_center = dc - t.offset;
      t.raster = Image(tile, tile, small.channels());
      for (int c = 0; c < small.channels(); ++c)
        t.raster.planes[static_cast<size_t>(c)] =
            small.planes[static_cast<size_t>(c)].block(ty * tile, tx * tile, tile, tile);
      t.mask = Maskb::Constant(tile, tile, 1);
      for (const auto& a : sanns) {
        // half-open cell membership by center
        const int cx = std::min(per_side - 1,
                                std::max(0, static_cast<int>(std::floor((a.center.x() + 0.5) / tile))));
        const int cy = std::min(per_side - 1,
                                std::max(0, static_cast<int>(std::floor((a.center.y() + 0.5) / tile))));
        if (cx != tx || cy != ty) continue;
        Annotation local = a;
        local.u_min = std::max(a.u_min - t.offset.x(), -0.5);
        local.u_max = std::min(a.u_max - t.offset.x(), tile - 0.5);
        local.v_min = std::max(a.v_min - t.offset.y(), -0.5);
        local.v_max = std::min(a.v_max - t.offset.y(), tile - 0.5);
        local.center = a.center - t.offset;
        t.anns.push_back(local);
      }
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

struct AugmentItem {
  std::string id;
  StereoImage image;
  Annotations anns;
};

// Replayable rotation angles for one source image: an independent stream keyed
// by (seed, id), uniform on the open interval (0, pi/2).
inline std::vector<double> augment_thetas(std::uint64_t seed, const std::string& id,
                                          int n_rotations) {
  auto rng = derive_stream(seed, id);
  std::vector<double> thetas;
  thetas.reserve(static_cast<size_t>(n_rotations));
  for (int i = 0; i < n_rotations; ++i) thetas.push_back(uniform_open(rng, 0.0, M_PI / 2));
  return thetas;
}

// Original + n random rotations, each optionally flipped (flip happens before
// rotation), each divided into 4 aligned quadrants:
// |items| * (1 + n_rotations) * 4 * (flip ? 2 : 1) tiles, streamed to the sink.
inline std::size_t augment_set(const std::vector<AugmentItem>& items, int n_rotations,
                               bool flip, std::uint64_t seed,
                               const std::function<void(Tile&&)>& sink) {
  require(n_rotations >= 0, Err::bad_argument, "n_rotations must be >= 0");
  std::size_t count = 0;
  for (const auto& item : items) {
    item.image.validate();
    std::vector<double> thetas{0.0};
    const auto random_thetas = augment_thetas(seed, item.id, n_rotations);
    thetas.insert(thetas.end(), random_thetas.begin(), random_thetas.end());
    for (double theta : thetas) {
      for (int f = 0; f < (flip ? 2 : 1); ++f) {
        StereoImage variant = item.image;
        Annotations vanns = item.anns;
        if (f == 1) std::tie(variant, vanns) = flip_horizontal(variant, vanns);
        if (theta != 0.0)
          std::tie(variant, vanns) = rotate_about_center(variant, vanns, theta);
        for (Tile& t : divide_and_align(variant, vanns, item.id, theta, f == 1)) {
          ++count;
          sink(std::move(t));
        }
      }
    }
  }
  return count;
}

}  // namespace omni
