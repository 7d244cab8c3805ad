#include <doctest.h>

#include <cmath>

#include "omnidensity/resample.hpp"

using namespace omni;

namespace {

// value = lat, linear in the row coordinate, so bilinear sampling is exact
Image latitude_ramp(int w, int h) {
  Image img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    const double lat = M_PI / 2 - (y + 0.5) / h * M_PI;
    for (int x = 0; x < w; ++x) img.at(x, y, 0) = static_cast<float>(lat);
  }
  return img;
}

}  // namespace

TEST_CASE("equirect validation and pixel map anchors") {
  CHECK_THROWS_AS(validate_equirect(Image(64, 64, 1)), Error);
  validate_equirect(Image(64, 32, 1));

  const Vec2<double> top = equirect_coord_to_pixel({-M_PI, M_PI / 2}, 64, 32);
  CHECK(top.x() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(top.y() == doctest::Approx(-0.5).epsilon(1e-15));
  const Vec2<double> mid = equirect_coord_to_pixel({0.0, 0.0}, 4, 2);
  CHECK(mid.x() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(mid.y() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("longitude wraps and latitude clamps") {
  CHECK(detail::wrap_x(-1, 8) == 7);
  CHECK(detail::wrap_x(8, 8) == 0);
  CHECK(detail::wrap_x(-9, 8) == 7);
  CHECK(detail::clamp_y(-3, 8) == 0);
  CHECK(detail::clamp_y(9, 8) == 7);
}

TEST_CASE("reprojection reproduces a function linear in latitude") {
  const Image src = latitude_ramp(128, 64);
  auto params = make_params<double>(64, 64);
  const StereoImage out = reproject(src, Mat3<double>::Identity(), params);

  int checked = 0;
  for (int v = 0; v < 64; v += 3) {
    for (int u = 0; u < 64; u += 3) {
      const Vec2<double> q = pixel_to_plane(double(u), double(v), params);
      const Vec3<double> dir = stereographic_unproject(q, params);
      const auto ec = sphere_to_equirect(dir);
      const Vec2<double> px = equirect_coord_to_pixel(ec, src.width, src.height);
      // skip rows that trip the pole clamp, where the ramp is no longer linear
      if (px.y() < 0.5 || px.y() > src.height - 1.5) continue;
      CHECK(out.raster.at(u, v, 0) == doctest::Approx(ec.lat).epsilon(1e-5));
      ++checked;
    }
  }
  CHECK(checked > 200);
  CHECK((out.mask.value() == 1).all());
}

TEST_CASE("nearest interpolation picks exact grid values") {
  Image src(8, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) src.at(x, y, 0) = static_cast<float>(10 * y + x);
  CHECK(detail::sample_equirect(src.planes[0], 3.2, 1.4, Interp::nearest) == 13.0f);
  CHECK(detail::sample_equirect(src.planes[0], 7.6, 0.0, Interp::nearest) == 0.0f);  // wraps to x=0
  CHECK(detail::sample_equirect(src.planes[0], 0.0, 3.9, Interp::nearest) == 30.0f);  // clamps
}

TEST_CASE("thread count never changes the output") {
  const Image src = latitude_ramp(128, 64);
  auto params = make_params<double>(48, 48);
  const Mat3<double> rot = rotation_rpy(0.3, -0.2, 1.1);
  const StereoImage a = reproject(src, rot, params, Interp::bilinear, 1);
  const StereoImage b = reproject(src, rot, params, Interp::bilinear, 3);
  CHECK((a.raster.planes[0] == b.raster.planes[0]).all());
}

TEST_CASE("forward annotation mapping hits the anchor pixel") {
  ProjectionParams<double> params;
  params.d = 1;
  params.width = 2689;
  params.height = 2689;
  params.scale = 100;
  params.center_u = 1344;
  params.center_v = 1344;

  const auto px =
      annotate_reproject({{0.0, 0.0}}, Mat3<double>::Identity(), params);
  REQUIRE(px.size() == 1);
  CHECK(px[0].u == doctest::Approx(1544.0).epsilon(1e-12));
  CHECK(px[0].v == doctest::Approx(1344.0).epsilon(1e-12));

  CHECK_THROWS_AS(
      annotate_reproject({{0.0, M_PI / 2}}, Mat3<double>::Identity(), params), Error);
  try {
    annotate_reproject({{0.0, M_PI / 2}}, Mat3<double>::Identity(), params);
  } catch (const Error& e) {
    CHECK(e.code == Err::point_at_projection_center);
  }
}

TEST_CASE("rotation moves the sampled content the right way") {
  Image src(64, 32, 1);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 64; ++x) {
      const double lon = (x + 0.5) / 64 * 2 * M_PI - M_PI;
      src.at(x, y, 0) = static_cast<float>(std::cos(lon));
    }
  auto params = make_params<double>(33, 33);  // odd: center pixel is exact
  const Mat3<double> rot = rotation_rpy(0.0, M_PI / 2, 0.0);
  const StereoImage out = reproject(src, rot, params);
  // center pixel looks along -z; Ry(pi/2)^-1 carries that to +x, lon 0, cos = 1
  CHECK(out.raster.at(16, 16, 0) == doctest::Approx(1.0).epsilon(1e-2));
}
