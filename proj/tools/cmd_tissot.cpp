#include <cmath>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/geom.hpp"
#include "omnidensity/synth.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace fs = std::filesystem;

namespace {

struct Opts {
  std::string output;
  std::string mode = "stereographic";
  double eps = 0.01;
  int lat_steps = 5;
  int lon_steps = 8;
  int width = 1024;
  int height = 1024;
  double d = 1.0;
  double r_span = 4.0;
};

// Directions on a lat/lon grid, kept away from the poles so the indicatrix
// never straddles the projection center or the equirect seam rows.
std::vector<Vec3<double>> direction_grid(int lat_steps, int lon_steps) {
  std::vector<Vec3<double>> dirs;
  for (int i = 0; i < lat_steps; ++i) {
    const double lat = -75.0 + 150.0 * i / (lat_steps - 1);  // degrees
    for (int j = 0; j < lon_steps; ++j) {
      const double lon = -180.0 + 360.0 * j / lon_steps;
      const double la = lat * M_PI / 180.0;
      const double lo = lon * M_PI / 180.0;
      dirs.push_back(equirect_to_sphere(EquirectCoord<double>{lo, la}));
    }
  }
  return dirs;
}

void run(const Opts& o) {
  require(o.lat_steps >= 2 && o.lon_steps >= 1, Err::bad_argument,
          "grid needs at least 2 latitude and 1 longitude step");
  RunRecord rec;
  rec.subcommand = "tissot";
  rec.config = json{{"output", o.output},       {"mode", o.mode},
                    {"eps", o.eps},             {"lat-steps", o.lat_steps},
                    {"lon-steps", o.lon_steps}, {"width", o.width},
                    {"height", o.height},       {"d", o.d},
                    {"r-span", o.r_span}};

  const auto dirs = direction_grid(o.lat_steps, o.lon_steps);
  std::vector<TissotSample> samples;
  if (o.mode == "stereographic") {
    auto params = make_params(o.width, o.height, o.d, o.r_span);
    samples = tissot(dirs, o.eps, params);
  } else {
    samples = tissot_equirect(dirs, o.eps);
  }

  std::ostringstream csv;
  csv.precision(10);
  csv << "lon,lat,center_x,center_y,a,b,eccentricity\n";
  double max_ecc = 0;
  for (const auto& s : samples) {
    const auto c = sphere_to_equirect(s.direction);
    csv << c.lon << ',' << c.lat << ',' << s.center.x() << ',' << s.center.y() << ','
        << s.a << ',' << s.b << ',' << s.eccentricity() << '\n';
    max_ecc = std::max(max_ecc, s.eccentricity());
  }
  fs::create_directories(fs::path(o.output).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(o.output).parent_path());
  atomic_write_text(o.output, csv.str());
  rec.add_output(o.output);
  rec.write(o.output + ".run.json");

  std::cout << json{{"samples", samples.size()}, {"max_eccentricity", max_ecc}}.dump()
            << "\n";
}

}  // namespace

void register_tissot(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "tissot", "Fit ellipses to projected small circles over a direction grid");
  sub->add_option("--output", o->output, "CSV output path")->required();
  sub->add_option("--mode", o->mode, "Projection: stereographic | equirect")
      ->check(CLI::IsMember({"stereographic", "equirect"}));
  sub->add_option("--eps", o->eps, "Angular radius of each circle in radians");
  sub->add_option("--lat-steps", o->lat_steps, "Latitude rows in the grid");
  sub->add_option("--lon-steps", o->lon_steps, "Longitude columns in the grid");
  sub->add_option("--width", o->width, "Raster width for stereographic mode");
  sub->add_option("--height", o->height, "Raster height for stereographic mode");
  sub->add_option("--d", o->d, "Projection plane offset");
  sub->add_option("--r-span", o->r_span, "Plane radius mapped to the half image size");
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
