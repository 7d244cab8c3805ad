#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/image_io.hpp"
#include "omnidensity/parallel.hpp"
#include "omnidensity/resample.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace {

struct Opts {
  std::string input;
  std::string output;
  int width = 0;   // 0: source height (square output)
  int height = 0;
  double d = 1.0;
  double r_span = 4.0;
  double scale = 0.0;     // 0: derived from r_span
  double center_u = -1.0; // <0: raster midpoint
  double center_v = -1.0;
  double roll = 0, pitch = 0, yaw = 0;
  std::string interp = "bilinear";
  int threads = 0;
};

void run(const Opts& o) {
  RunRecord rec;
  rec.subcommand = "reproject";
  rec.config = json{{"input", o.input},       {"output", o.output},   {"width", o.width},
                    {"height", o.height},     {"d", o.d},             {"r-span", o.r_span},
                    {"scale", o.scale},       {"center-u", o.center_u},
                    {"center-v", o.center_v}, {"roll", o.roll},       {"pitch", o.pitch},
                    {"yaw", o.yaw},           {"interp", o.interp},   {"threads", o.threads}};
  rec.add_input(o.input);

  const Image src = read_image(o.input);
  const int w = o.width > 0 ? o.width : src.height;
  const int h = o.height > 0 ? o.height : src.height;
  ProjectionParams<double> params = make_params<double>(w, h, o.d, o.r_span);
  if (o.scale > 0) params.scale = o.scale;
  if (o.center_u >= 0) params.center_u = o.center_u;
  if (o.center_v >= 0) params.center_v = o.center_v;
  params.validate();

  const Mat3<double> rot = rotation_rpy(o.roll, o.pitch, o.yaw);
  const Interp interp = o.interp == "nearest" ? Interp::nearest : Interp::bilinear;
  const StereoImage out = reproject(src, rot, params, interp, resolve_threads(o.threads));

  atomic_write_with(o.output, [&](const std::string& tmp) { write_png(out.raster, tmp); });
  rec.add_output(o.output);
  rec.write(o.output + ".run.json");
}

}  // namespace

void register_reproject(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub =
      app.add_subcommand("reproject", "Warp an equirectangular image to a stereographic view");
  sub->add_option("--input", o->input, "Equirectangular PNG/JPEG (2:1)")->required();
  sub->add_option("--output", o->output, "Output PNG path")->required();
  sub->add_option("--width", o->width, "Output width (default: source height)");
  sub->add_option("--height", o->height, "Output height (default: source height)");
  sub->add_option("--d", o->d, "Plane offset d >= 1");
  sub->add_option("--r-span", o->r_span, "Plane radius spanned by the short axis");
  sub->add_option("--scale", o->scale, "Pixels per plane unit (overrides --r-span)");
  sub->add_option("--center-u", o->center_u, "Projection center u (default: midpoint)");
  sub->add_option("--center-v", o->center_v, "Projection center v (default: midpoint)");
  sub->add_option("--roll", o->roll, "Rotation about x, radians");
  sub->add_option("--pitch", o->pitch, "Rotation about y, radians");
  sub->add_option("--yaw", o->yaw, "Rotation about z, radians");
  sub->add_option("--interp", o->interp, "nearest | bilinear")
      ->check(CLI::IsMember({"nearest", "bilinear"}));
  sub->add_option("--threads", o->threads, "Worker threads (0: OMNIDENSITY_THREADS or 1)");
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
