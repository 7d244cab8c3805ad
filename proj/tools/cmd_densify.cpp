#include <filesystem>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/dataset.hpp"
#include "omnidensity/density.hpp"
#include "omnidensity/image_io.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace fs = std::filesystem;

namespace {

struct Opts {
  std::string manifest;
  std::string output_dir;
  std::string kernel = "distortion";
  double sigma = 8.0;
  int k = 3;
  double beta = 0.3;
  double fallback_sigma = 8.0;
  double sigma_alpha = 12.0;
  double d_norm = 0.0;   // 0: half the image width
  double sigma_min = 2.0;
  double sigma_max = 0.0;  // 0: 4 * sigma_alpha
  double truncation = 4.0;
  std::string split = "all";
  bool preview = false;
};

KernelSpec make_spec(const Opts& o) {
  KernelSpec spec;
  spec.truncation_radius = o.truncation;
  if (o.kernel == "fixed") {
    spec.policy = FixedKernel{o.sigma};
  } else if (o.kernel == "geometry") {
    spec.policy = GeometryAdaptiveKernel{o.k, o.beta, o.fallback_sigma};
  } else {
    spec.policy = DistortionAdaptiveKernel{o.sigma_alpha, o.d_norm, o.sigma_min, o.sigma_max};
  }
  spec.validate();
  return spec;
}

void run(const Opts& o) {
  RunRecord rec;
  rec.subcommand = "densify";
  rec.config = json{{"manifest", o.manifest},
                    {"output-dir", o.output_dir},
                    {"kernel", o.kernel},
                    {"sigma", o.sigma},
                    {"k", o.k},
                    {"beta", o.beta},
                    {"fallback-sigma", o.fallback_sigma},
                    {"sigma-alpha", o.sigma_alpha},
                    {"d-norm", o.d_norm},
                    {"sigma-min", o.sigma_min},
                    {"sigma-max", o.sigma_max},
                    {"truncation", o.truncation},
                    {"split", o.split},
                    {"preview", o.preview}};
  rec.add_input(o.manifest);

  const Manifest m = load_manifest(o.manifest);
  const KernelSpec spec = make_spec(o);
  fs::create_directories(o.output_dir);

  json per_image = json::array();
  int n_done = 0;
  int n_fallback = 0;
  for (const auto& record : m.records) {
    if (o.split != "all" && record.split != o.split) continue;
    const Vec2<double> center{record.projection.center_u, record.projection.center_v};
    DensityMap dm = render_density(record.annotations, record.projection.width,
                                   record.projection.height, center, spec);
    const std::string map_path = (fs::path(o.output_dir) / (record.id + ".fimg")).string();
    atomic_write_with(map_path, [&](const std::string& tmp) { write_fimg(dm.values, tmp); });
    rec.add_output(map_path);
    if (o.preview) {
      const std::string prev = (fs::path(o.output_dir) / (record.id + "_preview.png")).string();
      atomic_write_with(prev,
                        [&](const std::string& tmp) { write_density_preview(dm.values, tmp); });
    }
    if (dm.geometry_fallback_used) ++n_fallback;
    per_image.push_back(json{{"id", record.id},
                             {"annotations", record.annotations.size()},
                             {"integral", dm.values.sum()},
                             {"geometry_fallback", dm.geometry_fallback_used}});
    ++n_done;
  }

  json summary;
  summary["kernel"] = o.kernel;
  summary["images"] = n_done;
  summary["geometry_fallbacks"] = n_fallback;
  summary["maps"] = std::move(per_image);
  const std::string sum_path = (fs::path(o.output_dir) / "density_summary.json").string();
  atomic_write_text(sum_path, summary.dump(2) + "\n");
  rec.write((fs::path(o.output_dir) / "densify.run.json").string());

  std::cout << json{{"images", n_done}, {"geometry_fallbacks", n_fallback}}.dump() << "\n";
}

}  // namespace

void register_densify(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub =
      app.add_subcommand("densify", "Render ground-truth density maps for a manifest");
  sub->add_option("--manifest", o->manifest, "Dataset manifest JSON")->required();
  sub->add_option("--output-dir", o->output_dir, "Output directory")->required();
  sub->add_option("--kernel", o->kernel, "Kernel policy: fixed | geometry | distortion")
      ->check(CLI::IsMember({"fixed", "geometry", "distortion"}));
  sub->add_option("--sigma", o->sigma, "Fixed kernel bandwidth in pixels");
  sub->add_option("--k", o->k, "Geometry kernel: number of nearest neighbours");
  sub->add_option("--beta", o->beta, "Geometry kernel: bandwidth fraction of mean distance");
  sub->add_option("--fallback-sigma", o->fallback_sigma,
                  "Geometry kernel: bandwidth when too few annotations");
  sub->add_option("--sigma-alpha", o->sigma_alpha, "Distortion kernel: base bandwidth");
  sub->add_option("--d-norm", o->d_norm,
                  "Distortion kernel: normalizing distance (0: half the width)");
  sub->add_option("--sigma-min", o->sigma_min, "Distortion kernel: lower clamp");
  sub->add_option("--sigma-max", o->sigma_max,
                  "Distortion kernel: upper clamp (0: 4 * sigma-alpha)");
  sub->add_option("--truncation", o->truncation, "Kernel window radius in sigmas");
  sub->add_option("--split", o->split, "Record split to process: train | test | all")
      ->check(CLI::IsMember({"train", "test", "all"}));
  sub->add_flag("--preview", o->preview, "Also write normalized grayscale previews");
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
