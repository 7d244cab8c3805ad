#include <filesystem>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/dataset.hpp"
#include "omnidensity/image_io.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace fs = std::filesystem;

namespace {

struct Opts {
  std::string manifest;
  std::string id;
  std::string image;  // overrides the record's source path
  std::string output_dir;
};

void run(const Opts& o) {
  RunRecord rec;
  rec.subcommand = "crop";
  rec.config = json{{"manifest", o.manifest},
                    {"id", o.id},
                    {"image", o.image},
                    {"output-dir", o.output_dir}};
  rec.add_input(o.manifest);

  const Manifest m = load_manifest(o.manifest);
  const ImageRecord* record = nullptr;
  for (const auto& r : m.records)
    if (r.id == o.id) record = &r;
  require(record != nullptr, Err::bad_argument, "no record with id " + o.id);
  require(record->unit_area.has_value(), Err::malformed_record,
          "record " + o.id + " has no unit area");

  const std::string img_path =
      !o.image.empty() ? o.image
                       : (fs::path(o.manifest).parent_path() / record->source).string();
  rec.add_input(img_path);

  StereoImage img;
  img.raster = read_image(img_path);
  img.params = record->projection;
  const CropResult crop = crop_unit_area(img, *record->unit_area, record->annotations);

  fs::create_directories(o.output_dir);
  const std::string stem = (fs::path(o.output_dir) / o.id).string();
  atomic_write_with(stem + "_crop.png",
                    [&](const std::string& tmp) { write_png(crop.raster, tmp); });
  rec.add_output(stem + "_crop.png");

  Image mask_img(crop.raster.width, crop.raster.height, 1);
  mask_img.planes[0] = crop.mask.cast<float>();
  atomic_write_with(stem + "_mask.png",
                    [&](const std::string& tmp) { write_png(mask_img, tmp); });
  rec.add_output(stem + "_mask.png");

  json j;
  j["id"] = o.id;
  j["offset"] = json::array({crop.offset.x(), crop.offset.y()});
  json hull = json::array();
  for (const auto& p : crop.hull) hull.push_back(json::array({p.x(), p.y()}));
  j["hull"] = hull;
  json anns = json::array();
  for (const auto& a : crop.anns)
    anns.push_back(json::array({a.u_min, a.v_min, a.u_max, a.v_max}));
  j["annotations"] = anns;
  j["count"] = crop.anns.size();
  atomic_write_text(stem + "_crop.json", j.dump(2) + "\n");
  rec.add_output(stem + "_crop.json");

  rec.write(stem + "_crop.run.json");
}

}  // namespace

void register_crop(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "crop", "Crop a record to the convex hull of its unit area and member bboxes");
  sub->add_option("--manifest", o->manifest, "Dataset manifest JSON")->required();
  sub->add_option("--id", o->id, "Record id")->required();
  sub->add_option("--image", o->image, "Stereographic raster (overrides record source)");
  sub->add_option("--output-dir", o->output_dir, "Output directory")->required();
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
