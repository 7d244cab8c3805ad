#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/augment.hpp"
#include "omnidensity/dataset.hpp"
#include "omnidensity/image_io.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace fs = std::filesystem;

namespace {

struct Opts {
  std::string manifest;
  std::string image_dir;  // base for record sources; default: manifest directory
  std::string output_dir;
  int rotations = 2;
  bool flip = false;
  std::uint64_t seed = 0;
  int downscale = 1024;
  int tile_size = 512;
  std::string split = "train";
};

// Plain cut of an aligned quadrant into smaller tiles, provenance preserved.
std::vector<Tile> cut_tiles(const Tile& src, int ts) {
  const int n = src.raster.width;
  const int per_side = n / ts;
  std::vector<Tile> out;
  for (int ty = 0; ty < per_side; ++ty) {
    for (int tx = 0; tx < per_side; ++tx) {
      Tile t;
      t.source_id = src.source_id;
      t.op = src.op;
      t.offset = src.offset + Vec2<double>(tx * ts, ty * ts);
      t.distortion_center = src.distortion_center - Vec2<double>(tx * ts, ty * ts);
      t.raster = Image(ts, ts, src.raster.channels());
      for (int c = 0; c < src.raster.channels(); ++c)
        t.raster.planes[static_cast<size_t>(c)] =
            src.raster.planes[static_cast<size_t>(c)].block(ty * ts, tx * ts, ts, ts);
      t.mask = src.mask.block(ty * ts, tx * ts, ts, ts);
      for (const auto& a : src.anns) {
        const int cx = std::min(per_side - 1,
                                std::max(0, static_cast<int>(std::floor((a.center.x() + 0.5) / ts))));
        const int cy = std::min(per_side - 1,
                                std::max(0, static_cast<int>(std::floor((a.center.y() + 0.5) / ts))));
        if (cx != tx || cy != ty) continue;
        Annotation local = a;
        local.u_min = std::max(a.u_min - tx * ts, -0.5);
        local.u_max = std::min(a.u_max - tx * ts, ts - 0.5);
        local.v_min = std::max(a.v_min - ty * ts, -0.5);
        local.v_max = std::min(a.v_max - ty * ts, ts - 0.5);
        local.center = a.center - Vec2<double>(tx * ts, ty * ts);
        t.anns.push_back(local);
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

void run(const Opts& o) {
  require(o.downscale > 0 && o.tile_size > 0 && o.downscale % 2 == 0, Err::bad_argument,
          "downscale must be even and positive");
  require((o.downscale / 2) % o.tile_size == 0, Err::bad_argument,
          "tile size must divide the quadrant size");

  RunRecord rec;
  rec.subcommand = "augment";
  rec.config = json{{"manifest", o.manifest},   {"image-dir", o.image_dir},
                    {"output-dir", o.output_dir}, {"rotations", o.rotations},
                    {"flip", o.flip},             {"seed", o.seed},
                    {"downscale", o.downscale},   {"tile-size", o.tile_size},
                    {"split", o.split}};
  rec.add_input(o.manifest);

  const Manifest m = load_manifest(o.manifest);
  const fs::path base =
      o.image_dir.empty() ? fs::path(o.manifest).parent_path() : fs::path(o.image_dir);
  fs::create_directories(o.output_dir);

  json tiles_json = json::array();
  std::size_t total = 0;
  std::map<std::string, int> seq;

  for (const auto& record : m.records) {
    if (o.split != "all" && record.split != o.split) continue;
    const std::string img_path = (base / record.source).string();
    rec.add_input(img_path);

    Image raw = read_image(img_path);
    require(raw.width == raw.height, Err::non_square_image,
            "augmentation input must be square: " + record.id);
    auto [small, sanns] = resize_bilinear(raw, record.annotations, o.downscale, o.downscale);
    const double g = double(o.downscale) / raw.width;

    AugmentItem item;
    item.id = record.id;
    item.image.raster = std::move(small);
    item.image.params = record.projection;
    item.image.params.width = o.downscale;
    item.image.params.height = o.downscale;
    item.image.params.scale = record.projection.scale * g;
    item.image.params.center_u = (record.projection.center_u + 0.5) * g - 0.5;
    item.image.params.center_v = (record.projection.center_v + 0.5) * g - 0.5;
    item.anns = std::move(sanns);

    augment_set({item}, o.rotations, o.flip, o.seed, [&](Tile&& quad) {
      const int variant = seq[quad.source_id]++ / 4;
      std::vector<Tile> pieces;
      if (quad.raster.width == o.tile_size)
        pieces.push_back(std::move(quad));
      else
        pieces = cut_tiles(quad, o.tile_size);

      for (size_t pi = 0; pi < pieces.size(); ++pi) {
        const Tile& t = pieces[pi];
        std::string name = t.source_id + "__v" + std::to_string(variant) + "_" +
                           quadrant_name(t.op.quadrant);
        if (pieces.size() > 1) name += "_p" + std::to_string(pi);

        const std::string png_path = (fs::path(o.output_dir) / (name + ".png")).string();
        atomic_write_with(png_path,
                          [&](const std::string& tmp) { write_png(t.raster, tmp); });
        const bool has_mask = (t.mask == 0).any();
        if (has_mask) {
          Image mi(t.raster.width, t.raster.height, 1);
          mi.planes[0] = t.mask.cast<float>();
          atomic_write_with((fs::path(o.output_dir) / (name + "_mask.png")).string(),
                            [&](const std::string& tmp) { write_png(mi, tmp); });
        }

        json tj;
        tj["file"] = name + ".png";
        tj["source_id"] = t.source_id;
        tj["theta"] = t.op.theta;
        tj["flip"] = t.op.flip;
        tj["quadrant"] = quadrant_name(t.op.quadrant);
        tj["align"] = align_name(t.op.align);
        tj["offset"] = json::array({t.offset.x(), t.offset.y()});
        tj["distortion_center"] =
            json::array({t.distortion_center.x(), t.distortion_center.y()});
        tj["has_mask"] = has_mask;
        json anns = json::array();
        for (const auto& a : t.anns)
          anns.push_back(json::array({a.u_min, a.v_min, a.u_max, a.v_max}));
        tj["annotations"] = anns;
        tj["count"] = t.anns.size();
        atomic_write_text((fs::path(o.output_dir) / (name + ".json")).string(),
                          tj.dump(2) + "\n");
        tiles_json.push_back(std::move(tj));
        ++total;
      }
    });
  }

  json batch;
  batch["seed"] = o.seed;
  batch["rotations"] = o.rotations;
  batch["flip"] = o.flip;
  batch["tiles"] = std::move(tiles_json);
  batch["total"] = total;
  const std::string batch_path = (fs::path(o.output_dir) / "augment_manifest.json").string();
  atomic_write_text(batch_path, batch.dump(2) + "\n");
  rec.add_output(batch_path);
  rec.write((fs::path(o.output_dir) / "augment.run.json").string());

  std::cout << json{{"tiles", total}}.dump() << "\n";
}

}  // namespace

void register_augment(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "augment", "Rotate, divide into quadrants, and align training images");
  sub->add_option("--manifest", o->manifest, "Dataset manifest JSON")->required();
  sub->add_option("--image-dir", o->image_dir, "Base directory for record sources");
  sub->add_option("--output-dir", o->output_dir, "Output directory")->required();
  sub->add_option("--rotations", o->rotations, "Random rotations per image");
  sub->add_flag("--flip", o->flip, "Also emit horizontally flipped variants");
  sub->add_option("--seed", o->seed, "RNG seed for rotation angles");
  sub->add_option("--downscale", o->downscale, "Working resolution before the split");
  sub->add_option("--tile-size", o->tile_size, "Final tile size");
  sub->add_option("--split", o->split, "Record split to process: train | test | all")
      ->check(CLI::IsMember({"train", "test", "all"}));
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
