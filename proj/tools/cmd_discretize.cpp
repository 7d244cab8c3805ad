#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/dataset.hpp"
#include "omnidensity/density.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace {

struct Opts {
  std::vector<double> values;
  std::string values_file;  // one count per line
  std::string manifest;     // derive c_max from per-record counts
  double c_max = 0;
  double fine_step = 0.05;
  double fine_limit = 0.5;
  double coarse_step = 0.5;
};

void run(const Opts& o) {
  std::vector<double> values = o.values;
  if (!o.values_file.empty()) {
    std::ifstream in(o.values_file);
    require(in.good(), Err::io_error, "cannot open " + o.values_file);
    double v;
    while (in >> v) values.push_back(v);
  }

  CountBins bins;
  bins.fine_step = o.fine_step;
  bins.fine_limit = o.fine_limit;
  bins.coarse_step = o.coarse_step;
  if (!o.manifest.empty()) {
    const Manifest m = load_manifest(o.manifest);
    require(!m.records.empty(), Err::empty_input, "manifest has no records");
    double max_count = 0;
    for (const auto& r : m.records)
      max_count = std::max(max_count, static_cast<double>(r.annotations.size()));
    bins.c_max = std::ceil(max_count / o.coarse_step) * o.coarse_step;
  } else {
    require(o.c_max > 0, Err::bad_argument, "give --c-max or --manifest");
    bins.c_max = o.c_max;
  }
  bins.validate();

  require(!values.empty(), Err::empty_input, "no values: give --value or --values-file");

  json rows = json::array();
  for (double v : values) {
    const int cls = discretize_count(v, bins);
    const BinInterval b = bin_bounds(cls, bins);
    json row;
    row["value"] = v;
    row["class"] = cls;
    row["lo"] = b.lo;
    if (std::isfinite(b.hi))
      row["hi"] = b.hi;
    else
      row["hi"] = nullptr;
    row["singleton_zero"] = b.singleton_zero;
    rows.push_back(std::move(row));
  }
  json out;
  out["c_max"] = bins.c_max;
  out["num_classes"] = bins.num_classes();
  out["rows"] = std::move(rows);
  std::cout << out.dump() << "\n";
}

}  // namespace

void register_discretize(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "discretize", "Map fractional counts to ordinal classes and back to intervals");
  sub->add_option("--value", o->values, "Count to discretize (repeatable)");
  sub->add_option("--values-file", o->values_file, "File with one count per line");
  sub->add_option("--manifest", o->manifest,
                  "Derive the top boundary from the largest record count");
  sub->add_option("--c-max", o->c_max, "Top boundary of the coarse range");
  sub->add_option("--fine-step", o->fine_step, "Bin width below the fine limit");
  sub->add_option("--fine-limit", o->fine_limit, "Where fine bins stop");
  sub->add_option("--coarse-step", o->coarse_step, "Bin width above the fine limit");
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
