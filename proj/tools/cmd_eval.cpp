#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmds.hpp"
#include "omnidensity/evalkit.hpp"
#include "run_manifest.hpp"

namespace omni::tools {

namespace fs = std::filesystem;

namespace {

struct Opts {
  std::string pred;  // directory of predicted <id>.fimg maps
  std::string gt;    // manifest with ground-truth annotations
  std::string split = "test";
  std::vector<std::string> rows;  // LABEL=DIR extra ablation rows
  std::string fixture_table;      // JSON [{label, mae, mse}] pre-scored rows
  std::string csv_out;
  std::string markdown_out;
};

std::pair<std::vector<double>, std::vector<double>> paired_counts(
    const std::string& dir, const Manifest& m, const std::string& split) {
  Manifest sel;
  for (const auto& r : m.records)
    if (split == "all" || r.split == split) sel.records.push_back(r);
  require(!sel.records.empty(), Err::empty_input, "no records in split: " + split);
  const auto preds = counts_from_density_dir(dir, sel);
  std::vector<double> p, g;
  for (size_t i = 0; i < sel.records.size(); ++i) {
    p.push_back(preds[i].count);
    g.push_back(static_cast<double>(sel.records[i].annotations.size()));
  }
  return {p, g};
}

void run(const Opts& o) {
  RunRecord rec;
  rec.subcommand = "eval";
  rec.config = json{{"pred", o.pred},
                    {"gt", o.gt},
                    {"split", o.split},
                    {"row", o.rows},
                    {"fixture-table", o.fixture_table},
                    {"csv", o.csv_out},
                    {"markdown", o.markdown_out}};
  rec.add_input(o.gt);
  const Manifest m = load_manifest(o.gt);

  std::vector<AblationEntry> entries;
  json out;

  if (!o.pred.empty()) {
    auto [p, g] = paired_counts(o.pred, m, o.split);
    const EvalResult r = evaluate(p, g);
    out["mae"] = r.mae;
    out["mse"] = r.mse;
    out["n"] = r.n;
    entries.push_back({"pred", r.mae, r.mse});
  }
  for (const auto& spec : o.rows) {
    const auto eq = spec.find('=');
    require(eq != std::string::npos && eq > 0 && eq + 1 < spec.size(), Err::bad_argument,
            "--row expects LABEL=DIR, got: " + spec);
    const std::string label = spec.substr(0, eq);
    const std::string dir = spec.substr(eq + 1);
    auto [p, g] = paired_counts(dir, m, o.split);
    const EvalResult r = evaluate(p, g);
    entries.push_back({label, r.mae, r.mse});
  }
  if (!o.fixture_table.empty()) {
    rec.add_input(o.fixture_table);
    std::ifstream in(o.fixture_table);
    require(in.good(), Err::io_error, "cannot open " + o.fixture_table);
    json fixtures = json::parse(in);
    for (const auto& f : fixtures)
      entries.push_back({f.at("label").get<std::string>(), f.at("mae").get<double>(),
                         f.at("mse").get<double>()});
  }

  if (!entries.empty() && (entries.size() > 1 || o.pred.empty())) {
    const AblationTable table = make_ablation_table(entries);
    if (!o.csv_out.empty()) {
      atomic_write_text(o.csv_out, table.csv());
      rec.add_output(o.csv_out);
    }
    if (!o.markdown_out.empty()) {
      atomic_write_text(o.markdown_out, table.markdown());
      rec.add_output(o.markdown_out);
    }
    json jrows = json::array();
    for (const auto& r : table.rows)
      jrows.push_back(json{{"label", r.label},
                           {"mae", r.mae},
                           {"mse", r.mse},
                           {"best_mae", r.best_mae},
                           {"best_mse", r.best_mse}});
    out["table"] = std::move(jrows);
  }
  require(!out.empty(), Err::bad_argument, "nothing to evaluate: give --pred, --row, or --fixture-table");

  if (!o.csv_out.empty() || !o.markdown_out.empty() || !o.pred.empty())
    rec.write((o.pred.empty() ? fs::path(o.csv_out.empty() ? o.markdown_out : o.csv_out)
                              : fs::path(o.pred) / "eval")
                  .string() +
              ".run.json");
  std::cout << out.dump() << "\n";
}

}  // namespace

void register_eval(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "eval", "Score predicted density maps against manifest counts");
  sub->add_option("--pred", o->pred, "Directory of predicted <id>.fimg maps");
  sub->add_option("--gt", o->gt, "Ground-truth manifest JSON")->required();
  sub->add_option("--split", o->split, "Record split to score: train | test | all")
      ->check(CLI::IsMember({"train", "test", "all"}));
  sub->add_option("--row", o->rows, "Extra ablation row as LABEL=DIR (repeatable)");
  sub->add_option("--fixture-table", o->fixture_table,
                  "JSON list of pre-scored rows {label, mae, mse}");
  sub->add_option("--csv", o->csv_out, "Write the ablation table as CSV");
  sub->add_option("--markdown", o->markdown_out, "Write the ablation table as Markdown");
  sub->callback([o] { run(*o); });
}

}  // namespace omni::tools
