#pragma once
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "omnidensity/dataset.hpp"
#include "omnidensity/error.hpp"
#include "omnidensity/image_io.hpp"

namespace omni {

// mse follows the counting-literature convention: root of the mean squared
// error, so it shares units with mae and mae <= mse always holds.
struct EvalResult {
  double mae = 0;
  double mse = 0;
  int n = 0;
  std::vector<double> residuals;
};

inline EvalResult evaluate(const std::vector<double>& pred, const std::vector<double>& gt) {
  require(pred.size() == gt.size(), Err::length_mismatch,
          "prediction and ground-truth lists differ in length");
  require(!pred.empty(), Err::empty_input, "nothing to evaluate");
  EvalResult r;
  r.n = static_cast<int>(pred.size());
  r.residuals.reserve(pred.size());
  double abs_sum = 0, sq_sum = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - gt[i];
    r.residuals.push_back(e);
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  r.mae = abs_sum / r.n;
  r.mse = std::sqrt(sq_sum / r.n);
  return r;
}

struct IdCount {
  std::string id;
  double count;
};

// One density map per record, named <id>.fimg inside the directory.
inline std::vector<IdCount> counts_from_density_dir(const std::string& dir,
                                                    const Manifest& manifest) {
  namespace fs = std::filesystem;
  std::vector<std::string> missing;
  std::vector<IdCount> out;
  for (const auto& rec : manifest.records) {
    const fs::path p = fs::path(dir) / (rec.id + ".fimg");
    if (!fs::exists(p)) {
      missing.push_back(rec.id);
      continue;
    }
    out.push_back({rec.id, read_fimg_map(p.string()).sum()});
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    fail(Err::missing_map, "no density map for: " + ids);
  }
  return out;
}

struct AblationEntry {
  std::string label;
  double mae;
  double mse;
};

struct AblationTable {
  struct Row {
    std::string label;
    double mae;
    double mse;
    bool best_mae;
    bool best_mse;
  };
  std::vector<Row> rows;

  std::string markdown() const {
    std::ostringstream os;
    os << "| Method | MAE | MSE |\n|---|---|---|\n";
    for (const auto& r : rows) {
      os << "| " << r.label << " | " << format(r.mae, r.best_mae) << " | "
         << format(r.mse, r.best_mse) << " |\n";
    }
    return os.str();
  }

  std::string csv() const {
    std::ostringstream os;
    os << "method,mae,mse,best_mae,best_mse\n";
    for (const auto& r : rows)
      os << r.label << ',' << fixed2(r.mae) << ',' << fixed2(r.mse) << ','
         << (r.best_mae ? 1 : 0) << ',' << (r.best_mse ? 1 : 0) << '\n';
    return os.str();
  }

 private:
  static std::string fixed2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
  }
  static std::string format(double v, bool best) {
    return best ? "**" + fixed2(v) + "**" : fixed2(v);
  }
};

// Column minima are flagged; ties all get the flag.
inline AblationTable make_ablation_table(const std::vector<AblationEntry>& entries) {
  require(!entries.empty(), Err::empty_input, "ablation table needs at least one row");
  double best_mae = entries.front().mae;
  double best_mse = entries.front().mse;
  for (const auto& e : entries) {
    best_mae = std::min(best_mae, e.mae);
    best_mse = std::min(best_mse, e.mse);
  }
  AblationTable t;
  for (const auto& e : entries)
    t.rows.push_back({e.label, e.mae, e.mse, e.mae == best_mae, e.mse == best_mse});
  return t;
}

}  // namespace omni
