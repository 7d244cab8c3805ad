#include "run_manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "omnidensity/error.hpp"
#include "omnidensity/rng.hpp"
#include "omnidensity/version.hpp"

namespace omni::tools {

namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::io_error, "cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
  return h;
}

void atomic_write_text(const std::string& path, const std::string& text) {
  atomic_write_with(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Err::io_error, "cannot open " + tmp);
    out << text;
    require(out.good(), Err::io_error, "short write to " + tmp);
  });
}

void atomic_write_with(const std::string& path,
                       const std::function<void(const std::string&)>& writer) {
  const std::string tmp = path + ".tmp";
  writer(tmp);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  require(!ec, Err::io_error, "cannot rename " + tmp + " to " + path);
}

void RunRecord::add_input(const std::string& path) {
  inputs.emplace_back(path, hex64(hash_file(path)));
}

void RunRecord::add_output(const std::string& path) { outputs.push_back(path); }

void RunRecord::write(const std::string& path) const {
  json j;
  j["tool_version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["config_hash"] = hex64(fnv1a64(config.dump()));
  json ins = json::array();
  for (const auto& [p, h] : inputs) ins.push_back(json{{"path", p}, {"fnv1a64", h}});
  j["inputs"] = ins;
  j["outputs"] = outputs;
  atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace omni::tools
