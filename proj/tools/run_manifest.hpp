#pragma once
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace omni::tools {

using json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v);
std::uint64_t hash_file(const std::string& path);

// temp file + rename, so readers never observe a half-written output
void atomic_write_text(const std::string& path, const std::string& text);
void atomic_write_with(const std::string& path,
                       const std::function<void(const std::string&)>& writer);

// Reproducibility record for one CLI invocation: resolved config, a hash of
// it, hashes of every input file, and the outputs written.
struct RunRecord {
  std::string subcommand;
  json config = json::object();
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::string> outputs;

  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void write(const std::string& path) const;
};

}  // namespace omni::tools
