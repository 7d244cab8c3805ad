#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmds.hpp"
#include "omnidensity/error.hpp"
#include "omnidensity/version.hpp"

namespace {

using json = nlohmann::ordered_json;

// --config FILE injects saved flags (a previous run record's "config" object,
// or a bare JSON object) right after the subcommand. Keys given explicitly on
// the command line are dropped from the injected set, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  size_t cfg_at = 0;
  std::string cfg_path;
  for (size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      cfg_at = i;
      cfg_path = args[i + 1];
      break;
    }
  }
  if (cfg_path.empty()) return args;
  require(cfg_at >= 2, omni::Err::bad_argument, "--config must follow a subcommand");

  std::ifstream in(cfg_path);
  require(in.good(), omni::Err::io_error, "cannot open " + cfg_path);
  json j = json::parse(in, nullptr, true, true);
  if (j.contains("config")) j = j["config"];
  require(j.is_object(), omni::Err::bad_argument, "config must be a JSON object");

  args.erase(args.begin() + static_cast<long>(cfg_at),
             args.begin() + static_cast<long>(cfg_at) + 2);

  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        tokens.push_back(flag);
        tokens.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else if (!value.is_null()) {
      tokens.push_back(flag);
      tokens.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  args.insert(args.begin() + 2, tokens.begin(), tokens.end());
  return args;
}

void print_error(const std::string& code, const std::string& message) {
  json j;
  j["error"] = json{{"code", code}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereographic reprojection and density-map toolkit for omnidirectional counting"};
  app.set_version_flag("--version", omni::kVersion);
  app.require_subcommand(1);

  omni::tools::register_reproject(app);
  omni::tools::register_crop(app);
  omni::tools::register_augment(app);
  omni::tools::register_densify(app);
  omni::tools::register_synth(app);
  omni::tools::register_tissot(app);
  omni::tools::register_eval(app);
  omni::tools::register_discretize(app);

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const omni::Error& e) {
    print_error(omni::err_name(e.code), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("BadConfig", e.what());
    return 1;
  }

  // CLI11 consumes tokens back to front
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help to stdout
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("Usage", e.what());
    return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
  } catch (const omni::Error& e) {
    print_error(omni::err_name(e.code), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return 1;
  }
  return 0;
}
