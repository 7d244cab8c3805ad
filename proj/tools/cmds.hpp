#pragma once
#include <CLI11.hpp>

namespace omni::tools {

void register_reproject(CLI::App& app);
void register_crop(CLI::App& app);
void register_augment(CLI::App& app);
void register_densify(CLI::App& app);
void register_synth(CLI::App& app);
void register_tissot(CLI::App& app);
void register_eval(CLI::App& app);
void register_discretize(CLI::App& app);

}  // namespace omni::tools
