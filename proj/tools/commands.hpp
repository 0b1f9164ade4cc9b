#pragma once

#include <CLI11.hpp>

namespace vqloc::cli {

void add_synth(CLI::App& app);
void add_prepare(CLI::App& app);
void add_localize(CLI::App& app);
void add_evaluate(CLI::App& app);

}  // namespace vqloc::cli
