#pragma once

#include <optional>
#include <string>

#include "twistspec/config.hpp"

namespace twistspec::cli {

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
};

// Each command writes its artifacts into out_dir and returns the
// process exit code for a successful run (0, or 1 when the eigensolver
// reports unconverged pairs). Config and hypothesis problems are
// thrown and mapped to exit codes 2 and 3 by main_entry.
int run_xsection(const ExperimentConfig& cfg, const RunOptions& opt);
int run_spectrum(const ExperimentConfig& cfg, const RunOptions& opt);
int run_certify(const ExperimentConfig& cfg, const RunOptions& opt);
int run_geometry(const ExperimentConfig& cfg, const RunOptions& opt);
int run_oracle(const ExperimentConfig& cfg, const RunOptions& opt);

int main_entry(int argc, const char* const* argv);

}  // namespace twistspec::cli
