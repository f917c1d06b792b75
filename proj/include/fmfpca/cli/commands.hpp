#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fmfpca/cli/config.hpp"

namespace fmfpca::cli {

/// Each command writes its report or table to `out`.
void cmd_test_dim(const RunConfig& cfg, std::ostream& out);
void cmd_test_subspace_in(const RunConfig& cfg, std::ostream& out);
void cmd_test_subspace_contains(const RunConfig& cfg, std::ostream& out);
void cmd_estimate(const RunConfig& cfg, std::ostream& out);
void cmd_simulate_cv(const RunConfig& cfg, std::ostream& out);
void cmd_montecarlo(const RunConfig& cfg, std::ostream& out);
void cmd_transform(const RunConfig& cfg, std::ostream& out);

/**
 * Parses `args` (without the program name), runs the command and returns the
 * exit status. Reports go to --out or `out`; failures are written to `err` as
 * {"error": kind, "message": text}.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmfpca::cli
