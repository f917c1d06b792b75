#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fmfpca/fpca.hpp"
#include "fmfpca/lrcov.hpp"

namespace fmfpca::cli {

/// Smallest reps accepted by simulate-cv without --allow-small.
inline constexpr std::size_t kMinTableReps = 1000;

/// Parameters of one CLI run: config-file values overridden by flags.
struct RunConfig {
    std::string command;

    std::string input;
    std::string out;
    std::string format = "auto";
    std::string mode = "none";
    std::string kernel = "parzen";
    std::string h = "t13";
    std::size_t k_policy = 1;
    double alpha = 0.05;
    std::optional<std::size_t> phi;
    std::uint64_t seed = 0;
    std::size_t threads = 0;

    std::string cv_cache;
    bool simulate_cv = false;
    std::size_t reps = 100000;
    std::size_t ngrid = 2000;
    bool allow_small = false;
    std::vector<double> levels{0.90, 0.95, 0.99};
    std::optional<std::size_t> phi0_max;
    std::vector<std::size_t> phi0{0, 1, 2};

    std::string m_file;
    std::string method = "fm";

    std::vector<std::size_t> T{250};
    std::size_t offset = 0;
    std::vector<double> beta{0.0, 0.5};
    std::size_t n_reps = 500;
    std::size_t grid_size = 201;
    double innovation_correlation = 0.0;
    bool smooth = false;

    std::string kind;
    bool normalize = false;

    /// Parsed forms, filled by validate().
    DeterministicMode mode_value = DeterministicMode::None;
    KernelSpec kernel_value{};
    Bandwidth bandwidth{};
    std::string resolved_format;

    /// Checks every field for the selected command; throws ConfigError.
    void validate();
};

}  // namespace fmfpca::cli
