#include "fmfpca/cli/config.hpp"

#include <algorithm>

#include "fmfpca/error.hpp"

namespace fmfpca::cli {

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::ConfigError, msg); }

void require(bool ok, const std::string& msg) {
    if (!ok) bad(msg);
}

}  // namespace

void RunConfig::validate() {
    static const std::vector<std::string> commands = {"test-dim", "test-subspace-in", "test-subspace-contains",
                                                      "estimate", "simulate-cv",      "montecarlo",
                                                      "transform"};
    require(std::find(commands.begin(), commands.end(), command) != commands.end(), "unknown command '" + command + "'");

    mode_value = parse_mode(mode);
    kernel_value = KernelSpec{parse_kernel(kernel), 1.0};
    bandwidth = Bandwidth::parse(h);

    require(format == "auto" || format == "json" || format == "csv", "format must be json or csv");
    if (format == "auto") {
        const bool table = command == "simulate-cv" || command == "montecarlo" || command == "transform";
        resolved_format = table ? "csv" : "json";
    } else {
        resolved_format = format;
    }

    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    require(k_policy >= 1, "k-policy must be at least 1");
    require(!levels.empty(), "levels must not be empty");
    for (double l : levels) require(l > 0.0 && l < 1.0, "levels must lie in (0,1)");
    require(ngrid >= 100, "ngrid must be at least 100");
    require(reps >= 1, "reps must be positive");

    const bool needs_input = command != "simulate-cv" && command != "montecarlo";
    if (needs_input) require(!input.empty(), command + " needs --input");

    const bool uses_cv = command == "test-dim" || command == "test-subspace-in" ||
                         command == "test-subspace-contains" || command == "montecarlo";
    if ((uses_cv && simulate_cv) || command == "simulate-cv")
        require(allow_small || reps >= kMinTableReps,
                "reps below " + std::to_string(kMinTableReps) + " needs --allow-small");

    if (command == "test-subspace-in") {
        require(!m_file.empty(), "test-subspace-in needs --m-file");
        require(phi.has_value(), "test-subspace-in needs --phi");
    }
    if (command == "test-subspace-contains") require(!m_file.empty(), "test-subspace-contains needs --m-file");
    if (command == "estimate") {
        require(phi.has_value(), "estimate needs --phi");
        require(method == "fm" || method == "harris" || method == "ordinary", "method must be fm, harris or ordinary");
    }
    if (command == "simulate-cv" || command == "montecarlo") require(!phi0.empty(), "phi0 list must not be empty");
    if (command == "montecarlo") {
        require(!T.empty(), "T list must not be empty");
        require(beta.size() == 2, "beta needs exactly two values (min,max)");
        require(beta[0] > -1.0 && beta[1] < 1.0 && beta[0] <= beta[1], "beta range must lie within (-1,1)");
        require(n_reps >= 1, "n-reps must be positive");
        for (auto p0 : phi0) require(p0 + offset <= 5, "phi0 + offset must be at most 5");
        require(innovation_correlation > -1.0 && innovation_correlation < 1.0, "rho must lie in (-1,1)");
    }
    if (command == "transform")
        require(kind == "logit" || kind == "clr" || kind == "inverse-clr", "kind must be logit, clr or inverse-clr");
}

}  // namespace fmfpca::cli
