#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmfpca/fpca.hpp"
#include "fmfpca/parallel.hpp"

namespace fmfpca {

struct CvProvenance {
    std::size_t reps = 0;
    std::size_t ngrid = 0;
    std::uint64_t seed = 0;

    bool operator==(const CvProvenance&) const = default;
};

/// One quantile of the null limit for (mode, dim_W = K - phi0, dim_B = phi0).
struct CvEntry {
    DeterministicMode mode = DeterministicMode::None;
    std::size_t dim_w = 1;
    std::size_t dim_b = 0;
    /// Quantile probability, e.g. 0.95 for a 5% test.
    double level = 0.95;
    double quantile = 0.0;
    CvProvenance provenance;
};

/**
 * Quantiles of the limiting null distributions, keyed by
 * (mode, dim_W, dim_B, level). Levels are quantile probabilities; a test at
 * significance alpha uses level 1 - alpha.
 */
class CriticalValueTable {
public:
    /// Adds or replaces the entry with the same key.
    void insert(const CvEntry& entry);
    /// Adds every entry of `other`, replacing duplicates.
    void merge(const CriticalValueTable& other);

    [[nodiscard]] std::optional<double> find(DeterministicMode mode, std::size_t dim_w, std::size_t dim_b,
                                             double level) const;
    /// level -> quantile for one key; empty if absent.
    [[nodiscard]] std::map<double, double> levels_for(DeterministicMode mode, std::size_t dim_w,
                                                      std::size_t dim_b) const;
    [[nodiscard]] const std::vector<CvEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    /// Draws discarded and redrawn because the Gram matrix of B was singular.
    std::size_t gram_retries = 0;

    /// Delimited text with header `mode,dim_w,dim_b,level,quantile,reps,ngrid,seed`.
    void write_csv(std::ostream& os) const;
    void save(const std::string& path) const;
    /// Rejects rows with missing provenance fields.
    static CriticalValueTable read_csv(std::istream& is);
    static CriticalValueTable load(const std::string& path);

private:
    std::vector<CvEntry> entries_;
};

inline constexpr std::size_t kMinGrid = 100;

/**
 * One draw of the integral of V(r)'V(r) on a uniform grid of `ngrid` steps.
 * Stochastic integrals use the left-point rule and the Gram matrix of B is
 * inverted directly. Throws GramSingular when it is numerically singular.
 */
double simulate_limit_draw(std::size_t dim_w, std::size_t dim_b, DeterministicMode mode, std::size_t ngrid, Rng& rng);

/// Type-7 empirical quantile of `sorted` (ascending).
double empirical_quantile(const std::vector<double>& sorted, double prob);

struct CvSimulationOptions {
    std::size_t reps = 100000;
    std::size_t ngrid = 2000;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

/**
 * Simulated quantiles for each (dim_W, dim_B) in `dims` at each level. Draw i
 * of every key uses substream i of the seed, with W drawn before B, so keys
 * sharing dim_W share their W paths. Deterministic given the seed and
 * independent of the thread count.
 */
CriticalValueTable critical_values(const std::vector<std::pair<std::size_t, std::size_t>>& dims,
                                   DeterministicMode mode, const std::vector<double>& levels,
                                   const CvSimulationOptions& options);

/// The raw draws behind critical_values for a single key, in draw order.
std::vector<double> simulate_limit_draws(std::size_t dim_w, std::size_t dim_b, DeterministicMode mode,
                                         const CvSimulationOptions& options, std::size_t* gram_retries = nullptr);

}  // namespace fmfpca
