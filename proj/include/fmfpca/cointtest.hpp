#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fmfpca/critsim.hpp"
#include "fmfpca/fpca.hpp"
#include "fmfpca/hilbert.hpp"
#include "fmfpca/lrcov.hpp"

namespace fmfpca {

struct TestOutcome {
    double statistic = 0.0;
    std::size_t K = 1;
    std::size_t phi0 = 0;
    DeterministicMode mode = DeterministicMode::None;
    /// level -> critical value; levels are quantile probabilities.
    std::map<double, double> critical_values;
    /// level -> statistic > critical value.
    std::map<double, bool> reject;
    /// z_{phi0,t}, (T-1) x (K - phi0).
    Eigen::MatrixXd projected_series;

    /// Decision at significance alpha (level 1 - alpha). Throws
    /// MissingCriticalValues when that level is absent.
    [[nodiscard]] bool rejects_at(double alpha) const;
};

struct SequentialResult {
    std::size_t phi_hat = 0;
    std::vector<TestOutcome> trajectory;
    double alpha = 0.05;
    /// Every test up to the cap rejected.
    bool hit_cap = false;
};

/**
 * n^{-2} sum_t S_t' LRV^{-1} S_t with S_t the partial sums of the rows of z.
 * No demeaning. Throws SingularLrv if the long-run variance is singular.
 */
double kpss_core(const Eigen::MatrixXd& z, const KernelSpec& spec, double h);

/**
 * Tests dim(H^N) = phi0 with the K - phi0 scores of the modified series on
 * the eigenvectors phi0+1..K of the corrected operator.
 */
TestOutcome dimension_test(const FunctionalSeries& x, std::size_t phi0, std::size_t K, const KernelSpec& spec,
                           double h, DeterministicMode mode, const CriticalValueTable& cvt);

/// Default cap for the sequential search: min(p - K_policy, T / 10).
std::size_t default_phi_cap(std::size_t p, std::size_t T, std::size_t k_policy);

/// Called with (mode, dim_W, dim_B) before each sequential step; may add entries to the table in use.
using CvEnsure = std::function<void(DeterministicMode, std::size_t, std::size_t)>;

/**
 * Tests phi0 = 0, 1, ... with K = phi0 + k_policy until the first
 * non-rejection at alpha. If every test up to phi_cap rejects, phi_hat is the
 * cap and hit_cap is set.
 */
SequentialResult sequential_dimension(const FunctionalSeries& x, double alpha, std::size_t k_policy,
                                      const KernelSpec& spec, double h, DeterministicMode mode,
                                      const CriticalValueTable& cvt, std::size_t phi_cap,
                                      const CvEnsure& ensure = {});

/// H0: span(M) lies in H^N, via a dimension test at phi - dim(M) on (I - P^M) X.
TestOutcome subspace_in_attractor_test(const FunctionalSeries& x, std::span<const GridFunction> m, std::size_t phi,
                                       std::size_t K, const KernelSpec& spec, double h, DeterministicMode mode,
                                       const CriticalValueTable& cvt);

/// H0: H^N lies in span(M), via a dimension test at 0 on (I - P^M) X.
TestOutcome attractor_in_subspace_test(const FunctionalSeries& x, std::span<const GridFunction> m, std::size_t K,
                                       const KernelSpec& spec, double h, DeterministicMode mode,
                                       const CriticalValueTable& cvt);

}  // namespace fmfpca
