#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fmfpca/cointtest.hpp"
#include "fmfpca/critsim.hpp"
#include "fmfpca/fpca.hpp"
#include "fmfpca/hilbert.hpp"
#include "fmfpca/lrcov.hpp"
#include "fmfpca/parallel.hpp"

namespace fmfpca {

/// Simulation design with phi unit-root directions drawn from f_1..f_6 and ten
/// FAR(1) stationary directions drawn from f_7..f_18.
struct DgpConfig {
    std::size_t phi = 1;
    std::size_t T = 250;
    std::size_t grid_size = 201;
    double beta_min = 0.0;
    double beta_max = 0.5;
    double alpha_min = -0.5;
    double alpha_max = 0.5;
    std::size_t n_fourier_pool_N = 6;
    std::size_t n_fourier_pool_S = 12;
    std::size_t n_stationary = 10;
    std::size_t innovation_terms = 80;
    double innovation_decay = 0.95;
    std::size_t burn_in = 200;
    /// Correlation between the innovation scores of the j-th trend and the
    /// j-th stationary direction (0 = independent).
    double innovation_correlation = 0.0;
    /// Least-squares smoothing with quadratic B-splines before returning.
    bool bspline_smoothing = false;
    std::size_t n_bsplines = 20;
    DeterministicMode deterministic = DeterministicMode::None;
    std::uint64_t seed = 0;

    /// Throws ConfigError on violations.
    void validate() const;

    static DgpConfig lower_persistence() { return {}; }
    static DgpConfig higher_persistence() {
        DgpConfig c;
        c.beta_min = 0.5;
        c.beta_max = 0.7;
        return c;
    }
};

struct DgpPath {
    FunctionalSeries series;
    LinearOperator true_proj_N;
    std::vector<GridFunction> trend_basis;
    std::vector<GridFunction> stationary_basis;
};

/// f_1 = 1, f_{2k} = sqrt(2) sin(2 pi k u), f_{2k+1} = sqrt(2) cos(2 pi k u); column j holds f_{j+1}.
Eigen::MatrixXd fourier_basis(const Eigen::VectorXd& points, std::size_t n);

/// Shifted Legendre polynomial of degree 0..3 on [0,1], unnormalized.
double shifted_legendre(std::size_t degree, double u);

/// Values of `n` quadratic B-splines with uniform knots on [a,b]; column j is spline j.
Eigen::MatrixXd bspline_basis(const Eigen::VectorXd& points, std::size_t n, double a = 0.0, double b = 1.0);

DgpPath generate_path(const DgpConfig& cfg, Rng& rng);

/**
 * Runs fn(rep, rng) for rep in [0, n_reps) with rng = substream rep of `seed`.
 * Results written to slot rep do not depend on `threads`.
 */
template <class Fn>
void replicate(std::size_t n_reps, std::uint64_t seed, std::size_t threads, Fn&& fn) {
    parallel_for(n_reps, threads, [&](std::size_t rep) {
        Rng rng = make_stream(seed, rep);
        fn(rep, rng);
    });
}

struct ExperimentResult {
    double reject_rate = 0.0;
    std::size_t n_reps = 0;
    std::size_t rejections = 0;
    std::size_t K = 1;
};

/**
 * Fraction of n_reps simulated paths on which dimension_test at phi0 with
 * K = phi0 + k_policy rejects at alpha. Replication r uses substream r of
 * cfg.seed and tests in cfg.deterministic mode.
 */
ExperimentResult rejection_experiment(const DgpConfig& cfg, std::size_t phi0, std::size_t k_policy,
                                      const KernelSpec& spec, const Bandwidth& h, double alpha, std::size_t n_reps,
                                      const CriticalValueTable& cvt, std::size_t threads = 0);

/// `phi,phi0,T,h_rule,K,beta_min,beta_max,mode,alpha,n_reps,reject_rate,seed`
std::string experiment_row_header();
std::string experiment_row(const DgpConfig& cfg, std::size_t phi0, const Bandwidth& h, double alpha,
                           const ExperimentResult& res);

}  // namespace fmfpca
