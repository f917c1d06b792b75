#pragma once

#include <cstddef>

#include "fmfpca/fpca.hpp"
#include "fmfpca/hilbert.hpp"
#include "fmfpca/lrcov.hpp"

namespace fmfpca {

/**
 * @brief Output of the fully modified FPCA (and of its finite-dimensional variant).
 *
 * All series-valued members are indexed t = 2..T of the input: the first
 * difference of X_1 is not available from the data, so every sum after
 * differencing runs over T - 1 points with T - 1 as the normalizer.
 */
struct ModifiedFpcaResult {
    LinearOperator proj_N;
    LinearOperator proj_S;
    /// Spectrum of the corrected operator (mu_j, w_j).
    EigenSystem spectrum;
    /// The endogeneity-corrected series X_{phi,t}.
    FunctionalSeries modified_series;
    /// Serial-correlation correction; zero for the finite-dimensional variant.
    LinearOperator upsilon;
    LrcovPair lrcov;
    std::size_t phi = 0;
    /// Ordinary FPCA used as the preliminary step.
    FpcaResult preliminary;
    /// C_phi - Upsilon - Upsilon* before symmetrization.
    LinearOperator corrected;
};

/// Z_t = P^N dX_t + P^S X_t for t = 2..T.
FunctionalSeries build_z(const FunctionalSeries& x, const FpcaResult& fp);

/**
 * The phi-regularized inverse of Omega^{NN} = P^N Omega P^N, computed as a
 * phi x phi symmetric solve in the frame of the preliminary eigenvectors.
 * Zero when phi = 0. Throws RankDeficient for a degenerate block.
 */
LinearOperator attractor_block_inverse(const FpcaResult& fp, const LrcovPair& lr);

/// X_{phi,t} = X_t - Omega^{SN} (Omega^{NN}|_phi^+) P^N dX_t for t = 2..T.
FunctionalSeries modified_series(const FunctionalSeries& x, const FpcaResult& fp, const LrcovPair& lr);

/// Upsilon = Gamma^{NS} - Gamma^{NN} (Omega^{NN}|_phi^+) Omega^{NS}.
LinearOperator upsilon(const FpcaResult& fp, const LrcovPair& lr);

/**
 * Fully modified FPCA: residualize, preliminary FPCA, long-run covariances of
 * Z, endogeneity-corrected series, and the eigenproblem of
 * C_phi - Upsilon - Upsilon*. The projections come from its top phi eigenvectors.
 */
ModifiedFpcaResult modified_fpca(const FunctionalSeries& x, std::size_t phi, const KernelSpec& spec, double h,
                                 DeterministicMode mode = DeterministicMode::None);

/**
 * Finite-dimensional variant: subtracts Gamma^{SN} C_Z^{-1} Z_t in addition to
 * the endogeneity correction and solves the uncorrected eigenproblem. Requires
 * the sample covariance of Z to be numerically invertible (IllConditioned
 * otherwise).
 */
ModifiedFpcaResult harris_fpca(const FunctionalSeries& x, std::size_t phi, const KernelSpec& spec, double h,
                               DeterministicMode mode = DeterministicMode::None);

}  // namespace fmfpca
