#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fmfpca/hilbert.hpp"

namespace fmfpca {

/// Ordered sample X_1..X_T on one grid. Row t of values() is observation t.
class FunctionalSeries {
public:
    FunctionalSeries(GridPtr grid, Eigen::MatrixXd values);
    FunctionalSeries(GridPtr grid, std::span<const GridFunction> observations);

    static FunctionalSeries from_coords(GridPtr grid, const Eigen::MatrixXd& coords);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    /// Observations in orthonormal coordinates (T x p).
    [[nodiscard]] Eigen::MatrixXd coords() const;
    [[nodiscard]] std::size_t length() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    /// Zero-based observation access.
    [[nodiscard]] GridFunction observation(std::size_t t) const;

private:
    GridPtr grid_;
    Eigen::MatrixXd values_;
};

/// Deterministic component removed before estimation: none, intercept (D1),
/// or intercept plus linear trend (D2).
enum class DeterministicMode { None, Constant, LinearTrend };

std::string_view to_string(DeterministicMode mode) noexcept;
/// Accepts "none", "const"/"constant", "trend"/"lineartrend".
DeterministicMode parse_mode(std::string_view text);

/// C = T^{-1} sum_t X_t (tensor) X_t. Not divided by T - 1.
LinearOperator sample_covariance(const FunctionalSeries& x);

/// Closed-form demeaning (Constant) or demeaning plus projection off the
/// centred time regressor t - (T+1)/2 (LinearTrend).
FunctionalSeries residualize(const FunctionalSeries& x, DeterministicMode mode);

struct FpcaResult {
    LinearOperator proj_N;
    LinearOperator proj_S;
    EigenSystem spectrum;
    std::size_t phi = 0;

    /// The first phi eigenvectors (coordinate columns) spanning ran proj_N.
    [[nodiscard]] Eigen::MatrixXd attractor_basis() const;
};

/// Assemble an FpcaResult from a spectrum: proj_N spans the top phi eigenvectors.
FpcaResult make_fpca_result(EigenSystem spectrum, std::size_t phi);

/// Ordinary FPCA on the residualized sample covariance.
FpcaResult ordinary_fpca(const FunctionalSeries& x, std::size_t phi, DeterministicMode mode = DeterministicMode::None);

}  // namespace fmfpca
