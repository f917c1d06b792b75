#include "fmfpca/fpca.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace fmfpca {

FunctionalSeries::FunctionalSeries(GridPtr grid, Eigen::MatrixXd values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) fail(ErrorKind::InvalidArgument, "series without a grid");
    if (values_.rows() < 1) fail(ErrorKind::TooShort, "series needs at least one observation");
    if (static_cast<std::size_t>(values_.cols()) != grid_->size())
        fail(ErrorKind::DimMismatch, "series width differs from grid length");
    if (!values_.allFinite()) fail(ErrorKind::NonFinite, "series contains non-finite values");
}

FunctionalSeries::FunctionalSeries(GridPtr grid, std::span<const GridFunction> observations) : grid_(std::move(grid)) {
    if (!grid_) fail(ErrorKind::InvalidArgument, "series without a grid");
    if (observations.empty()) fail(ErrorKind::TooShort, "series needs at least one observation");
    values_.resize(static_cast<Eigen::Index>(observations.size()), static_cast<Eigen::Index>(grid_->size()));
    for (std::size_t t = 0; t < observations.size(); ++t) {
        require_same_grid(grid_, observations[t].grid(), "FunctionalSeries");
        values_.row(static_cast<Eigen::Index>(t)) = observations[t].values().transpose();
    }
}

FunctionalSeries FunctionalSeries::from_coords(GridPtr grid, const Eigen::MatrixXd& coords) {
    Eigen::VectorXd inv(static_cast<Eigen::Index>(grid->size()));
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        const double s = grid->sqrt_weights()[i];
        inv[i] = s > 0.0 ? 1.0 / s : 0.0;
    }
    Eigen::MatrixXd values = coords * inv.asDiagonal();
    return {std::move(grid), std::move(values)};
}

Eigen::MatrixXd FunctionalSeries::coords() const { return values_ * grid_->sqrt_weights().asDiagonal(); }

GridFunction FunctionalSeries::observation(std::size_t t) const {
    if (t >= length()) fail(ErrorKind::InvalidArgument, "observation index out of range");
    return {grid_, values_.row(static_cast<Eigen::Index>(t)).transpose()};
}

std::string_view to_string(DeterministicMode mode) noexcept {
    switch (mode) {
        case DeterministicMode::None: return "none";
        case DeterministicMode::Constant: return "const";
        case DeterministicMode::LinearTrend: return "trend";
    }
    return "none";
}

DeterministicMode parse_mode(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "none") return DeterministicMode::None;
    if (s == "const" || s == "constant") return DeterministicMode::Constant;
    if (s == "trend" || s == "lineartrend") return DeterministicMode::LinearTrend;
    fail(ErrorKind::ConfigError, "unknown deterministic mode '" + s + "'");
}

LinearOperator sample_covariance(const FunctionalSeries& x) {
    const Eigen::MatrixXd y = x.coords();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(y.cols(), y.cols());
    c.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose(), 1.0 / static_cast<double>(y.rows()));
    c = c.selfadjointView<Eigen::Lower>();
    return {x.grid(), std::move(c)};
}

FunctionalSeries residualize(const FunctionalSeries& x, DeterministicMode mode) {
    if (mode == DeterministicMode::None) return x;
    const auto T = static_cast<Eigen::Index>(x.length());
    if (mode == DeterministicMode::LinearTrend && T < 3)
        fail(ErrorKind::TooShort, "linear detrending needs at least 3 observations");
    const Eigen::RowVectorXd mean = x.values().colwise().mean();
    Eigen::MatrixXd u = x.values().rowwise() - mean;
    if (mode == DeterministicMode::LinearTrend) {
        const double centre = 0.5 * static_cast<double>(T + 1);
        Eigen::VectorXd tc(T);
        for (Eigen::Index t = 0; t < T; ++t) tc[t] = static_cast<double>(t + 1) - centre;
        // sum_t tc = 0, so regressing the raw or demeaned series on tc agrees
        const Eigen::RowVectorXd slope = (tc.transpose() * x.values()) / tc.squaredNorm();
        u -= tc * slope;
    }
    return {x.grid(), std::move(u)};
}

Eigen::MatrixXd FpcaResult::attractor_basis() const { return spectrum.vectors.leftCols(static_cast<Eigen::Index>(phi)); }

FpcaResult make_fpca_result(EigenSystem spectrum, std::size_t phi) {
    if (phi > spectrum.size()) fail(ErrorKind::PhiTooLarge, "phi exceeds the grid dimension");
    const auto& grid = spectrum.grid;
    auto proj_n = projection_from_coords(grid, spectrum.vectors.leftCols(static_cast<Eigen::Index>(phi)));
    auto proj_s = LinearOperator::identity(grid) - proj_n;
    return FpcaResult{std::move(proj_n), std::move(proj_s), std::move(spectrum), phi};
}

FpcaResult ordinary_fpca(const FunctionalSeries& x, std::size_t phi, DeterministicMode mode) {
    if (phi > x.dim()) fail(ErrorKind::PhiTooLarge, "phi exceeds the grid dimension");
    if (phi > x.length()) fail(ErrorKind::PhiTooLarge, "phi exceeds the number of observations");
    const auto u = residualize(x, mode);
    const auto c = sample_covariance(u);
    return make_fpca_result(eigendecompose_coords(c.grid(), c.coeffs()), phi);
}

}  // namespace fmfpca
