#include "fmfpca/modified.hpp"

#include <string>

namespace fmfpca {

namespace {

struct Differenced {
    Eigen::MatrixXd level;  // Y_t, t = 2..T
    Eigen::MatrixXd diff;   // Y_t - Y_{t-1}, t = 2..T
};

Differenced differenced_coords(const FunctionalSeries& x) {
    if (x.length() < 2) fail(ErrorKind::TooShort, "differencing needs at least 2 observations");
    const Eigen::MatrixXd y = x.coords();
    const Eigen::Index n = y.rows() - 1;
    return {y.bottomRows(n), y.bottomRows(n) - y.topRows(n)};
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

FunctionalSeries build_z(const FunctionalSeries& x, const FpcaResult& fp) {
    require_same_grid(x.grid(), fp.proj_N.grid(), "build_z");
    const auto d = differenced_coords(x);
    // rows are observations, so P z becomes z' P'
    Eigen::MatrixXd z = d.diff * fp.proj_N.coeffs().transpose() + d.level * fp.proj_S.coeffs().transpose();
    return FunctionalSeries::from_coords(x.grid(), z);
}

LinearOperator attractor_block_inverse(const FpcaResult& fp, const LrcovPair& lr) {
    require_same_grid(fp.proj_N.grid(), lr.omega.grid(), "attractor_block_inverse");
    const auto& grid = lr.omega.grid();
    if (fp.phi == 0) return LinearOperator::zero(grid);
    const Eigen::MatrixXd v = fp.attractor_basis();
    const Eigen::MatrixXd block = symmetrized(v.transpose() * lr.omega.coeffs() * v);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    const double hi = es.eigenvalues().maxCoeff();
    const double lo = es.eigenvalues().minCoeff();
    if (!(hi > 0.0) || !(lo > kRankTol * hi))
        fail(ErrorKind::RankDeficient, "long-run covariance of the attractor block is degenerate (smallest eigenvalue " +
                                           std::to_string(lo) + ")");
    const Eigen::MatrixXd inv =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return {grid, v * inv * v.transpose()};
}

namespace {

// Omega^{SN} (Omega^{NN}|^+) P^N
Eigen::MatrixXd endogeneity_operator(const FpcaResult& fp, const LrcovPair& lr) {
    const auto inv = attractor_block_inverse(fp, lr);
    const Eigen::MatrixXd& pn = fp.proj_N.coeffs();
    const Eigen::MatrixXd& ps = fp.proj_S.coeffs();
    return ps * lr.omega.coeffs() * pn * inv.coeffs() * pn;
}

}  // namespace

FunctionalSeries modified_series(const FunctionalSeries& x, const FpcaResult& fp, const LrcovPair& lr) {
    require_same_grid(x.grid(), fp.proj_N.grid(), "modified_series");
    require_same_grid(x.grid(), lr.omega.grid(), "modified_series");
    const auto d = differenced_coords(x);
    if (fp.phi == 0) return FunctionalSeries::from_coords(x.grid(), d.level);
    const Eigen::MatrixXd corr = endogeneity_operator(fp, lr);
    Eigen::MatrixXd out = d.level - d.diff * corr.transpose();
    return FunctionalSeries::from_coords(x.grid(), out);
}

LinearOperator upsilon(const FpcaResult& fp, const LrcovPair& lr) {
    require_same_grid(fp.proj_N.grid(), lr.omega.grid(), "upsilon");
    const auto& grid = lr.omega.grid();
    if (fp.phi == 0) return LinearOperator::zero(grid);
    const auto inv = attractor_block_inverse(fp, lr);
    const Eigen::MatrixXd& pn = fp.proj_N.coeffs();
    const Eigen::MatrixXd& ps = fp.proj_S.coeffs();
    const Eigen::MatrixXd& g = lr.gamma.coeffs();
    const Eigen::MatrixXd& w = lr.omega.coeffs();
    Eigen::MatrixXd ups = pn * g * ps - (pn * g * pn) * inv.coeffs() * (pn * w * ps);
    return {grid, std::move(ups)};
}

namespace {

void check_pipeline_inputs(const FunctionalSeries& x, std::size_t phi) {
    if (x.length() < 4) fail(ErrorKind::TooShort, "modified FPCA needs at least 4 observations");
    if (phi > x.dim()) fail(ErrorKind::PhiTooLarge, "phi exceeds the grid dimension");
    if (phi > x.length()) fail(ErrorKind::PhiTooLarge, "phi exceeds the number of observations");
}

FpcaResult projections_of(const LinearOperator& corrected, std::size_t phi) {
    return make_fpca_result(eigendecompose_coords(corrected.grid(), symmetrized(corrected.coeffs())), phi);
}

}  // namespace

ModifiedFpcaResult modified_fpca(const FunctionalSeries& x, std::size_t phi, const KernelSpec& spec, double h,
                                 DeterministicMode mode) {
    check_pipeline_inputs(x, phi);
    const auto u = residualize(x, mode);
    auto fp = ordinary_fpca(u, phi, DeterministicMode::None);
    const auto z = build_z(u, fp);
    auto lr = operator_lrcov(z, spec, h);
    auto xs = modified_series(u, fp, lr);
    auto ups = upsilon(fp, lr);
    auto corrected = sample_covariance(xs) - ups - ups.adjoint();
    auto est = projections_of(corrected, phi);
    return ModifiedFpcaResult{std::move(est.proj_N), std::move(est.proj_S), std::move(est.spectrum),
                              std::move(xs),         std::move(ups),        std::move(lr),
                              phi,                   std::move(fp),         std::move(corrected)};
}

ModifiedFpcaResult harris_fpca(const FunctionalSeries& x, std::size_t phi, const KernelSpec& spec, double h,
                               DeterministicMode mode) {
    if (phi == 0) fail(ErrorKind::InvalidArgument, "the finite-dimensional variant needs phi >= 1");
    check_pipeline_inputs(x, phi);
    const auto u = residualize(x, mode);
    auto fp = ordinary_fpca(u, phi, DeterministicMode::None);
    const auto z = build_z(u, fp);
    auto lr = operator_lrcov(z, spec, h);
    const auto xs = modified_series(u, fp, lr);

    const auto cz = sample_covariance(z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cz.coeffs());
    const double hi = es.eigenvalues().maxCoeff();
    const double lo = es.eigenvalues().minCoeff();
    if (!(hi > 0.0) || !(lo > kRankTol * hi))
        fail(ErrorKind::IllConditioned, "sample covariance of Z is not invertible (eigenvalue ratio " +
                                            std::to_string(hi > 0.0 ? lo / hi : 0.0) + ")");
    const Eigen::MatrixXd cz_inv =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd gamma_sn = fp.proj_S.coeffs() * lr.gamma.coeffs() * fp.proj_N.coeffs();
    const Eigen::MatrixXd extra = gamma_sn * cz_inv;
    const Eigen::MatrixXd adjusted = xs.coords() - z.coords() * extra.transpose();
    auto xdd = FunctionalSeries::from_coords(x.grid(), adjusted);

    auto cov = sample_covariance(xdd);
    auto est = projections_of(cov, phi);
    return ModifiedFpcaResult{std::move(est.proj_N), std::move(est.proj_S), std::move(est.spectrum),
                              std::move(xdd),        LinearOperator::zero(x.grid()),
                              std::move(lr),         phi,
                              std::move(fp),         std::move(cov)};
}

}  // namespace fmfpca
