#include "fmfpca/cointtest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmfpca/error.hpp"
#include "fmfpca/modified.hpp"

namespace fmfpca {

bool TestOutcome::rejects_at(double alpha) const {
    const double level = 1.0 - alpha;
    for (const auto& [l, r] : reject)
        if (std::abs(l - level) < 1e-9) return r;
    fail(ErrorKind::MissingCriticalValues, "no critical value at significance " + std::to_string(alpha));
}

double kpss_core(const Eigen::MatrixXd& z, const KernelSpec& spec, double h) {
    if (z.rows() < 2) fail(ErrorKind::TooShort, "statistic needs at least 2 observations");
    const auto lrv = vector_lrv(z, spec, h);
    if (!lrv.positive_definite) fail(ErrorKind::SingularLrv, "long-run variance of the projected series is singular");
    Eigen::MatrixXd partial(z.rows(), z.cols());
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(z.cols());
    for (Eigen::Index t = 0; t < z.rows(); ++t) {
        acc += z.row(t);
        partial.row(t) = acc;
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(lrv.matrix);
    const Eigen::MatrixXd solved = ldlt.solve(partial.transpose());
    const double n = static_cast<double>(z.rows());
    return std::max(0.0, (partial.transpose().cwiseProduct(solved)).sum() / (n * n));
}

TestOutcome dimension_test(const FunctionalSeries& x, std::size_t phi0, std::size_t K, const KernelSpec& spec,
                           double h, DeterministicMode mode, const CriticalValueTable& cvt) {
    if (K <= phi0 || K > x.dim())
        fail(ErrorKind::KOutOfRange, "K must satisfy phi0 < K <= p (phi0 = " + std::to_string(phi0) +
                                         ", K = " + std::to_string(K) + ")");
    const auto cvs = cvt.levels_for(mode, K - phi0, phi0);
    if (cvs.empty())
        fail(ErrorKind::MissingCriticalValues, "no critical values for mode " + std::string(to_string(mode)) +
                                                   ", dim_w " + std::to_string(K - phi0) + ", dim_b " +
                                                   std::to_string(phi0));
    const auto est = modified_fpca(x, phi0, spec, h, mode);
    const Eigen::MatrixXd w = est.spectrum.vectors.middleCols(static_cast<Eigen::Index>(phi0),
                                                              static_cast<Eigen::Index>(K - phi0));
    TestOutcome out;
    out.projected_series = est.modified_series.coords() * w;
    out.statistic = kpss_core(out.projected_series, spec, h);
    out.K = K;
    out.phi0 = phi0;
    out.mode = mode;
    out.critical_values = cvs;
    for (const auto& [level, cv] : cvs) out.reject[level] = out.statistic > cv;
    return out;
}

std::size_t default_phi_cap(std::size_t p, std::size_t T, std::size_t k_policy) {
    if (k_policy < 1 || k_policy > p) fail(ErrorKind::KOutOfRange, "K policy must lie in [1, p]");
    return std::min(p - k_policy, T / 10);
}

SequentialResult sequential_dimension(const FunctionalSeries& x, double alpha, std::size_t k_policy,
                                      const KernelSpec& spec, double h, DeterministicMode mode,
                                      const CriticalValueTable& cvt, std::size_t phi_cap,
                                      const CvEnsure& ensure) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
    if (k_policy < 1) fail(ErrorKind::KOutOfRange, "K policy must be at least 1");
    if (k_policy > x.dim() || phi_cap > x.dim() - k_policy)
        fail(ErrorKind::KOutOfRange, "phi cap exceeds p - K policy");
    SequentialResult res;
    res.alpha = alpha;
    for (std::size_t phi0 = 0; phi0 <= phi_cap; ++phi0) {
        if (ensure) ensure(mode, k_policy, phi0);
        res.trajectory.push_back(dimension_test(x, phi0, phi0 + k_policy, spec, h, mode, cvt));
        if (!res.trajectory.back().rejects_at(alpha)) {
            res.phi_hat = phi0;
            return res;
        }
    }
    res.phi_hat = phi_cap;
    res.hit_cap = true;
    return res;
}

namespace {

FunctionalSeries remove_subspace(const FunctionalSeries& x, std::span<const GridFunction> m) {
    const auto pm = projection_from(x.grid(), m);
    const Eigen::MatrixXd y = x.coords();
    return FunctionalSeries::from_coords(x.grid(), y - y * pm.coeffs().transpose());
}

}  // namespace

TestOutcome subspace_in_attractor_test(const FunctionalSeries& x, std::span<const GridFunction> m, std::size_t phi,
                                       std::size_t K, const KernelSpec& spec, double h, DeterministicMode mode,
                                       const CriticalValueTable& cvt) {
    if (m.size() > phi)
        fail(ErrorKind::DimMismatch, "dim(M) = " + std::to_string(m.size()) + " exceeds phi = " + std::to_string(phi));
    return dimension_test(remove_subspace(x, m), phi - m.size(), K, spec, h, mode, cvt);
}

TestOutcome attractor_in_subspace_test(const FunctionalSeries& x, std::span<const GridFunction> m, std::size_t K,
                                       const KernelSpec& spec, double h, DeterministicMode mode,
                                       const CriticalValueTable& cvt) {
    if (m.empty()) fail(ErrorKind::InvalidArgument, "M must be nonempty");
    return dimension_test(remove_subspace(x, m), 0, K, spec, h, mode, cvt);
}

}  // namespace fmfpca
