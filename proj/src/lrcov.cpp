#include "fmfpca/lrcov.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace fmfpca {

std::string_view to_string(KernelFamily family) noexcept {
    switch (family) {
        case KernelFamily::Parzen: return "parzen";
        case KernelFamily::Bartlett: return "bartlett";
        case KernelFamily::TruncatedFlat: return "flat";
    }
    return "parzen";
}

KernelFamily parse_kernel(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "parzen") return KernelFamily::Parzen;
    if (s == "bartlett") return KernelFamily::Bartlett;
    if (s == "flat" || s == "truncated" || s == "truncatedflat") return KernelFamily::TruncatedFlat;
    fail(ErrorKind::ConfigError, "unknown kernel '" + s + "'");
}

double KernelSpec::operator()(double u) const {
    if (!(u >= 0.0)) fail(ErrorKind::InvalidArgument, "kernel argument must be nonnegative");
    if (u > kappa) return 0.0;
    const double x = u / kappa;
    switch (family) {
        case KernelFamily::Parzen:
            if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
            return 2.0 * (1.0 - x) * (1.0 - x) * (1.0 - x);
        case KernelFamily::Bartlett:
            return 1.0 - x;
        case KernelFamily::TruncatedFlat:
            return 1.0;
    }
    return 0.0;
}

double kernel_weight(const KernelSpec& spec, double u) { return spec(u); }

double default_bandwidth(std::size_t T, Bandwidth::Rule rule) {
    if (T < 2) fail(ErrorKind::InvalidArgument, "bandwidth rules need T >= 2");
    const auto t = static_cast<double>(T);
    switch (rule) {
        case Bandwidth::Rule::CubeRoot: return std::cbrt(t);
        case Bandwidth::Rule::TwoFifths: return std::pow(t, 0.4);
        case Bandwidth::Rule::Fixed: break;
    }
    fail(ErrorKind::InvalidArgument, "fixed bandwidth has no default");
}

double Bandwidth::resolve(std::size_t T) const {
    if (rule == Rule::Fixed) {
        if (!(value > 0.0)) fail(ErrorKind::NonPositiveBandwidth, "bandwidth must be positive");
        return value;
    }
    return default_bandwidth(T, rule);
}

std::string Bandwidth::label() const {
    switch (rule) {
        case Rule::CubeRoot: return "t13";
        case Rule::TwoFifths: return "t25";
        case Rule::Fixed: break;
    }
    std::ostringstream os;
    os << value;
    return os.str();
}

Bandwidth Bandwidth::parse(std::string_view text) {
    if (text == "t13" || text == "T13") return cube_root();
    if (text == "t25" || text == "T25") return two_fifths();
    double h = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), h);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(ErrorKind::ConfigError, "bandwidth must be t13, t25 or a number, got '" + std::string(text) + "'");
    if (!(h > 0.0)) fail(ErrorKind::NonPositiveBandwidth, "bandwidth must be positive");
    return fixed(h);
}

namespace {

struct LagSums {
    Eigen::MatrixXd lag0;     // sum_t z_t z_t'
    Eigen::MatrixXd lagged;   // sum_s k(s/h) sum_{t>s} z_{t-s} z_t'
};

// Rows of y are observations. Per-lag contributions are accumulated in
// increasing lag order.
LagSums lag_sums(const Eigen::MatrixXd& y, const KernelSpec& spec, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::NonPositiveBandwidth, "bandwidth must be positive");
    const Eigen::Index n = y.rows();
    const Eigen::Index k = y.cols();
    LagSums out{Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
    out.lag0.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
    out.lag0 = out.lag0.selfadjointView<Eigen::Lower>();
    for (Eigen::Index s = 1; s < n; ++s) {
        const double u = static_cast<double>(s) / h;
        if (u > spec.kappa) break;
        const double w = spec(u);
        if (w == 0.0) continue;
        // sum_{t=s+1}^{n} z_{t-s} z_t'
        out.lagged.noalias() += w * (y.topRows(n - s).transpose() * y.bottomRows(n - s));
    }
    return out;
}

}  // namespace

LrcovPair operator_lrcov(const FunctionalSeries& z, const KernelSpec& spec, double h) {
    if (z.length() < 2) fail(ErrorKind::TooShort, "long-run covariance needs at least 2 observations");
    const Eigen::MatrixXd y = z.coords();
    const auto sums = lag_sums(y, spec, h);
    const double inv_n = 1.0 / static_cast<double>(y.rows());
    // Z_t (x) Z_{t-s} has matrix Z_{t-s} Z_t'
    Eigen::MatrixXd lambda0 = inv_n * sums.lag0;
    Eigen::MatrixXd gamma = inv_n * (sums.lag0 + sums.lagged);
    Eigen::MatrixXd omega = inv_n * (sums.lag0 + sums.lagged + sums.lagged.transpose());
    const auto& grid = z.grid();
    return LrcovPair{LinearOperator(grid, std::move(omega)), LinearOperator(grid, std::move(gamma)),
                     LinearOperator(grid, std::move(lambda0)), h};
}

LrvEstimate vector_lrv(const Eigen::MatrixXd& z, const KernelSpec& spec, double h) {
    if (z.rows() < 2) fail(ErrorKind::TooShort, "long-run variance needs at least 2 observations");
    if (z.cols() < 1) fail(ErrorKind::InvalidArgument, "long-run variance needs at least one column");
    if (!z.allFinite()) fail(ErrorKind::NonFinite, "series contains non-finite values");
    const auto sums = lag_sums(z, spec, h);
    const double inv_n = 1.0 / static_cast<double>(z.rows());
    LrvEstimate out;
    out.matrix = inv_n * (sums.lag0 + sums.lagged + sums.lagged.transpose());
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff();
    const double lo = es.eigenvalues().minCoeff();
    out.positive_definite = hi > 0.0 && lo > kRankTol * hi;
    return out;
}

}  // namespace fmfpca
