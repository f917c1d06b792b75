#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fmfpca/fpca.hpp"
#include "fmfpca/hilbert.hpp"

namespace fmfpca {

enum class KernelFamily { Parzen, Bartlett, TruncatedFlat };

std::string_view to_string(KernelFamily family) noexcept;
/// "parzen", "bartlett", "flat".
KernelFamily parse_kernel(std::string_view text);

/// Lag-window kernel with k(0) = 1 and k(u) = 0 for u > kappa.
struct KernelSpec {
    KernelFamily family = KernelFamily::Parzen;
    double kappa = 1.0;

    /// k(u) for u >= 0.
    [[nodiscard]] double operator()(double u) const;

    static KernelSpec parzen() { return {KernelFamily::Parzen, 1.0}; }
    static KernelSpec bartlett() { return {KernelFamily::Bartlett, 1.0}; }
    static KernelSpec truncated_flat() { return {KernelFamily::TruncatedFlat, 1.0}; }
};

double kernel_weight(const KernelSpec& spec, double u);

/// Bandwidth as a rule of the sample length or a fixed number.
struct Bandwidth {
    enum class Rule { CubeRoot, TwoFifths, Fixed };
    Rule rule = Rule::CubeRoot;
    double value = 0.0;  // used when rule == Fixed

    [[nodiscard]] double resolve(std::size_t T) const;
    [[nodiscard]] std::string label() const;

    static Bandwidth cube_root() { return {Rule::CubeRoot, 0.0}; }
    static Bandwidth two_fifths() { return {Rule::TwoFifths, 0.0}; }
    static Bandwidth fixed(double h) { return {Rule::Fixed, h}; }
    /// "t13", "t25" or a positive number.
    static Bandwidth parse(std::string_view text);
};

/// T^{1/3} or T^{2/5}, unrounded.
double default_bandwidth(std::size_t T, Bandwidth::Rule rule);

struct LrcovPair {
    LinearOperator omega;    ///< two-sided long-run covariance
    LinearOperator gamma;    ///< one-sided long-run covariance
    LinearOperator lambda0;  ///< lag-zero covariance
    double bandwidth_used = 0.0;
};

/**
 * Kernel estimates of the long-run and one-sided long-run covariance operators:
 *
 *   Lambda0 = n^{-1} sum_t Z_t (x) Z_t
 *   Gamma   = Lambda0 + n^{-1} sum_{s>=1} k(s/h) sum_{t>s} Z_t (x) Z_{t-s}
 *   Omega   = Gamma + Gamma* - Lambda0
 *
 * where n is the number of observations in `z`.
 */
LrcovPair operator_lrcov(const FunctionalSeries& z, const KernelSpec& spec, double h);

struct LrvEstimate {
    Eigen::MatrixXd matrix;
    bool positive_definite = false;
};

/// The same estimator for a T x K real series (rows are time points).
LrvEstimate vector_lrv(const Eigen::MatrixXd& z, const KernelSpec& spec, double h);

}  // namespace fmfpca
