#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fmfpca/error.hpp"

namespace fmfpca {

/**
 * @brief Discretization of the function domain: abscissae plus quadrature weights.
 *
 * The inner product of two grid functions is sum_i w_i f(u_i) g(u_i). Every
 * operator in the library is stored in orthonormal coordinates
 * x~ = D^{1/2} x, where D = diag(w), so adjoints are plain transposes.
 */
class Grid {
public:
    Grid(std::vector<double> points, std::vector<double> weights);

    /// Trapezoid weights on the supplied abscissae.
    static std::shared_ptr<const Grid> trapezoid(std::vector<double> points);
    /// `n` equally spaced points on [a, b] with trapezoid weights.
    static std::shared_ptr<const Grid> uniform(std::size_t n, double a = 0.0, double b = 1.0);

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] const Eigen::VectorXd& sqrt_weights() const noexcept { return sqrt_w_; }
    /// Sum of the quadrature weights (the measure of the domain).
    [[nodiscard]] double length() const noexcept { return length_; }

    /// Values -> orthonormal coordinates.
    [[nodiscard]] Eigen::VectorXd to_coords(const Eigen::VectorXd& values) const;
    /// Orthonormal coordinates -> values. Points with zero weight map to 0.
    [[nodiscard]] Eigen::VectorXd from_coords(const Eigen::VectorXd& coords) const;

    [[nodiscard]] bool operator==(const Grid& other) const noexcept {
        return points_ == other.points_ && weights_ == other.weights_;
    }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
    Eigen::VectorXd sqrt_w_;
    Eigen::VectorXd inv_sqrt_w_;
    double length_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept;
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where);

/// A single functional observation sampled on a Grid.
class GridFunction {
public:
    GridFunction(GridPtr grid, Eigen::VectorXd values);

    static GridFunction from_coords(GridPtr grid, const Eigen::VectorXd& coords);
    static GridFunction zero(GridPtr grid);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
    [[nodiscard]] Eigen::VectorXd coords() const { return grid_->to_coords(values_); }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

private:
    GridPtr grid_;
    Eigen::VectorXd values_;
};

double inner_product(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

/// Bounded operator on the discretized space, held as a p x p matrix in
/// orthonormal coordinates.
class LinearOperator {
public:
    LinearOperator(GridPtr grid, Eigen::MatrixXd coeffs);

    static LinearOperator zero(GridPtr grid);
    static LinearOperator identity(GridPtr grid);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(coeffs_.rows()); }

    [[nodiscard]] GridFunction apply(const GridFunction& f) const;
    [[nodiscard]] LinearOperator adjoint() const;
    /// Largest singular value.
    [[nodiscard]] double norm() const;
    /// max |A - A*| entrywise.
    [[nodiscard]] double asymmetry() const;

    LinearOperator& operator+=(const LinearOperator& rhs);
    LinearOperator& operator-=(const LinearOperator& rhs);
    LinearOperator& operator*=(double s);

private:
    GridPtr grid_;
    Eigen::MatrixXd coeffs_;
};

LinearOperator operator+(LinearOperator lhs, const LinearOperator& rhs);
LinearOperator operator-(LinearOperator lhs, const LinearOperator& rhs);
LinearOperator operator*(double s, LinearOperator op);
/// Composition: (A * B) f = A(B f).
LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);

/// x (tensor) y : z -> <x, z> y.
LinearOperator tensor(const GridFunction& x, const GridFunction& y);

/// Spectrum of a self-adjoint operator, eigenvalues descending.
struct EigenSystem {
    GridPtr grid;
    Eigen::VectorXd eigenvalues;
    /// Eigenvectors as orthonormal-coordinate columns, in eigenvalue order.
    Eigen::MatrixXd vectors;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    [[nodiscard]] GridFunction eigenfunction(std::size_t j) const;
    [[nodiscard]] std::vector<GridFunction> eigenfunctions(std::size_t count) const;
    /// sum_j lambda_j v_j (tensor) v_j
    [[nodiscard]] LinearOperator reconstruct() const;
};

/// Relative asymmetry tolerance below which an operator is symmetrized and
/// treated as self-adjoint.
inline constexpr double kSelfAdjointTol = 1e-10;
/// Rank decisions: eigenvalues at or below this multiple of the largest are zero.
inline constexpr double kRankTol = 1e-10;

/**
 * Full eigendecomposition of a self-adjoint operator.
 *
 * Eigenvalues are sorted descending; each eigenvector's entry of largest
 * magnitude is made positive. Ties keep the solver's order.
 */
EigenSystem eigendecompose(const LinearOperator& a);

/// Same as eigendecompose on a raw symmetric coordinate matrix.
EigenSystem eigendecompose_coords(const GridPtr& grid, const Eigen::MatrixXd& sym);

/// The m-regularized inverse sum_{j<=m} a_j^{-1} u_j (tensor) u_j.
LinearOperator regularized_inverse(const LinearOperator& a, std::size_t m);

/// Orthogonal projection onto span(vs). vs must be orthonormal to 1e-8; small
/// deviations are cleaned up by re-orthonormalization. Empty -> zero operator.
LinearOperator projection_from(const GridPtr& grid, std::span<const GridFunction> vs);

/// Projection onto the span of orthonormal coordinate columns.
LinearOperator projection_from_coords(const GridPtr& grid, const Eigen::MatrixXd& basis);

/**
 * Orthonormalize an arbitrary list of functions (Gram-Schmidt through a QR of
 * the coordinate matrix). Throws IllConditioned when the Gram matrix condition
 * number exceeds `max_condition`.
 */
std::vector<GridFunction> orthonormalize(std::span<const GridFunction> vs, double max_condition = 1e6);

}  // namespace fmfpca
