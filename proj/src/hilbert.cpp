#include "fmfpca/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fmfpca {

Grid::Grid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() < 2) fail(ErrorKind::InvalidArgument, "grid needs at least 2 points");
    if (points_.size() != weights_.size())
        fail(ErrorKind::InvalidArgument, "grid points and weights differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || !std::isfinite(weights_[i]))
            fail(ErrorKind::NonFinite, "grid contains a non-finite entry");
        if (weights_[i] < 0.0) fail(ErrorKind::InvalidArgument, "negative quadrature weight");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            fail(ErrorKind::NonMonotoneGrid,
                 "grid points must be strictly increasing (index " + std::to_string(i) + ")");
    }
    const auto n = static_cast<Eigen::Index>(points_.size());
    sqrt_w_.resize(n);
    inv_sqrt_w_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sqrt_w_[i] = std::sqrt(weights_[static_cast<std::size_t>(i)]);
        inv_sqrt_w_[i] = sqrt_w_[i] > 0.0 ? 1.0 / sqrt_w_[i] : 0.0;
    }
    length_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

std::shared_ptr<const Grid> Grid::trapezoid(std::vector<double> points) {
    if (points.size() < 2) fail(ErrorKind::InvalidArgument, "grid needs at least 2 points");
    std::vector<double> w(points.size(), 0.0);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double half = 0.5 * (points[i + 1] - points[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    return std::make_shared<const Grid>(std::move(points), std::move(w));
}

std::shared_ptr<const Grid> Grid::uniform(std::size_t n, double a, double b) {
    if (n < 2) fail(ErrorKind::InvalidArgument, "grid needs at least 2 points");
    if (!(b > a)) fail(ErrorKind::InvalidArgument, "uniform grid needs b > a");
    std::vector<double> pts(n);
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) pts[i] = a + step * static_cast<double>(i);
    pts.back() = b;
    return trapezoid(std::move(pts));
}

Eigen::VectorXd Grid::to_coords(const Eigen::VectorXd& values) const { return values.cwiseProduct(sqrt_w_); }

Eigen::VectorXd Grid::from_coords(const Eigen::VectorXd& coords) const { return coords.cwiseProduct(inv_sqrt_w_); }

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
    if (!same_grid(a, b)) fail(ErrorKind::GridMismatch, std::string(where) + ": operands live on different grids");
}

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " contains non-finite entries");
}

}  // namespace

GridFunction::GridFunction(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) fail(ErrorKind::InvalidArgument, "grid function without a grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->size())
        fail(ErrorKind::DimMismatch, "grid function length differs from grid length");
    require_finite(values_, "grid function");
}

GridFunction GridFunction::from_coords(GridPtr grid, const Eigen::VectorXd& coords) {
    auto values = grid->from_coords(coords);
    return {std::move(grid), std::move(values)};
}

GridFunction GridFunction::zero(GridPtr grid) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    return {std::move(grid), Eigen::VectorXd::Zero(n)};
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid(), "inner_product");
    const auto& w = f.grid()->weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        acc += w[i] * f.values()[k] * g.values()[k];
    }
    return acc;
}

double norm(const GridFunction& f) { return std::sqrt(inner_product(f, f)); }

LinearOperator::LinearOperator(GridPtr grid, Eigen::MatrixXd coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (!grid_) fail(ErrorKind::InvalidArgument, "operator without a grid");
    const auto p = static_cast<Eigen::Index>(grid_->size());
    if (coeffs_.rows() != p || coeffs_.cols() != p)
        fail(ErrorKind::DimMismatch, "operator matrix does not match grid dimension");
    require_finite(coeffs_, "operator");
}

LinearOperator LinearOperator::zero(GridPtr grid) {
    const auto p = static_cast<Eigen::Index>(grid->size());
    return {std::move(grid), Eigen::MatrixXd::Zero(p, p)};
}

LinearOperator LinearOperator::identity(GridPtr grid) {
    const auto p = static_cast<Eigen::Index>(grid->size());
    return {std::move(grid), Eigen::MatrixXd::Identity(p, p)};
}

GridFunction LinearOperator::apply(const GridFunction& f) const {
    require_same_grid(grid_, f.grid(), "LinearOperator::apply");
    return GridFunction::from_coords(grid_, coeffs_ * f.coords());
}

LinearOperator LinearOperator::adjoint() const { return {grid_, coeffs_.transpose()}; }

double LinearOperator::norm() const {
    if (coeffs_.isZero(0.0)) return 0.0;
    if ((coeffs_ - coeffs_.transpose()).cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coeffs_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(coeffs_);
    return svd.singularValues()(0);
}

double LinearOperator::asymmetry() const { return (coeffs_ - coeffs_.transpose()).cwiseAbs().maxCoeff(); }

LinearOperator& LinearOperator::operator+=(const LinearOperator& rhs) {
    require_same_grid(grid_, rhs.grid_, "operator+");
    coeffs_ += rhs.coeffs_;
    return *this;
}

LinearOperator& LinearOperator::operator-=(const LinearOperator& rhs) {
    require_same_grid(grid_, rhs.grid_, "operator-");
    coeffs_ -= rhs.coeffs_;
    return *this;
}

LinearOperator& LinearOperator::operator*=(double s) {
    coeffs_ *= s;
    return *this;
}

LinearOperator operator+(LinearOperator lhs, const LinearOperator& rhs) { return lhs += rhs; }
LinearOperator operator-(LinearOperator lhs, const LinearOperator& rhs) { return lhs -= rhs; }
LinearOperator operator*(double s, LinearOperator op) { return op *= s; }

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
    require_same_grid(a.grid(), b.grid(), "operator composition");
    return {a.grid(), a.coeffs() * b.coeffs()};
}

LinearOperator tensor(const GridFunction& x, const GridFunction& y) {
    require_same_grid(x.grid(), y.grid(), "tensor");
    // (x (tensor) y) z = <x, z> y  ->  matrix y x^T in orthonormal coordinates
    return {x.grid(), y.coords() * x.coords().transpose()};
}

GridFunction EigenSystem::eigenfunction(std::size_t j) const {
    if (j >= size()) fail(ErrorKind::InvalidArgument, "eigenfunction index out of range");
    return GridFunction::from_coords(grid, vectors.col(static_cast<Eigen::Index>(j)));
}

std::vector<GridFunction> EigenSystem::eigenfunctions(std::size_t count) const {
    std::vector<GridFunction> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) out.push_back(eigenfunction(j));
    return out;
}

LinearOperator EigenSystem::reconstruct() const {
    return {grid, vectors * eigenvalues.asDiagonal() * vectors.transpose()};
}

EigenSystem eigendecompose_coords(const GridPtr& grid, const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) fail(ErrorKind::NonFinite, "eigensolver failed to converge");
    const Eigen::Index p = sym.rows();
    EigenSystem out{grid, Eigen::VectorXd(p), Eigen::MatrixXd(p, p)};
    // Eigen returns ascending order; reverse it. Reversal keeps tied values
    // in a fixed (deterministic) relative order.
    for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::Index src = p - 1 - j;
        out.eigenvalues[j] = es.eigenvalues()[src];
        Eigen::VectorXd v = es.eigenvectors().col(src);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) v = -v;
        out.vectors.col(j) = v;
    }
    return out;
}

namespace {

Eigen::MatrixXd checked_symmetric(const LinearOperator& a) {
    const Eigen::MatrixXd& m = a.coeffs();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = a.asymmetry();
    if (asym > kSelfAdjointTol * scale)
        fail(ErrorKind::NotSelfAdjoint, "operator asymmetry " + std::to_string(asym) + " exceeds tolerance");
    return 0.5 * (m + m.transpose());
}

}  // namespace

EigenSystem eigendecompose(const LinearOperator& a) { return eigendecompose_coords(a.grid(), checked_symmetric(a)); }

LinearOperator regularized_inverse(const LinearOperator& a, std::size_t m) {
    const auto sym = checked_symmetric(a);
    if (m == 0) return LinearOperator::zero(a.grid());
    if (m > a.dim()) fail(ErrorKind::InvalidArgument, "regularization order exceeds operator dimension");
    const auto es = eigendecompose_coords(a.grid(), sym);
    const double top = es.eigenvalues[0];
    const double tol = kRankTol * std::max(top, 0.0);
    const double am = es.eigenvalues[static_cast<Eigen::Index>(m - 1)];
    if (!(top > 0.0) || !(am > tol))
        fail(ErrorKind::RankDeficient,
             "eigenvalue " + std::to_string(m) + " (" + std::to_string(am) + ") is not above the rank tolerance");
    const auto k = static_cast<Eigen::Index>(m);
    const Eigen::MatrixXd u = es.vectors.leftCols(k);
    const Eigen::VectorXd inv = es.eigenvalues.head(k).cwiseInverse();
    return {a.grid(), u * inv.asDiagonal() * u.transpose()};
}

LinearOperator projection_from_coords(const GridPtr& grid, const Eigen::MatrixXd& basis) {
    if (basis.cols() == 0) return LinearOperator::zero(grid);
    return {grid, basis * basis.transpose()};
}

namespace {

Eigen::MatrixXd coords_matrix(const GridPtr& grid, std::span<const GridFunction> vs) {
    const auto p = static_cast<Eigen::Index>(grid->size());
    Eigen::MatrixXd m(p, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t j = 0; j < vs.size(); ++j) {
        require_same_grid(grid, vs[j].grid(), "projection_from");
        m.col(static_cast<Eigen::Index>(j)) = vs[j].coords();
    }
    return m;
}

// Thin Q factor with signs aligned to the input columns.
Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    const Eigen::MatrixXd r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

}  // namespace

LinearOperator projection_from(const GridPtr& grid, std::span<const GridFunction> vs) {
    if (vs.empty()) return LinearOperator::zero(grid);
    const Eigen::MatrixXd m = coords_matrix(grid, vs);
    const auto k = m.cols();
    const double dev = (m.transpose() * m - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (dev > 1e-8) fail(ErrorKind::NotOrthonormal, "basis deviates from orthonormality by " + std::to_string(dev));
    return projection_from_coords(grid, thin_q(m));
}

std::vector<GridFunction> orthonormalize(std::span<const GridFunction> vs, double max_condition) {
    if (vs.empty()) return {};
    const auto grid = vs.front().grid();
    const Eigen::MatrixXd m = coords_matrix(grid, vs);
    if (m.cols() > m.rows()) fail(ErrorKind::DimMismatch, "more functions than grid dimension");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > 0.0) || hi / lo > max_condition)
        fail(ErrorKind::IllConditioned, "Gram matrix condition number exceeds " + std::to_string(max_condition));
    const Eigen::MatrixXd q = thin_q(m);
    std::vector<GridFunction> out;
    out.reserve(vs.size());
    for (Eigen::Index j = 0; j < q.cols(); ++j) out.push_back(GridFunction::from_coords(grid, q.col(j)));
    return out;
}

}  // namespace fmfpca
