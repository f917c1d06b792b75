#include "fmfpca/transforms.hpp"

#include <cmath>
#include <sstream>

#include "fmfpca/error.hpp"

namespace fmfpca {

namespace {

double quadrature(const Grid& grid, const Eigen::VectorXd& values) {
    return Eigen::Map<const Eigen::VectorXd>(grid.weights().data(), static_cast<Eigen::Index>(grid.size())).dot(values);
}

}  // namespace

DensityFunction::DensityFunction(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) fail(ErrorKind::InvalidArgument, "density without a grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->size())
        fail(ErrorKind::DimMismatch, "density length differs from grid length");
    if (!values_.allFinite()) fail(ErrorKind::NonFinite, "density contains non-finite values");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= kDensityFloor)) {
            std::ostringstream os;
            os << "density value " << values_[i] << " at u = " << grid_->points()[static_cast<std::size_t>(i)]
               << " is below the floor " << kDensityFloor;
            fail(ErrorKind::NonPositiveDensity, os.str());
        }
    }
    const double total = quadrature(*grid_, values_);
    if (std::abs(total - 1.0) > kDensityIntegralTol)
        fail(ErrorKind::InvalidArgument, "density integrates to " + std::to_string(total) + ", not 1");
}

DensityFunction DensityFunction::normalized(GridPtr grid, Eigen::VectorXd values) {
    if (!grid) fail(ErrorKind::InvalidArgument, "density without a grid");
    if (static_cast<std::size_t>(values.size()) != grid->size())
        fail(ErrorKind::DimMismatch, "density length differs from grid length");
    if (!values.allFinite()) fail(ErrorKind::NonFinite, "density contains non-finite values");
    if (!(values.minCoeff() > 0.0)) fail(ErrorKind::NonPositiveDensity, "density values must be positive");
    const double total = quadrature(*grid, values);
    values /= total;
    return {std::move(grid), std::move(values)};
}

double integrate(const GridFunction& f) { return quadrature(*f.grid(), f.values()); }

GridFunction logit_curve(const GridFunction& f) {
    const auto& v = f.values();
    std::ostringstream bad;
    std::size_t n_bad = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0 && v[i] < 1.0)) {
            if (n_bad++ < 10) bad << (n_bad > 1 ? ", " : "") << "u = " << f.grid()->points()[static_cast<std::size_t>(i)]
                                  << " (" << v[i] << ")";
        }
    }
    if (n_bad > 0)
        fail(ErrorKind::OutOfDomain,
             std::to_string(n_bad) + " value(s) outside (0,1): " + bad.str() + (n_bad > 10 ? ", ..." : ""));
    Eigen::VectorXd out = (v.array() / (1.0 - v.array())).log().matrix();
    return {f.grid(), std::move(out)};
}

GridFunction clr_transform(const DensityFunction& x) {
    const auto& grid = *x.grid();
    Eigen::VectorXd logs = x.values().array().log().matrix();
    logs.array() -= quadrature(grid, logs) / grid.length();
    // second pass removes the rounding left by the first
    logs.array() -= quadrature(grid, logs) / grid.length();
    return {x.grid(), std::move(logs)};
}

DensityFunction inverse_clr(const GridFunction& f) {
    const auto& grid = *f.grid();
    const auto& v = f.values();
    if (!v.allFinite()) fail(ErrorKind::NonFinite, "function contains non-finite values");
    const double mean = quadrature(grid, v) / grid.length();
    if (std::abs(mean) > kDensityIntegralTol)
        fail(ErrorKind::NotCentered, "function has quadrature mean " + std::to_string(mean));
    const double hi = v.maxCoeff();
    if (hi - v.minCoeff() > kMaxLogRange) fail(ErrorKind::Overflow, "range of the function exceeds 700");
    Eigen::VectorXd e = (v.array() - hi).exp().matrix();
    e /= quadrature(grid, e);
    return {f.grid(), std::move(e)};
}

}  // namespace fmfpca
