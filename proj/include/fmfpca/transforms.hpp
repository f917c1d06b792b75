#pragma once

#include "fmfpca/hilbert.hpp"

namespace fmfpca {

/// Smallest admissible density value.
inline constexpr double kDensityFloor = 1e-12;
/// Tolerance on the quadrature integral of a density and on the mean of a clr image.
inline constexpr double kDensityIntegralTol = 1e-6;
/// Largest range of an inverse_clr argument before exp loses all precision.
inline constexpr double kMaxLogRange = 700.0;

/// Density sampled on a grid: values >= kDensityFloor integrating to one.
class DensityFunction {
public:
    /// Validates the floor and the unit integral.
    DensityFunction(GridPtr grid, Eigen::VectorXd values);
    /// Rescales positive values to integrate to one under the grid quadrature.
    static DensityFunction normalized(GridPtr grid, Eigen::VectorXd values);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }

private:
    GridPtr grid_;
    Eigen::VectorXd values_;
};

/// Quadrature integral of f over the grid.
double integrate(const GridFunction& f);

/// Pointwise log(v / (1 - v)); OutOfDomain lists values outside (0,1).
GridFunction logit_curve(const GridFunction& f);

/// log X - mean of log X over the support; the result has quadrature integral zero.
GridFunction clr_transform(const DensityFunction& x);

/// exp(f) normalized to a density. f must integrate to zero within 1e-6.
DensityFunction inverse_clr(const GridFunction& f);

}  // namespace fmfpca
