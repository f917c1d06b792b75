#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fmfpca/fpca.hpp"
#include "fmfpca/hilbert.hpp"

namespace fmfpca::cli {

/// Parsed wide-layout file: grid abscissae plus one row per observation.
struct WideTable {
    std::vector<double> grid;
    Eigen::MatrixXd rows;
};

/**
 * Reads the wide layout: the first non-blank line holds the grid abscissae,
 * every further line one curve. Cells are separated by commas or whitespace;
 * lines starting with '#' are skipped. RaggedRows reports the 1-based line
 * number of the offending row.
 */
WideTable read_wide(std::istream& is);
WideTable read_wide_file(const std::string& path);

FunctionalSeries load_series(const std::string& path);
FunctionalSeries series_from_stream(std::istream& is);

/// Curves on the grid of `grid`; NonMonotoneGrid or GridMismatch if the header differs.
std::vector<GridFunction> load_curves(const std::string& path, const GridPtr& grid);

void write_wide(std::ostream& os, const std::vector<double>& grid, const Eigen::MatrixXd& rows);

}  // namespace fmfpca::cli
