#include "fmfpca/cli/series_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string_view>

#include "fmfpca/error.hpp"

namespace fmfpca::cli {

namespace {

std::vector<double> parse_cells(const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == ';'; };
    while (i < n) {
        while (i < n && is_sep(line[i])) ++i;
        if (i >= n) break;
        std::size_t j = i;
        while (j < n && !is_sep(line[j])) ++j;
        double v = 0.0;
        const char* first = line.data() + i;
        const char* last = line.data() + j;
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last)
            fail(ErrorKind::IoError, "line " + std::to_string(line_no) + ": cannot parse '" + line.substr(i, j - i) + "'");
        out.push_back(v);
        i = j;
    }
    return out;
}

bool skippable(const std::string& line) {
    const auto b = line.find_first_not_of(" \t\r");
    return b == std::string::npos || line[b] == '#';
}

}  // namespace

WideTable read_wide(std::istream& is) {
    WideTable out;
    std::string line;
    std::size_t line_no = 0;
    bool have_grid = false;
    std::vector<std::vector<double>> data;
    while (std::getline(is, line)) {
        ++line_no;
        if (skippable(line)) continue;
        auto cells = parse_cells(line, line_no);
        if (!have_grid) {
            for (std::size_t k = 1; k < cells.size(); ++k) {
                if (!(cells[k] > cells[k - 1]))
                    fail(ErrorKind::NonMonotoneGrid, "line " + std::to_string(line_no) +
                                                         ": grid abscissae must be strictly increasing");
            }
            if (cells.size() < 2) fail(ErrorKind::NonMonotoneGrid, "grid needs at least two points");
            out.grid = std::move(cells);
            have_grid = true;
            continue;
        }
        if (cells.size() != out.grid.size())
            fail(ErrorKind::RaggedRows, "row=" + std::to_string(line_no) + ": expected " +
                                            std::to_string(out.grid.size()) + " values, got " +
                                            std::to_string(cells.size()));
        data.push_back(std::move(cells));
    }
    if (!have_grid) fail(ErrorKind::EmptyFile, "file has no grid row");
    if (data.empty()) fail(ErrorKind::EmptyFile, "file has no data rows");
    out.rows.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(out.grid.size()));
    for (std::size_t t = 0; t < data.size(); ++t)
        for (std::size_t j = 0; j < data[t].size(); ++j)
            out.rows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = data[t][j];
    return out;
}

WideTable read_wide_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::IoError, "cannot open '" + path + "'");
    return read_wide(is);
}

FunctionalSeries series_from_stream(std::istream& is) {
    auto tab = read_wide(is);
    return {Grid::trapezoid(std::move(tab.grid)), std::move(tab.rows)};
}

FunctionalSeries load_series(const std::string& path) {
    auto tab = read_wide_file(path);
    return {Grid::trapezoid(std::move(tab.grid)), std::move(tab.rows)};
}

std::vector<GridFunction> load_curves(const std::string& path, const GridPtr& grid) {
    auto tab = read_wide_file(path);
    if (tab.grid.size() != grid->size())
        fail(ErrorKind::GridMismatch, "curve file grid has " + std::to_string(tab.grid.size()) + " points, series has " +
                                          std::to_string(grid->size()));
    for (std::size_t i = 0; i < tab.grid.size(); ++i)
        if (std::abs(tab.grid[i] - grid->points()[i]) > 1e-12 * std::max(1.0, std::abs(tab.grid[i])))
            fail(ErrorKind::GridMismatch, "curve file grid differs from the series grid");
    std::vector<GridFunction> out;
    for (Eigen::Index r = 0; r < tab.rows.rows(); ++r) out.emplace_back(grid, tab.rows.row(r).transpose());
    return out;
}

void write_wide(std::ostream& os, const std::vector<double>& grid, const Eigen::MatrixXd& rows) {
    const auto old = os.precision(17);
    for (std::size_t j = 0; j < grid.size(); ++j) os << (j ? "," : "") << grid[j];
    os << '\n';
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? "," : "") << rows(r, j);
        os << '\n';
    }
    os.precision(old);
}

}  // namespace fmfpca::cli
