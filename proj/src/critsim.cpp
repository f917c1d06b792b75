#include "fmfpca/critsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Dense>

#include "fmfpca/error.hpp"

namespace fmfpca {

namespace {

constexpr double kLevelTol = 1e-9;
constexpr std::size_t kMaxGramRetries = 1000;

bool same_key(const CvEntry& a, DeterministicMode mode, std::size_t dim_w, std::size_t dim_b, double level) {
    return a.mode == mode && a.dim_w == dim_w && a.dim_b == dim_b && std::abs(a.level - level) < kLevelTol;
}

// Rows 0..n are the path at r = i/n.
Eigen::MatrixXd brownian_path(std::size_t dim, std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::MatrixXd path(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < path.cols(); ++j) {
        path(0, j) = 0.0;
        for (Eigen::Index i = 1; i < path.rows(); ++i) path(i, j) = path(i - 1, j) + normal(rng);
    }
    return path;
}

Eigen::RowVectorXd riemann_integral(const Eigen::MatrixXd& path) {
    const auto n = path.rows() - 1;
    return path.bottomRows(n).colwise().sum() / static_cast<double>(n);
}

Eigen::RowVectorXd riemann_first_moment(const Eigen::MatrixXd& path) {
    const auto n = path.rows() - 1;
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(path.cols());
    for (Eigen::Index i = 1; i <= n; ++i) acc += (static_cast<double>(i) / static_cast<double>(n)) * path.row(i);
    return acc / static_cast<double>(n);
}

Eigen::MatrixXd transform_w(const Eigen::MatrixXd& w, DeterministicMode mode) {
    if (mode == DeterministicMode::None) return w;
    const auto n = w.rows() - 1;
    const Eigen::RowVectorXd end = w.row(n);
    Eigen::MatrixXd out = w;
    if (mode == DeterministicMode::Constant) {
        for (Eigen::Index i = 0; i <= n; ++i) out.row(i) -= (static_cast<double>(i) / static_cast<double>(n)) * end;
        return out;
    }
    const Eigen::RowVectorXd iw = riemann_integral(w);
    for (Eigen::Index i = 0; i <= n; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(n);
        out.row(i) += (2.0 * r - 3.0 * r * r) * end + (6.0 * r * r - 6.0 * r) * iw;
    }
    return out;
}

Eigen::MatrixXd transform_b(const Eigen::MatrixXd& b, DeterministicMode mode) {
    if (mode == DeterministicMode::None) return b;
    const auto n = b.rows() - 1;
    const Eigen::RowVectorXd ib = riemann_integral(b);
    Eigen::MatrixXd out = b;
    if (mode == DeterministicMode::Constant) {
        out.rowwise() -= ib;
        return out;
    }
    const Eigen::RowVectorXd isb = riemann_first_moment(b);
    for (Eigen::Index i = 0; i <= n; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(n);
        out.row(i) += (6.0 * r - 4.0) * ib + (6.0 - 12.0 * r) * isb;
    }
    return out;
}

}  // namespace

void CriticalValueTable::insert(const CvEntry& entry) {
    if (!(entry.level > 0.0 && entry.level < 1.0)) fail(ErrorKind::InvalidArgument, "level must lie in (0,1)");
    if (entry.dim_w < 1) fail(ErrorKind::InvalidArgument, "dim_w must be at least 1");
    for (auto& e : entries_) {
        if (same_key(e, entry.mode, entry.dim_w, entry.dim_b, entry.level)) {
            e = entry;
            return;
        }
    }
    entries_.push_back(entry);
}

void CriticalValueTable::merge(const CriticalValueTable& other) {
    for (const auto& e : other.entries_) insert(e);
    gram_retries += other.gram_retries;
}

std::optional<double> CriticalValueTable::find(DeterministicMode mode, std::size_t dim_w, std::size_t dim_b,
                                               double level) const {
    for (const auto& e : entries_)
        if (same_key(e, mode, dim_w, dim_b, level)) return e.quantile;
    return std::nullopt;
}

std::map<double, double> CriticalValueTable::levels_for(DeterministicMode mode, std::size_t dim_w,
                                                        std::size_t dim_b) const {
    std::map<double, double> out;
    for (const auto& e : entries_)
        if (e.mode == mode && e.dim_w == dim_w && e.dim_b == dim_b) out[e.level] = e.quantile;
    return out;
}

void CriticalValueTable::write_csv(std::ostream& os) const {
    os << "mode,dim_w,dim_b,level,quantile,reps,ngrid,seed\n";
    for (const auto& e : entries_) {
        os << to_string(e.mode) << ',' << e.dim_w << ',' << e.dim_b << ',' << std::setprecision(12) << e.level
           << ',' << std::setprecision(17) << e.quantile << ','
           << e.provenance.reps << ',' << e.provenance.ngrid << ',' << e.provenance.seed << '\n';
    }
}

void CriticalValueTable::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    write_csv(os);
    if (!os) fail(ErrorKind::IoError, "failed writing '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <class T>
T parse_field(const std::string& s, const char* name, std::size_t line_no) {
    if (s.empty())
        fail(ErrorKind::MissingCriticalValues,
             std::string("critical-value table line ") + std::to_string(line_no) + ": missing field '" + name + "'");
    std::istringstream ss(s);
    T v{};
    ss >> v;
    if (ss.fail() || !ss.eof())
        fail(ErrorKind::IoError, std::string("critical-value table line ") + std::to_string(line_no) +
                                     ": cannot parse field '" + name + "' from '" + s + "'");
    return v;
}

}  // namespace

CriticalValueTable CriticalValueTable::read_csv(std::istream& is) {
    static const std::vector<std::string> header = {"mode", "dim_w", "dim_b", "level",
                                                    "quantile", "reps", "ngrid", "seed"};
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) fail(ErrorKind::EmptyFile, "critical-value table is empty");
    ++line_no;
    if (split_csv_line(line) != header)
        fail(ErrorKind::MissingCriticalValues, "critical-value table header must be mode,dim_w,dim_b,level,quantile,reps,ngrid,seed");
    CriticalValueTable table;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            fail(ErrorKind::MissingCriticalValues,
                 "critical-value table line " + std::to_string(line_no) + ": expected 8 fields");
        CvEntry e;
        e.mode = parse_mode(cells[0]);
        e.dim_w = parse_field<std::size_t>(cells[1], "dim_w", line_no);
        e.dim_b = parse_field<std::size_t>(cells[2], "dim_b", line_no);
        e.level = parse_field<double>(cells[3], "level", line_no);
        e.quantile = parse_field<double>(cells[4], "quantile", line_no);
        e.provenance.reps = parse_field<std::size_t>(cells[5], "reps", line_no);
        e.provenance.ngrid = parse_field<std::size_t>(cells[6], "ngrid", line_no);
        e.provenance.seed = parse_field<std::uint64_t>(cells[7], "seed", line_no);
        if (e.provenance.reps == 0 || e.provenance.ngrid == 0)
            fail(ErrorKind::MissingCriticalValues,
                 "critical-value table line " + std::to_string(line_no) + ": provenance must be positive");
        table.insert(e);
    }
    return table;
}

CriticalValueTable CriticalValueTable::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::MissingCriticalValues, "cannot open critical-value table '" + path + "'");
    return read_csv(is);
}

double simulate_limit_draw(std::size_t dim_w, std::size_t dim_b, DeterministicMode mode, std::size_t ngrid, Rng& rng) {
    if (dim_w < 1) fail(ErrorKind::InvalidArgument, "dim_w must be at least 1");
    if (ngrid < kMinGrid) fail(ErrorKind::InvalidArgument, "ngrid must be at least 100");
    const auto n = static_cast<Eigen::Index>(ngrid);
    const double dn = static_cast<double>(ngrid);

    const Eigen::MatrixXd w = brownian_path(dim_w, ngrid, rng);
    Eigen::MatrixXd v = transform_w(w, mode);

    if (dim_b > 0) {
        const Eigen::MatrixXd bt = transform_b(brownian_path(dim_b, ngrid, rng), mode);
        const Eigen::MatrixXd dw = w.bottomRows(n) - w.topRows(n);
        // left point: sum_i dW_i B(s_{i-1})'
        const Eigen::MatrixXd stoch = dw.transpose() * bt.topRows(n);
        const Eigen::MatrixXd gram = bt.bottomRows(n).transpose() * bt.bottomRows(n) / dn;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const double hi = es.eigenvalues().maxCoeff();
        const double lo = es.eigenvalues().minCoeff();
        if (!(hi > 0.0) || !(lo > 1e-10 * hi)) fail(ErrorKind::GramSingular, "Gram matrix of B is singular");
        const Eigen::MatrixXd coef =
            stoch * es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
        Eigen::RowVectorXd cum = Eigen::RowVectorXd::Zero(bt.cols());
        for (Eigen::Index i = 1; i <= n; ++i) {
            cum += bt.row(i) / dn;
            v.row(i) -= cum * coef.transpose();
        }
    }
    return v.bottomRows(n).squaredNorm() / dn;
}

double empirical_quantile(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) fail(ErrorKind::InvalidArgument, "quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) fail(ErrorKind::InvalidArgument, "probability must lie in [0,1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> simulate_limit_draws(std::size_t dim_w, std::size_t dim_b, DeterministicMode mode,
                                         const CvSimulationOptions& options, std::size_t* gram_retries) {
    if (options.reps < 1) fail(ErrorKind::InvalidArgument, "reps must be positive");
    if (options.ngrid < kMinGrid) fail(ErrorKind::InvalidArgument, "ngrid must be at least 100");
    std::vector<double> draws(options.reps);
    std::vector<std::size_t> retries(options.reps, 0);
    parallel_for(options.reps, options.threads, [&](std::size_t i) {
        Rng rng = make_stream(options.seed, i);
        for (;;) {
            try {
                draws[i] = simulate_limit_draw(dim_w, dim_b, mode, options.ngrid, rng);
                return;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::GramSingular || ++retries[i] > kMaxGramRetries) throw;
            }
        }
    });
    if (gram_retries) {
        for (auto r : retries) *gram_retries += r;
    }
    return draws;
}

CriticalValueTable critical_values(const std::vector<std::pair<std::size_t, std::size_t>>& dims,
                                   DeterministicMode mode, const std::vector<double>& levels,
                                   const CvSimulationOptions& options) {
    if (dims.empty()) fail(ErrorKind::InvalidArgument, "no dimensions requested");
    if (levels.empty()) fail(ErrorKind::InvalidArgument, "no levels requested");
    for (double l : levels)
        if (!(l > 0.0 && l < 1.0)) fail(ErrorKind::InvalidArgument, "levels must lie in (0,1)");
    CriticalValueTable table;
    const CvProvenance prov{options.reps, options.ngrid, options.seed};
    for (const auto& [dw, db] : dims) {
        auto draws = simulate_limit_draws(dw, db, mode, options, &table.gram_retries);
        std::sort(draws.begin(), draws.end());
        for (double l : levels) table.insert(CvEntry{mode, dw, db, l, empirical_quantile(draws, l), prov});
    }
    return table;
}

}  // namespace fmfpca
