#include "fmfpca/dgp.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fmfpca/error.hpp"

namespace fmfpca {

void DgpConfig::validate() const {
    auto bad = [](const std::string& msg) { fail(ErrorKind::ConfigError, msg); };
    if (phi > 5) bad("phi must be at most 5");
    if (phi > n_fourier_pool_N) bad("phi exceeds the trend pool size");
    if (n_stationary > n_fourier_pool_S) bad("more stationary directions than the stationary pool holds");
    if (T < 4) bad("T must be at least 4");
    if (grid_size < 2) bad("grid_size must be at least 2");
    if (innovation_terms < n_fourier_pool_N + n_fourier_pool_S)
        bad("innovation_terms must cover both Fourier pools");
    if (!(beta_min > -1.0 && beta_max < 1.0 && beta_min <= beta_max)) bad("beta range must lie within (-1,1)");
    if (!(alpha_min > -1.0 && alpha_max < 1.0 && alpha_min <= alpha_max)) bad("alpha range must lie within (-1,1)");
    if (!(innovation_decay > 0.0 && innovation_decay < 1.0)) bad("innovation_decay must lie in (0,1)");
    if (!(innovation_correlation > -1.0 && innovation_correlation < 1.0))
        bad("innovation_correlation must lie in (-1,1)");
    if (bspline_smoothing && (n_bsplines < 3 || n_bsplines > grid_size)) bad("n_bsplines must lie in [3, grid_size]");
}

Eigen::MatrixXd fourier_basis(const Eigen::VectorXd& points, std::size_t n) {
    Eigen::MatrixXd f(points.size(), static_cast<Eigen::Index>(n));
    const double s2 = std::numbers::sqrt2;
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
        const auto idx = j + 1;  // f_idx
        const double k = static_cast<double>(idx / 2);
        for (Eigen::Index i = 0; i < points.size(); ++i) {
            const double arg = 2.0 * std::numbers::pi * k * points[i];
            if (idx == 1) f(i, j) = 1.0;
            else if (idx % 2 == 0) f(i, j) = s2 * std::sin(arg);
            else f(i, j) = s2 * std::cos(arg);
        }
    }
    return f;
}

double shifted_legendre(std::size_t degree, double u) {
    switch (degree) {
        case 0: return 1.0;
        case 1: return 2.0 * u - 1.0;
        case 2: return 6.0 * u * u - 6.0 * u + 1.0;
        case 3: return 20.0 * u * u * u - 30.0 * u * u + 12.0 * u - 1.0;
        default: break;
    }
    fail(ErrorKind::InvalidArgument, "shifted Legendre degree must be at most 3");
}

Eigen::MatrixXd bspline_basis(const Eigen::VectorXd& points, std::size_t n, double a, double b) {
    constexpr int degree = 2;
    if (n < degree + 1) fail(ErrorKind::InvalidArgument, "need at least 3 quadratic B-splines");
    if (!(b > a)) fail(ErrorKind::InvalidArgument, "B-spline interval must be nonempty");
    // clamped uniform knots
    const auto intervals = static_cast<Eigen::Index>(n) - degree;
    std::vector<double> knots;
    for (int i = 0; i < degree; ++i) knots.push_back(a);
    for (Eigen::Index i = 0; i <= intervals; ++i)
        knots.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(intervals));
    for (int i = 0; i < degree; ++i) knots.push_back(b);

    const auto m = static_cast<Eigen::Index>(knots.size()) - 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.size(), static_cast<Eigen::Index>(n));
    std::vector<double> nb(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < points.size(); ++r) {
        const double u = points[r];
        if (u < a || u > b) fail(ErrorKind::InvalidArgument, "point outside the B-spline interval");
        for (Eigen::Index i = 0; i < m; ++i) {
            const double lo = knots[static_cast<std::size_t>(i)];
            const double hi = knots[static_cast<std::size_t>(i) + 1];
            // the last nonempty span is closed on the right
            const bool in = (u >= lo && u < hi) || (u == b && hi == b && lo < hi);
            nb[static_cast<std::size_t>(i)] = in ? 1.0 : 0.0;
        }
        for (int d = 1; d <= degree; ++d) {
            for (Eigen::Index i = 0; i + d < m; ++i) {
                const auto k = static_cast<std::size_t>(i);
                const double l0 = knots[k], l1 = knots[k + d], r0 = knots[k + 1], r1 = knots[k + d + 1];
                double v = 0.0;
                if (l1 > l0) v += (u - l0) / (l1 - l0) * nb[k];
                if (r1 > r0) v += (r1 - u) / (r1 - r0) * nb[k + 1];
                nb[k] = v;
            }
        }
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(r, j) = nb[static_cast<std::size_t>(j)];
    }
    return out;
}

namespace {

std::vector<std::size_t> draw_without_replacement(std::size_t first, std::size_t pool, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(pool);
    std::iota(idx.begin(), idx.end(), first);
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    return idx;
}

Eigen::VectorXd random_legendre_curve(const Eigen::VectorXd& u, Rng& rng) {
    std::normal_distribution<double> normal;
    double th[4];
    for (double& t : th) t = normal(rng);
    const double scale = std::sqrt(th[0] * th[0] + th[1] * th[1] + th[2] * th[2] + th[3] * th[3]);
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        double v = 0.0;
        for (std::size_t d = 0; d < 4; ++d) v += th[d] * shifted_legendre(d, u[i]);
        out[i] = v / scale;
    }
    return out;
}

}  // namespace

DgpPath generate_path(const DgpConfig& cfg, Rng& rng) {
    cfg.validate();
    const auto grid = Grid::uniform(cfg.grid_size);
    const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(grid->points().data(), grid->points().size());
    const auto nterms = static_cast<Eigen::Index>(cfg.innovation_terms);
    const Eigen::MatrixXd basis = fourier_basis(u, cfg.innovation_terms);

    const auto n_idx = draw_without_replacement(0, cfg.n_fourier_pool_N, cfg.phi, rng);
    const auto s_idx = draw_without_replacement(cfg.n_fourier_pool_N, cfg.n_fourier_pool_S, cfg.n_stationary, rng);
    std::uniform_real_distribution<double> alpha_dist(cfg.alpha_min, cfg.alpha_max);
    std::uniform_real_distribution<double> beta_dist(cfg.beta_min, cfg.beta_max);

    Eigen::VectorXd ar = Eigen::VectorXd::Zero(nterms);
    std::vector<bool> is_trend(cfg.innovation_terms, false);
    for (auto j : n_idx) {
        ar[static_cast<Eigen::Index>(j)] = alpha_dist(rng);
        is_trend[j] = true;
    }
    for (auto j : s_idx) ar[static_cast<Eigen::Index>(j)] = beta_dist(rng);

    Eigen::VectorXd decay(nterms);
    for (Eigen::Index j = 0; j < nterms; ++j) decay[j] = std::pow(cfg.innovation_decay, static_cast<double>(j));

    const double rho = cfg.innovation_correlation;
    const double rho_c = std::sqrt(1.0 - rho * rho);
    const std::size_t n_pairs = std::min(n_idx.size(), s_idx.size());

    std::normal_distribution<double> normal;
    const auto T = static_cast<Eigen::Index>(cfg.T);
    Eigen::MatrixXd coef(T, nterms);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(nterms);
    Eigen::VectorXd theta(nterms);
    Eigen::VectorXd level = Eigen::VectorXd::Zero(nterms);
    const auto total = static_cast<Eigen::Index>(cfg.burn_in) + T;
    for (Eigen::Index step = 0; step < total; ++step) {
        for (Eigen::Index j = 0; j < nterms; ++j) theta[j] = normal(rng);
        if (rho != 0.0) {
            for (std::size_t k = 0; k < n_pairs; ++k) {
                const auto jn = static_cast<Eigen::Index>(n_idx[k]);
                const auto js = static_cast<Eigen::Index>(s_idx[k]);
                theta[js] = rho * theta[jn] + rho_c * theta[js];
            }
        }
        e = ar.cwiseProduct(e) + theta.cwiseProduct(decay);
        const Eigen::Index t = step - static_cast<Eigen::Index>(cfg.burn_in);
        if (t < 0) continue;
        for (Eigen::Index j = 0; j < nterms; ++j) {
            if (is_trend[static_cast<std::size_t>(j)]) {
                level[j] += e[j];
                coef(t, j) = level[j];
            } else {
                coef(t, j) = e[j];
            }
        }
    }

    Eigen::MatrixXd values = coef * basis.transpose();
    if (cfg.deterministic != DeterministicMode::None) {
        const Eigen::VectorXd mu1 = random_legendre_curve(u, rng);
        values.rowwise() += mu1.transpose();
        if (cfg.deterministic == DeterministicMode::LinearTrend) {
            const Eigen::VectorXd mu2 = random_legendre_curve(u, rng);
            for (Eigen::Index t = 0; t < T; ++t) values.row(t) += static_cast<double>(t + 1) * mu2.transpose();
        }
    }
    if (cfg.bspline_smoothing) {
        const Eigen::MatrixXd b = bspline_basis(u, cfg.n_bsplines);
        // least-squares fit evaluated on the grid: rows become rows * H'
        const Eigen::MatrixXd fit = (b.transpose() * b).ldlt().solve(b.transpose());
        values = (values * fit.transpose()) * b.transpose();
    }

    std::vector<GridFunction> trend, stationary;
    for (auto j : n_idx) trend.emplace_back(grid, basis.col(static_cast<Eigen::Index>(j)));
    for (auto j : s_idx) stationary.emplace_back(grid, basis.col(static_cast<Eigen::Index>(j)));
    auto proj = projection_from(grid, trend);
    return DgpPath{FunctionalSeries(grid, std::move(values)), std::move(proj), std::move(trend),
                   std::move(stationary)};
}

ExperimentResult rejection_experiment(const DgpConfig& cfg, std::size_t phi0, std::size_t k_policy,
                                      const KernelSpec& spec, const Bandwidth& h, double alpha, std::size_t n_reps,
                                      const CriticalValueTable& cvt, std::size_t threads) {
    cfg.validate();
    if (n_reps < 1) fail(ErrorKind::InvalidArgument, "n_reps must be positive");
    if (k_policy < 1) fail(ErrorKind::KOutOfRange, "K policy must be at least 1");
    const std::size_t K = phi0 + k_policy;
    const double level = 1.0 - alpha;
    if (!cvt.find(cfg.deterministic, K - phi0, phi0, level))
        fail(ErrorKind::MissingCriticalValues, "no critical value for the experiment's key at level " +
                                                   std::to_string(level));
    const double hv = h.resolve(cfg.T);
    std::vector<unsigned char> rejected(n_reps, 0);
    replicate(n_reps, cfg.seed, threads, [&](std::size_t rep, Rng& rng) {
        const auto path = generate_path(cfg, rng);
        const auto out = dimension_test(path.series, phi0, K, spec, hv, cfg.deterministic, cvt);
        rejected[rep] = out.rejects_at(alpha) ? 1 : 0;
    });
    ExperimentResult res;
    res.n_reps = n_reps;
    res.K = K;
    res.rejections = static_cast<std::size_t>(std::accumulate(rejected.begin(), rejected.end(), 0));
    res.reject_rate = static_cast<double>(res.rejections) / static_cast<double>(n_reps);
    return res;
}

std::string experiment_row_header() { return "phi,phi0,T,h_rule,K,beta_min,beta_max,mode,alpha,n_reps,reject_rate,seed"; }

std::string experiment_row(const DgpConfig& cfg, std::size_t phi0, const Bandwidth& h, double alpha,
                           const ExperimentResult& res) {
    std::ostringstream os;
    os << cfg.phi << ',' << phi0 << ',' << cfg.T << ',' << h.label() << ',' << res.K << ',' << cfg.beta_min << ','
       << cfg.beta_max << ',' << to_string(cfg.deterministic) << ',' << alpha << ',' << res.n_reps << ','
       << res.reject_rate << ',' << cfg.seed;
    return os.str();
}

}  // namespace fmfpca
