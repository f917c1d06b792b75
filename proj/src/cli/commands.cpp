#include "fmfpca/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fmfpca/cli/series_io.hpp"
#include "fmfpca/cointtest.hpp"
#include "fmfpca/critsim.hpp"
#include "fmfpca/dgp.hpp"
#include "fmfpca/error.hpp"
#include "fmfpca/modified.hpp"
#include "fmfpca/transforms.hpp"

namespace fmfpca::cli {

using json = nlohmann::ordered_json;

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string level_key(double level) {
    std::ostringstream os;
    os << std::setprecision(6) << level;
    return os.str();
}

std::string stars(const TestOutcome& t) {
    auto at = [&](double alpha) {
        for (const auto& [l, r] : t.reject)
            if (std::abs(l - (1.0 - alpha)) < 1e-9) return r;
        return false;
    };
    if (at(0.01)) return "**";
    if (at(0.05)) return "*";
    return "";
}

json outcome_json(const TestOutcome& t) {
    json cv = json::object();
    json rej = json::object();
    for (const auto& [l, v] : t.critical_values) cv[level_key(l)] = v;
    for (const auto& [l, r] : t.reject) rej[level_key(l)] = r;
    return json{{"phi0", t.phi0}, {"K", t.K},      {"statistic", t.statistic},
                {"critical_values", cv}, {"reject", rej}, {"stars", stars(t)}};
}

// Critical values from the cache, topped up by simulation when allowed.
class CvSource {
public:
    explicit CvSource(const RunConfig& cfg) : cfg_(cfg) {
        if (!cfg.cv_cache.empty() && std::filesystem::exists(cfg.cv_cache)) table_ = CriticalValueTable::load(cfg.cv_cache);
    }

    void ensure(DeterministicMode mode, std::size_t dim_w, std::size_t dim_b) {
        const double level = 1.0 - cfg_.alpha;
        if (table_.find(mode, dim_w, dim_b, level)) return;
        if (!cfg_.simulate_cv) {
            fail(ErrorKind::MissingCriticalValues,
                 "no critical value for mode " + std::string(to_string(mode)) + ", dim_w " + std::to_string(dim_w) +
                     ", dim_b " + std::to_string(dim_b) + ", level " + level_key(level) +
                     "; supply --cv-cache or pass --simulate-cv");
        }
        auto levels = cfg_.levels;
        if (std::none_of(levels.begin(), levels.end(), [&](double l) { return std::abs(l - level) < 1e-9; }))
            levels.push_back(level);
        std::sort(levels.begin(), levels.end());
        CvSimulationOptions opts{cfg_.reps, cfg_.ngrid, cfg_.seed, cfg_.threads};
        table_.merge(critical_values({{dim_w, dim_b}}, mode, levels, opts));
        dirty_ = true;
    }

    void persist() const {
        if (dirty_ && !cfg_.cv_cache.empty()) table_.save(cfg_.cv_cache);
    }

    [[nodiscard]] const CriticalValueTable& table() const { return table_; }

    [[nodiscard]] json provenance(DeterministicMode mode, std::size_t dim_w, std::size_t dim_b) const {
        for (const auto& e : table_.entries())
            if (e.mode == mode && e.dim_w == dim_w && e.dim_b == dim_b)
                return json{{"reps", e.provenance.reps}, {"ngrid", e.provenance.ngrid}, {"seed", e.provenance.seed}};
        return nullptr;
    }

private:
    const RunConfig& cfg_;
    CriticalValueTable table_;
    bool dirty_ = false;
};

json report_header(const RunConfig& cfg, const FunctionalSeries& x, double h) {
    return json{{"command", cfg.command},
                {"timestamp", timestamp()},
                {"input", cfg.input},
                {"T", x.length()},
                {"p", x.dim()},
                {"mode", to_string(cfg.mode_value)},
                {"kernel", to_string(cfg.kernel_value.family)},
                {"bandwidth", {{"rule", cfg.bandwidth.label()}, {"value", h}}},
                {"k_policy", cfg.k_policy},
                {"alpha", cfg.alpha}};
}

void write_outcomes_csv(std::ostream& out, const std::vector<TestOutcome>& rows) {
    std::vector<double> levels;
    for (const auto& r : rows)
        for (const auto& [l, v] : r.critical_values)
            if (std::none_of(levels.begin(), levels.end(), [&](double x) { return std::abs(x - l) < 1e-9; }))
                levels.push_back(l);
    std::sort(levels.begin(), levels.end());
    out << "phi0,K,statistic";
    for (double l : levels) out << ",cv_" << level_key(l);
    out << ",stars\n";
    out << std::setprecision(10);
    for (const auto& r : rows) {
        out << r.phi0 << ',' << r.K << ',' << r.statistic;
        for (double l : levels) {
            out << ',';
            for (const auto& [lv, v] : r.critical_values)
                if (std::abs(lv - l) < 1e-9) out << v;
        }
        out << ',' << stars(r) << '\n';
    }
}

std::vector<GridFunction> load_subspace(const RunConfig& cfg, const FunctionalSeries& x) {
    auto raw = load_curves(cfg.m_file, x.grid());
    return orthonormalize(raw, 1e6);
}

void emit_single_test(const RunConfig& cfg, const FunctionalSeries& x, double h, const TestOutcome& t,
                      const CvSource& cv, std::ostream& out, json extra) {
    if (cfg.resolved_format == "csv") {
        write_outcomes_csv(out, {t});
        return;
    }
    json rep = report_header(cfg, x, h);
    for (auto& [k, v] : extra.items()) rep[k] = v;
    rep["tests"] = json::array({outcome_json(t)});
    rep["reject"] = t.rejects_at(cfg.alpha);
    rep["critical_value_provenance"] = cv.provenance(t.mode, t.K - t.phi0, t.phi0);
    out << rep.dump(2) << '\n';
}

}  // namespace

void cmd_test_dim(const RunConfig& cfg, std::ostream& out) {
    const auto x = load_series(cfg.input);
    const double h = cfg.bandwidth.resolve(x.length());
    CvSource cv(cfg);
    std::vector<TestOutcome> rows;
    json rep = report_header(cfg, x, h);
    if (cfg.phi) {
        const std::size_t phi0 = *cfg.phi;
        cv.ensure(cfg.mode_value, cfg.k_policy, phi0);
        rows.push_back(dimension_test(x, phi0, phi0 + cfg.k_policy, cfg.kernel_value, h, cfg.mode_value, cv.table()));
        rep["reject"] = rows.back().rejects_at(cfg.alpha);
    } else {
        const std::size_t cap = cfg.phi0_max ? *cfg.phi0_max : default_phi_cap(x.dim(), x.length(), cfg.k_policy);
        auto res = sequential_dimension(x, cfg.alpha, cfg.k_policy, cfg.kernel_value, h, cfg.mode_value, cv.table(),
                                        cap, [&](DeterministicMode m, std::size_t dw, std::size_t db) { cv.ensure(m, dw, db); });
        rows = res.trajectory;
        rep["phi_cap"] = cap;
        rep["phi_hat"] = res.phi_hat;
        rep["hit_cap"] = res.hit_cap;
    }
    cv.persist();
    if (cfg.resolved_format == "csv") {
        write_outcomes_csv(out, rows);
        return;
    }
    json tests = json::array();
    json prov = json::array();
    for (const auto& r : rows) {
        tests.push_back(outcome_json(r));
        prov.push_back(cv.provenance(r.mode, r.K - r.phi0, r.phi0));
    }
    rep["tests"] = tests;
    rep["critical_value_provenance"] = prov;
    out << rep.dump(2) << '\n';
}

void cmd_test_subspace_in(const RunConfig& cfg, std::ostream& out) {
    const auto x = load_series(cfg.input);
    const double h = cfg.bandwidth.resolve(x.length());
    const auto m = load_subspace(cfg, x);
    if (m.size() > *cfg.phi)
        fail(ErrorKind::DimMismatch, "dim(M) = " + std::to_string(m.size()) + " exceeds phi = " + std::to_string(*cfg.phi));
    const std::size_t phi0 = *cfg.phi - m.size();
    CvSource cv(cfg);
    cv.ensure(cfg.mode_value, cfg.k_policy, phi0);
    const auto t = subspace_in_attractor_test(x, m, *cfg.phi, phi0 + cfg.k_policy, cfg.kernel_value, h,
                                              cfg.mode_value, cv.table());
    cv.persist();
    emit_single_test(cfg, x, h, t, cv, out, json{{"phi", *cfg.phi}, {"dim_M", m.size()}});
}

void cmd_test_subspace_contains(const RunConfig& cfg, std::ostream& out) {
    const auto x = load_series(cfg.input);
    const double h = cfg.bandwidth.resolve(x.length());
    const auto m = load_subspace(cfg, x);
    CvSource cv(cfg);
    cv.ensure(cfg.mode_value, cfg.k_policy, 0);
    const auto t = attractor_in_subspace_test(x, m, cfg.k_policy, cfg.kernel_value, h, cfg.mode_value, cv.table());
    cv.persist();
    emit_single_test(cfg, x, h, t, cv, out, json{{"dim_M", m.size()}});
}

void cmd_estimate(const RunConfig& cfg, std::ostream& out) {
    const auto x = load_series(cfg.input);
    const double h = cfg.bandwidth.resolve(x.length());
    const std::size_t phi = *cfg.phi;
    EigenSystem spectrum;
    std::vector<double> prelim;
    if (cfg.method == "ordinary") {
        auto fp = ordinary_fpca(x, phi, cfg.mode_value);
        spectrum = std::move(fp.spectrum);
    } else {
        auto est = cfg.method == "fm" ? modified_fpca(x, phi, cfg.kernel_value, h, cfg.mode_value)
                                      : harris_fpca(x, phi, cfg.kernel_value, h, cfg.mode_value);
        spectrum = std::move(est.spectrum);
        const auto& ev = est.preliminary.spectrum.eigenvalues;
        prelim.assign(ev.data(), ev.data() + std::min<Eigen::Index>(ev.size(), 10));
    }
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(phi), static_cast<Eigen::Index>(x.dim()));
    for (std::size_t j = 0; j < phi; ++j) basis.row(static_cast<Eigen::Index>(j)) = spectrum.eigenfunction(j).values().transpose();
    if (cfg.resolved_format == "csv") {
        write_wide(out, x.grid()->points(), basis);
        return;
    }
    json rep = report_header(cfg, x, h);
    rep["phi"] = phi;
    rep["method"] = cfg.method;
    const auto& ev = spectrum.eigenvalues;
    rep["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + std::min<Eigen::Index>(ev.size(), 10));
    if (!prelim.empty()) rep["preliminary_eigenvalues"] = prelim;
    rep["grid"] = x.grid()->points();
    json b = json::array();
    for (Eigen::Index j = 0; j < basis.rows(); ++j)
        b.push_back(std::vector<double>(basis.row(j).data(), basis.row(j).data() + basis.cols()));
    rep["attractor_basis"] = b;
    out << rep.dump(2) << '\n';
}

void cmd_simulate_cv(const RunConfig& cfg, std::ostream& out) {
    std::vector<std::pair<std::size_t, std::size_t>> dims;
    for (auto p0 : cfg.phi0) dims.emplace_back(cfg.k_policy, p0);
    CvSimulationOptions opts{cfg.reps, cfg.ngrid, cfg.seed, cfg.threads};
    const auto table = critical_values(dims, cfg.mode_value, cfg.levels, opts);
    if (!cfg.cv_cache.empty()) {
        CriticalValueTable merged;
        if (std::filesystem::exists(cfg.cv_cache)) merged = CriticalValueTable::load(cfg.cv_cache);
        merged.merge(table);
        merged.save(cfg.cv_cache);
    }
    if (cfg.resolved_format == "csv") {
        table.write_csv(out);
        return;
    }
    json entries = json::array();
    for (const auto& e : table.entries())
        entries.push_back(json{{"mode", to_string(e.mode)},
                               {"dim_w", e.dim_w},
                               {"dim_b", e.dim_b},
                               {"level", e.level},
                               {"quantile", e.quantile}});
    out << json{{"command", cfg.command},
                {"timestamp", timestamp()},
                {"reps", cfg.reps},
                {"ngrid", cfg.ngrid},
                {"seed", cfg.seed},
                {"gram_retries", table.gram_retries},
                {"entries", entries}}
               .dump(2)
        << '\n';
}

void cmd_montecarlo(const RunConfig& cfg, std::ostream& out) {
    CvSource cv(cfg);
    std::vector<std::string> rows;
    json results = json::array();
    for (auto T : cfg.T) {
        for (auto p0 : cfg.phi0) {
            DgpConfig dgp;
            dgp.phi = p0 + cfg.offset;
            dgp.T = T;
            dgp.grid_size = cfg.grid_size;
            dgp.beta_min = cfg.beta[0];
            dgp.beta_max = cfg.beta[1];
            dgp.deterministic = cfg.mode_value;
            dgp.innovation_correlation = cfg.innovation_correlation;
            dgp.bspline_smoothing = cfg.smooth;
            dgp.seed = cfg.seed;
            dgp.validate();
            cv.ensure(cfg.mode_value, cfg.k_policy, p0);
            const auto res = rejection_experiment(dgp, p0, cfg.k_policy, cfg.kernel_value, cfg.bandwidth, cfg.alpha,
                                                  cfg.n_reps, cv.table(), cfg.threads);
            rows.push_back(experiment_row(dgp, p0, cfg.bandwidth, cfg.alpha, res));
            results.push_back(json{{"phi", dgp.phi},
                                   {"phi0", p0},
                                   {"T", T},
                                   {"h_rule", cfg.bandwidth.label()},
                                   {"K", res.K},
                                   {"beta_min", dgp.beta_min},
                                   {"beta_max", dgp.beta_max},
                                   {"mode", to_string(dgp.deterministic)},
                                   {"alpha", cfg.alpha},
                                   {"n_reps", res.n_reps},
                                   {"reject_rate", res.reject_rate},
                                   {"seed", dgp.seed}});
        }
    }
    cv.persist();
    if (cfg.resolved_format == "csv") {
        out << experiment_row_header() << '\n';
        for (const auto& r : rows) out << r << '\n';
        return;
    }
    out << json{{"command", cfg.command}, {"timestamp", timestamp()}, {"results", results}}.dump(2) << '\n';
}

void cmd_transform(const RunConfig& cfg, std::ostream& out) {
    auto tab = read_wide_file(cfg.input);
    auto grid = Grid::trapezoid(tab.grid);
    Eigen::MatrixXd result(tab.rows.rows(), tab.rows.cols());
    for (Eigen::Index r = 0; r < tab.rows.rows(); ++r) {
        Eigen::VectorXd v = tab.rows.row(r).transpose();
        Eigen::VectorXd o;
        if (cfg.kind == "logit") {
            o = logit_curve(GridFunction(grid, std::move(v))).values();
        } else if (cfg.kind == "clr") {
            auto d = cfg.normalize ? DensityFunction::normalized(grid, std::move(v)) : DensityFunction(grid, std::move(v));
            o = clr_transform(d).values();
        } else {
            o = inverse_clr(GridFunction(grid, std::move(v))).values();
        }
        result.row(r) = o.transpose();
    }
    if (cfg.resolved_format == "csv") {
        write_wide(out, tab.grid, result);
        return;
    }
    json rows = json::array();
    for (Eigen::Index r = 0; r < result.rows(); ++r)
        rows.push_back(std::vector<double>(result.row(r).data(), result.row(r).data() + result.cols()));
    out << json{{"command", cfg.command}, {"timestamp", timestamp()}, {"kind", cfg.kind}, {"grid", tab.grid}, {"rows", rows}}
               .dump(2)
        << '\n';
}

namespace {

void write_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

void dispatch(const RunConfig& cfg, std::ostream& out) {
    if (cfg.command == "test-dim") return cmd_test_dim(cfg, out);
    if (cfg.command == "test-subspace-in") return cmd_test_subspace_in(cfg, out);
    if (cfg.command == "test-subspace-contains") return cmd_test_subspace_contains(cfg, out);
    if (cfg.command == "estimate") return cmd_estimate(cfg, out);
    if (cfg.command == "simulate-cv") return cmd_simulate_cv(cfg, out);
    if (cfg.command == "montecarlo") return cmd_montecarlo(cfg, out);
    if (cfg.command == "transform") return cmd_transform(cfg, out);
    fail(ErrorKind::ConfigError, "unknown command '" + cfg.command + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Dimension tests and fully modified FPCA for cointegrated functional time series", "fmfpca"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "Flat key = value file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    app.add_option("--input", cfg.input, "Wide-layout data file: grid row, then one row per curve");
    app.add_option("--out", cfg.out, "Output path (default stdout)");
    app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"auto", "json", "csv"}));
    app.add_option("--mode", cfg.mode, "Deterministic terms: none, const, trend");
    app.add_option("--kernel", cfg.kernel, "parzen, bartlett or flat");
    app.add_option("--h", cfg.h, "Bandwidth: t13, t25 or a positive number");
    app.add_option("--k-policy", cfg.k_policy, "K = phi0 + k-policy");
    app.add_option("--alpha", cfg.alpha, "Significance level");
    app.add_option("--phi", cfg.phi, "Dimension (estimate, test-subspace-in) or single phi0 (test-dim)");
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    app.add_option("--cv-cache", cfg.cv_cache, "Critical-value table file");
    app.add_flag("--simulate-cv", cfg.simulate_cv, "Simulate missing critical values");
    app.add_option("--reps", cfg.reps, "Draws per critical-value key");
    app.add_option("--ngrid", cfg.ngrid, "Brownian grid steps");
    app.add_flag("--allow-small", cfg.allow_small, "Permit reps below the table floor");
    app.add_option("--levels", cfg.levels, "Quantile levels")->delimiter(',');
    app.add_option("--phi0-max", cfg.phi0_max, "Cap of the sequential search");
    app.add_option("--phi0", cfg.phi0, "phi0 values (simulate-cv, montecarlo)")->delimiter(',');
    app.add_option("--m-file", cfg.m_file, "Wide-layout file of curves spanning M");
    app.add_option("--method", cfg.method, "Estimator: fm, harris or ordinary");
    app.add_option("--T", cfg.T, "Sample lengths (montecarlo)")->delimiter(',');
    app.add_option("--offset", cfg.offset, "True phi = phi0 + offset (montecarlo)");
    app.add_option("--beta", cfg.beta, "beta_min,beta_max (montecarlo)")->delimiter(',');
    app.add_option("--n-reps", cfg.n_reps, "Monte Carlo replications");
    app.add_option("--grid-size", cfg.grid_size, "Simulation grid points");
    app.add_option("--rho", cfg.innovation_correlation, "Innovation correlation between trend and stationary scores");
    app.add_flag("--smooth", cfg.smooth, "Quadratic B-spline pre-smoothing of simulated curves");
    app.add_option("--kind", cfg.kind, "logit, clr or inverse-clr (transform)");
    app.add_flag("--normalize", cfg.normalize, "Rescale clr inputs to integrate to one");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"test-dim", "Sequential (or single) test of the attractor dimension"},
        {"test-subspace-in", "Test that span(M) lies in the attractor space"},
        {"test-subspace-contains", "Test that the attractor space lies in span(M)"},
        {"estimate", "Estimate the attractor space"},
        {"simulate-cv", "Simulate critical values"},
        {"montecarlo", "Rejection frequencies on the simulation design"},
        {"transform", "logit, clr or inverse-clr of curves"},
    };
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        sub->set_help_flag();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        write_error(err, "ConfigError", e.what());
        return 2;
    }
    try {
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.validate();
        if (cfg.out.empty()) {
            dispatch(cfg, out);
        } else {
            std::ostringstream buf;
            dispatch(cfg, buf);
            std::ofstream os(cfg.out);
            if (!os) fail(ErrorKind::IoError, "cannot open '" + cfg.out + "' for writing");
            os << buf.str();
            if (!os) fail(ErrorKind::IoError, "failed writing '" + cfg.out + "'");
        }
    } catch (const Error& e) {
        write_error(err, std::string(to_string(e.kind())), e.message());
        return e.kind() == ErrorKind::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        write_error(err, "InternalError", e.what());
        return 1;
    }
    return 0;
}

}  // namespace fmfpca::cli
