#include <cmath>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmfpca/cointtest.hpp"
#include "fmfpca/critsim.hpp"
#include "fmfpca/dgp.hpp"
#include "fmfpca/error.hpp"
#include "fmfpca/fpca.hpp"
#include "fmfpca/lrcov.hpp"
#include "fmfpca/modified.hpp"
#include "fmfpca/transforms.hpp"

namespace py = pybind11;
using namespace fmfpca;

namespace {

GridPtr make_grid(const std::vector<double>& points) { return Grid::trapezoid(points); }

FunctionalSeries make_series(const std::vector<double>& points, const Eigen::MatrixXd& values) {
    return FunctionalSeries(make_grid(points), values);
}

double resolve_h(const py::object& h, std::size_t T) {
    if (py::isinstance<py::str>(h)) return Bandwidth::parse(h.cast<std::string>()).resolve(T);
    return Bandwidth::fixed(h.cast<double>()).resolve(T);
}

// Eigenfunctions as grid values, one column each.
Eigen::MatrixXd basis_values(const EigenSystem& es, std::size_t count) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(es.grid->size()), static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) out.col(static_cast<Eigen::Index>(j)) = es.eigenfunction(j).values();
    return out;
}

py::dict outcome_dict(const TestOutcome& o) {
    py::dict d;
    d["statistic"] = o.statistic;
    d["K"] = o.K;
    d["phi0"] = o.phi0;
    d["mode"] = std::string(to_string(o.mode));
    d["critical_values"] = o.critical_values;
    d["reject"] = o.reject;
    d["projected_series"] = o.projected_series;
    return d;
}

std::vector<GridFunction> curves(const GridPtr& g, const Eigen::MatrixXd& m) {
    std::vector<GridFunction> out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(g, m.col(j));
    return orthonormalize(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fully modified FPCA and dimension tests for cointegrated functional time series";

    static py::exception<Error> error_type(m, "FmfpcaError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetObject(error_type.ptr(),
                            py::make_tuple(std::string(to_string(e.kind())), e.message()).ptr());
        }
    });

    py::class_<CriticalValueTable>(m, "CriticalValueTable")
        .def(py::init<>())
        .def_static("load", &CriticalValueTable::load, py::arg("path"))
        .def("save", &CriticalValueTable::save, py::arg("path"))
        .def("merge", &CriticalValueTable::merge)
        .def(
            "find",
            [](const CriticalValueTable& t, const std::string& mode, std::size_t dim_w, std::size_t dim_b,
               double level) { return t.find(parse_mode(mode), dim_w, dim_b, level); },
            py::arg("mode"), py::arg("dim_w"), py::arg("dim_b"), py::arg("level"))
        .def("entries",
             [](const CriticalValueTable& t) {
                 py::list out;
                 for (const auto& e : t.entries())
                     out.append(py::make_tuple(std::string(to_string(e.mode)), e.dim_w, e.dim_b, e.level, e.quantile,
                                               e.provenance.reps, e.provenance.ngrid, e.provenance.seed));
                 return out;
             })
        .def_readonly("gram_retries", &CriticalValueTable::gram_retries)
        .def("__len__", [](const CriticalValueTable& t) { return t.entries().size(); });

    m.def(
        "critical_values",
        [](const std::vector<std::pair<std::size_t, std::size_t>>& dims, const std::string& mode,
           const std::vector<double>& levels, std::size_t reps, std::size_t ngrid, std::uint64_t seed,
           std::size_t threads) {
            py::gil_scoped_release release;
            return critical_values(dims, parse_mode(mode), levels, {reps, ngrid, seed, threads});
        },
        py::arg("dims"), py::arg("mode") = "none", py::arg("levels") = std::vector<double>{0.90, 0.95, 0.99},
        py::arg("reps") = 100000, py::arg("ngrid") = 2000, py::arg("seed") = 0, py::arg("threads") = 0);

    m.def(
        "simulate_limit_draws",
        [](std::size_t dim_w, std::size_t dim_b, const std::string& mode, std::size_t reps, std::size_t ngrid,
           std::uint64_t seed) {
            py::gil_scoped_release release;
            const auto v = simulate_limit_draws(dim_w, dim_b, parse_mode(mode), {reps, ngrid, seed, 0});
            return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        },
        py::arg("dim_w"), py::arg("dim_b"), py::arg("mode") = "none", py::arg("reps") = 10000,
        py::arg("ngrid") = 1000, py::arg("seed") = 0);

    m.def(
        "kpss_core",
        [](const Eigen::MatrixXd& z, const std::string& kernel, double h) {
            return kpss_core(z, {parse_kernel(kernel), 1.0}, h);
        },
        py::arg("z"), py::arg("kernel") = "parzen", py::arg("h"));

    m.def(
        "ordinary_fpca",
        [](const std::vector<double>& points, const Eigen::MatrixXd& values, std::size_t phi, const std::string& mode) {
            const auto r = ordinary_fpca(make_series(points, values), phi, parse_mode(mode));
            py::dict d;
            d["eigenvalues"] = r.spectrum.eigenvalues;
            d["attractor_basis"] = basis_values(r.spectrum, phi);
            d["proj_N"] = r.proj_N.coeffs();
            return d;
        },
        py::arg("points"), py::arg("values"), py::arg("phi"), py::arg("mode") = "none");

    m.def(
        "modified_fpca",
        [](const std::vector<double>& points, const Eigen::MatrixXd& values, std::size_t phi, const std::string& kernel,
           const py::object& h, const std::string& mode, const std::string& method) {
            const auto x = make_series(points, values);
            const KernelSpec spec{parse_kernel(kernel), 1.0};
            const double hv = resolve_h(h, x.length());
            if (method != "fm" && method != "harris") fail(ErrorKind::InvalidArgument, "method must be fm or harris");
            const auto r = method == "fm" ? modified_fpca(x, phi, spec, hv, parse_mode(mode))
                                          : harris_fpca(x, phi, spec, hv, parse_mode(mode));
            py::dict d;
            d["eigenvalues"] = r.spectrum.eigenvalues;
            d["attractor_basis"] = basis_values(r.spectrum, phi);
            d["proj_N"] = r.proj_N.coeffs();
            d["preliminary_proj_N"] = r.preliminary.proj_N.coeffs();
            d["modified_series"] = r.modified_series.values();
            d["bandwidth"] = hv;
            return d;
        },
        py::arg("points"), py::arg("values"), py::arg("phi"), py::arg("kernel") = "parzen", py::arg("h") = "t13",
        py::arg("mode") = "none", py::arg("method") = "fm");

    m.def(
        "dimension_test",
        [](const std::vector<double>& points, const Eigen::MatrixXd& values, std::size_t phi0, std::size_t K,
           const CriticalValueTable& cvt, const std::string& kernel, const py::object& h, const std::string& mode) {
            const auto x = make_series(points, values);
            return outcome_dict(dimension_test(x, phi0, K, {parse_kernel(kernel), 1.0}, resolve_h(h, x.length()),
                                               parse_mode(mode), cvt));
        },
        py::arg("points"), py::arg("values"), py::arg("phi0"), py::arg("K"), py::arg("table"),
        py::arg("kernel") = "parzen", py::arg("h") = "t13", py::arg("mode") = "none");

    m.def(
        "sequential_dimension",
        [](const std::vector<double>& points, const Eigen::MatrixXd& values, const CriticalValueTable& cvt,
           double alpha, std::size_t k_policy, const std::string& kernel, const py::object& h, const std::string& mode,
           std::optional<std::size_t> phi_cap) {
            const auto x = make_series(points, values);
            const auto cap = phi_cap.value_or(default_phi_cap(x.dim(), x.length(), k_policy));
            const auto r = sequential_dimension(x, alpha, k_policy, {parse_kernel(kernel), 1.0},
                                                resolve_h(h, x.length()), parse_mode(mode), cvt, cap);
            py::dict d;
            d["phi_hat"] = r.phi_hat;
            d["hit_cap"] = r.hit_cap;
            py::list traj;
            for (const auto& o : r.trajectory) traj.append(outcome_dict(o));
            d["trajectory"] = traj;
            return d;
        },
        py::arg("points"), py::arg("values"), py::arg("table"), py::arg("alpha") = 0.05, py::arg("k_policy") = 1,
        py::arg("kernel") = "parzen", py::arg("h") = "t13", py::arg("mode") = "none", py::arg("phi_cap") = py::none());

    m.def(
        "subspace_in_attractor_test",
        [](const std::vector<double>& points, const Eigen::MatrixXd& values, const Eigen::MatrixXd& m_curves,
           std::size_t phi, std::size_t K, const CriticalValueTable& cvt, const std::string& kernel,
           const py::object& h, const std::string& mode) {
            const auto x = make_series(points, values);
            return outcome_dict(subspace_in_attractor_test(x, curves(x.grid(), m_curves), phi, K,
                                                           {parse_kernel(kernel), 1.0}, resolve_h(h, x.length()),
                                                           parse_mode(mode), cvt));
        },
        py::arg("points"), py::arg("values"), py::arg("m_curves"), py::arg("phi"), py::arg("K"), py::arg("table"),
        py::arg("kernel") = "parzen", py::arg("h") = "t13", py::arg("mode") = "none");

    m.def(
        "attractor_in_subspace_test",
        [](const std::vector<double>& points, const Eigen::MatrixXd& values, const Eigen::MatrixXd& m_curves,
           std::size_t K, const CriticalValueTable& cvt, const std::string& kernel, const py::object& h,
           const std::string& mode) {
            const auto x = make_series(points, values);
            return outcome_dict(attractor_in_subspace_test(x, curves(x.grid(), m_curves), K,
                                                           {parse_kernel(kernel), 1.0}, resolve_h(h, x.length()),
                                                           parse_mode(mode), cvt));
        },
        py::arg("points"), py::arg("values"), py::arg("m_curves"), py::arg("K"), py::arg("table"),
        py::arg("kernel") = "parzen", py::arg("h") = "t13", py::arg("mode") = "none");

    m.def(
        "generate_path",
        [](std::size_t phi, std::size_t T, std::size_t grid_size, double beta_min, double beta_max,
           const std::string& mode, double rho, std::uint64_t seed, std::uint64_t stream) {
            DgpConfig cfg;
            cfg.phi = phi;
            cfg.T = T;
            cfg.grid_size = grid_size;
            cfg.beta_min = beta_min;
            cfg.beta_max = beta_max;
            cfg.deterministic = parse_mode(mode);
            cfg.innovation_correlation = rho;
            Rng rng = make_stream(seed, stream);
            const auto p = generate_path(cfg, rng);
            py::dict d;
            d["points"] = p.series.grid()->points();
            d["values"] = p.series.values();
            d["true_proj_N"] = p.true_proj_N.coeffs();
            return d;
        },
        py::arg("phi") = 1, py::arg("T") = 250, py::arg("grid_size") = 201, py::arg("beta_min") = 0.0,
        py::arg("beta_max") = 0.5, py::arg("mode") = "none", py::arg("rho") = 0.0, py::arg("seed") = 0,
        py::arg("stream") = 0);

    m.def(
        "logit",
        [](const std::vector<double>& points, const Eigen::VectorXd& v) {
            return Eigen::VectorXd(logit_curve(GridFunction(make_grid(points), v)).values());
        },
        py::arg("points"), py::arg("values"));
    m.def(
        "clr",
        [](const std::vector<double>& points, const Eigen::VectorXd& v, bool normalize) {
            const auto g = make_grid(points);
            const auto d = normalize ? DensityFunction::normalized(g, v) : DensityFunction(g, v);
            return Eigen::VectorXd(clr_transform(d).values());
        },
        py::arg("points"), py::arg("values"), py::arg("normalize") = false);
    m.def(
        "inverse_clr",
        [](const std::vector<double>& points, const Eigen::VectorXd& v) {
            return Eigen::VectorXd(inverse_clr(GridFunction(make_grid(points), v)).values());
        },
        py::arg("points"), py::arg("values"));
}
