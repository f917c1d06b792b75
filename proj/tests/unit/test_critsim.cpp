#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fmfpca/critsim.hpp"
#include "fmfpca/error.hpp"

using namespace fmfpca;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

// Scalar re-derivation of one (1, 1) draw from the same normal stream.
double scalar_draw(std::size_t n, DeterministicMode mode, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n + 1, 0.0), b(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) w[i] = w[i - 1] + nd(rng);
    for (std::size_t i = 1; i <= n; ++i) b[i] = b[i - 1] + nd(rng);
    const double dn = static_cast<double>(n);
    std::vector<double> wt = w, bt = b;
    if (mode == DeterministicMode::Constant) {
        double ib = 0.0;
        for (std::size_t i = 1; i <= n; ++i) ib += b[i] / dn;
        for (std::size_t i = 0; i <= n; ++i) {
            wt[i] = w[i] - (static_cast<double>(i) / dn) * w[n];
            bt[i] = b[i] - ib;
        }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        num += (w[i] - w[i - 1]) * bt[i - 1];
        den += bt[i] * bt[i] / dn;
    }
    const double c = num / den;
    double cum = 0.0, total = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cum += bt[i] / dn;
        const double v = wt[i] - c * cum;
        total += v * v / dn;
    }
    return total;
}

}  // namespace

TEST_CASE("single draws") {
    for (auto mode : {DeterministicMode::None, DeterministicMode::Constant, DeterministicMode::LinearTrend}) {
        for (std::size_t b = 0; b <= 2; ++b) {
            Rng r1 = make_stream(3, 7);
            Rng r2 = make_stream(3, 7);
            const double a = simulate_limit_draw(2, b, mode, 200, r1);
            CHECK(a > 0.0);
            CHECK(a == simulate_limit_draw(2, b, mode, 200, r2));
        }
    }
    Rng rng = make_stream(0, 0);
    CHECK(kind_of([&] { simulate_limit_draw(1, 0, DeterministicMode::None, 99, rng); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { simulate_limit_draw(0, 1, DeterministicMode::None, 200, rng); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("draw matches a scalar re-derivation") {
    for (auto mode : {DeterministicMode::None, DeterministicMode::Constant}) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            Rng r1 = make_stream(s, 1);
            Rng r2 = make_stream(s, 1);
            CHECK(simulate_limit_draw(1, 1, mode, 300, r1) == doctest::Approx(scalar_draw(300, mode, r2)).epsilon(1e-10));
        }
    }
}

TEST_CASE("Brownian functional moments") {
    CvSimulationOptions o;
    o.reps = 100000;
    o.ngrid = 1000;
    o.seed = 5;
    // E int W^2 = 1/2, E int (W - rW(1))^2 = 1/6, E int of the detrended W squared = 1/15
    CHECK(mean(simulate_limit_draws(1, 0, DeterministicMode::None, o)) == doctest::Approx(0.5).epsilon(0.01));
    o.reps = 50000;
    CHECK(mean(simulate_limit_draws(2, 0, DeterministicMode::None, o)) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(mean(simulate_limit_draws(1, 0, DeterministicMode::Constant, o)) == doctest::Approx(1.0 / 6).epsilon(0.02));
    CHECK(mean(simulate_limit_draws(1, 0, DeterministicMode::LinearTrend, o)) ==
          doctest::Approx(1.0 / 15).epsilon(0.02));
}

TEST_CASE("type-7 quantiles") {
    const std::vector<double> v{1.0, 2.0, 4.0, 8.0};
    CHECK(empirical_quantile(v, 0.0) == 1.0);
    CHECK(empirical_quantile(v, 1.0) == 8.0);
    CHECK(empirical_quantile(v, 0.5) == doctest::Approx(3.0));
    CHECK(empirical_quantile(v, 0.9) == doctest::Approx(6.8));
    CHECK(empirical_quantile({2.5}, 0.3) == 2.5);
    CHECK(kind_of([&] { empirical_quantile({}, 0.5); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("tables: determinism, threads, monotonicity") {
    CvSimulationOptions o;
    o.reps = 4000;
    o.ngrid = 200;
    o.seed = 9;
    o.threads = 1;
    const std::vector<std::pair<std::size_t, std::size_t>> dims{{1, 0}, {1, 1}, {1, 2}, {2, 1}};
    const auto a = critical_values(dims, DeterministicMode::LinearTrend, {0.9, 0.95, 0.99}, o);
    o.threads = 3;
    const auto b = critical_values(dims, DeterministicMode::LinearTrend, {0.9, 0.95, 0.99}, o);
    REQUIRE(a.entries().size() == 12);
    for (std::size_t i = 0; i < a.entries().size(); ++i) CHECK(a.entries()[i].quantile == b.entries()[i].quantile);
    for (const auto& [w, bb] : dims) {
        const auto lv = a.levels_for(DeterministicMode::LinearTrend, w, bb);
        CHECK(lv.at(0.9) < lv.at(0.95));
        CHECK(lv.at(0.95) < lv.at(0.99));
        CHECK(lv.at(0.9) > 0.0);
    }
    CHECK(*a.find(DeterministicMode::LinearTrend, 1, 0, 0.95) > *a.find(DeterministicMode::LinearTrend, 1, 1, 0.95));
    CHECK(*a.find(DeterministicMode::LinearTrend, 1, 1, 0.95) > *a.find(DeterministicMode::LinearTrend, 1, 2, 0.95));
    CHECK_FALSE(a.find(DeterministicMode::Constant, 1, 0, 0.95));
    CHECK(a.entries()[0].provenance == CvProvenance{4000, 200, 9});
}

TEST_CASE("grid refinement") {
    CvSimulationOptions o;
    o.reps = 50000;
    o.seed = 2;
    o.ngrid = 1000;
    auto coarse = simulate_limit_draws(1, 0, DeterministicMode::None, o);
    o.ngrid = 4000;
    auto fine = simulate_limit_draws(1, 0, DeterministicMode::None, o);
    std::sort(coarse.begin(), coarse.end());
    std::sort(fine.begin(), fine.end());
    for (double p : {0.9, 0.95, 0.99}) {
        const double qc = empirical_quantile(coarse, p);
        const double qf = empirical_quantile(fine, p);
        CHECK(std::abs(qc - qf) / qf < 0.02);
    }
}

TEST_CASE("cache round trip and provenance") {
    CriticalValueTable t;
    t.insert({DeterministicMode::Constant, 1, 2, 0.95, 0.123456789012345678, {50000, 2000, 42}});
    t.insert({DeterministicMode::None, 2, 0, 0.99, 1.0 / 3.0, {1000, 100, 0}});
    t.insert({DeterministicMode::Constant, 1, 2, 0.95, 0.2, {50000, 2000, 43}});
    CHECK(t.entries().size() == 2);
    std::stringstream ss;
    t.write_csv(ss);
    const auto text = ss.str();
    CHECK(text.rfind("mode,dim_w,dim_b,level,quantile,reps,ngrid,seed\n", 0) == 0);
    const auto back = CriticalValueTable::read_csv(ss);
    REQUIRE(back.entries().size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.entries()[i].quantile == t.entries()[i].quantile);
        CHECK(back.entries()[i].level == t.entries()[i].level);
        CHECK(back.entries()[i].provenance == t.entries()[i].provenance);
        CHECK(back.entries()[i].mode == t.entries()[i].mode);
    }

    std::istringstream missing("mode,dim_w,dim_b,level,quantile,reps,ngrid,seed\nconst,1,0,0.95,0.4,,2000,1\n");
    CHECK(kind_of([&] { CriticalValueTable::read_csv(missing); }) == ErrorKind::MissingCriticalValues);
    std::istringstream short_row("mode,dim_w,dim_b,level,quantile,reps,ngrid,seed\nconst,1,0,0.95,0.4\n");
    CHECK(kind_of([&] { CriticalValueTable::read_csv(short_row); }) == ErrorKind::MissingCriticalValues);
    std::istringstream header("mode,dim_w,dim_b,level,quantile\nconst,1,0,0.95,0.4\n");
    CHECK(kind_of([&] { CriticalValueTable::read_csv(header); }) == ErrorKind::MissingCriticalValues);
    CHECK(kind_of([] { CriticalValueTable::load("/nonexistent/cv.csv"); }) == ErrorKind::MissingCriticalValues);

    CriticalValueTable merged;
    merged.insert({DeterministicMode::None, 2, 0, 0.99, 7.0, {1000, 100, 0}});
    merged.merge(back);
    CHECK(*merged.find(DeterministicMode::None, 2, 0, 0.99) == doctest::Approx(1.0 / 3.0));
}
