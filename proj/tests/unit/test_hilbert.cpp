#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fmfpca/error.hpp"
#include "fmfpca/hilbert.hpp"
#include "helpers.hpp"

using namespace fmfpca;

namespace {

GridFunction sampled(const GridPtr& g, double (*f)(double)) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i) v[static_cast<Eigen::Index>(i)] = f(g->points()[i]);
    return {g, v};
}

LinearOperator from_matrix(const GridPtr& g, Eigen::MatrixXd m) { return {g, std::move(m)}; }

}  // namespace

TEST_CASE("grid construction") {
    auto g = Grid::uniform(5);
    CHECK(g->weights() == std::vector<double>{0.125, 0.25, 0.25, 0.25, 0.125});
    CHECK(g->length() == doctest::Approx(1.0));
    CHECK_THROWS_AS(Grid::trapezoid({0.0, 0.5, 0.5}), Error);
    CHECK_THROWS_AS(Grid::trapezoid({0.0}), Error);
    CHECK_THROWS_AS(Grid({0.0, 1.0}, {0.5, -0.5}), Error);
}

TEST_CASE("inner products") {
    auto g = Grid::uniform(201);
    auto one = sampled(g, [](double) { return 1.0; });
    auto u = sampled(g, [](double x) { return x; });
    auto s = sampled(g, [](double x) { return std::numbers::sqrt2 * std::sin(2 * std::numbers::pi * x); });
    auto c = sampled(g, [](double x) { return std::numbers::sqrt2 * std::cos(2 * std::numbers::pi * x); });
    CHECK(inner_product(one, one) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(inner_product(u, u) - 1.0 / 3.0) <= 1e-4);
    CHECK(std::abs(inner_product(s, c)) <= 1e-10);
    CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-12));

    auto other = Grid::uniform(201);
    auto u2 = sampled(other, [](double x) { return x; });
    CHECK(inner_product(u, u2) == doctest::Approx(inner_product(u, u)));
    auto coarse = Grid::uniform(11);
    CHECK_THROWS_AS(inner_product(u, sampled(coarse, [](double x) { return x; })), Error);
}

TEST_CASE("tensor products") {
    auto g = Grid::uniform(6);
    auto e1 = testutil::unit_coord(g, 0);
    auto e2 = testutil::unit_coord(g, 1);
    auto t11 = tensor(e1, e1);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(6, 6);
    expect(0, 0) = 1.0;
    CHECK(t11.coeffs().isApprox(expect));
    auto t12 = tensor(e1, e2);
    CHECK((t12.apply(e1).coords() - e2.coords()).norm() < 1e-15);
    CHECK(t12.apply(e2).coords().norm() < 1e-15);

    auto big = Grid::uniform(31);
    const Eigen::MatrixXd r = testutil::random_matrix(31, 4, 7);
    auto x = GridFunction(big, r.col(0)), y = GridFunction(big, r.col(1)), z = GridFunction(big, r.col(2)),
         w = GridFunction(big, r.col(3));
    const double lhs = inner_product(tensor(x, y).apply(z), w);
    CHECK(lhs == doctest::Approx(inner_product(x, z) * inner_product(y, w)).epsilon(1e-12));
    CHECK(tensor(x, y).adjoint().coeffs().isApprox(tensor(y, x).coeffs(), 1e-14));
}

TEST_CASE("adjoint identity on random operators") {
    auto g = Grid::trapezoid({0.0, 0.1, 0.35, 0.4, 0.8, 0.9, 1.0});
    for (std::uint64_t s = 0; s < 20; ++s) {
        LinearOperator a(g, testutil::random_matrix(7, 7, s));
        const Eigen::MatrixXd fg = testutil::random_matrix(7, 2, 100 + s);
        GridFunction f(g, fg.col(0)), h(g, fg.col(1));
        const double lhs = inner_product(a.apply(f), h);
        const double rhs = inner_product(f, a.adjoint().apply(h));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * a.norm() * norm(f) * norm(h));
    }
}

TEST_CASE("eigendecompose") {
    auto g = Grid::uniform(2);
    Eigen::Matrix2d d;
    d << 3, 0, 0, 1;
    auto es = eigendecompose(from_matrix(g, d));
    CHECK(es.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(es.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(es.vectors.col(0).isApprox(Eigen::Vector2d(1, 0)));
    CHECK(es.vectors.col(1).isApprox(Eigen::Vector2d(0, 1)));

    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    es = eigendecompose(from_matrix(g, m));
    CHECK(es.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(es.eigenvalues[1] == doctest::Approx(1.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(es.vectors.col(0).dot(Eigen::Vector2d(r, r))) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(es.vectors.col(1).dot(Eigen::Vector2d(r, -r))) - 1.0) < 1e-12);

    es = eigendecompose(LinearOperator::zero(Grid::uniform(4)));
    CHECK(es.eigenvalues.cwiseAbs().maxCoeff() == 0.0);

    Eigen::Matrix2d asym;
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(eigendecompose(from_matrix(g, asym)), Error);
}

TEST_CASE("eigendecompose conventions and reconstruction") {
    auto g = Grid::uniform(12);
    const Eigen::MatrixXd b = testutil::random_matrix(12, 12, 3);
    LinearOperator a(g, b * b.transpose());
    auto es = eigendecompose(a);
    for (Eigen::Index j = 1; j < es.eigenvalues.size(); ++j) CHECK(es.eigenvalues[j] <= es.eigenvalues[j - 1]);
    CHECK((es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(12, 12)).norm() < 1e-12);
    for (Eigen::Index j = 0; j < es.vectors.cols(); ++j) {
        Eigen::Index k;
        es.vectors.col(j).cwiseAbs().maxCoeff(&k);
        CHECK(es.vectors(k, j) > 0.0);
    }
    const auto rec = es.reconstruct();
    CHECK((rec.coeffs() - a.coeffs()).norm() <= 1e-8 * a.coeffs().norm());
    const auto rec2 = eigendecompose(rec).reconstruct();
    CHECK((rec2.coeffs() - rec.coeffs()).norm() <= 1e-8 * rec.coeffs().norm());
}

TEST_CASE("regularized inverse") {
    auto g = Grid::uniform(3);
    CHECK(regularized_inverse(LinearOperator::identity(g), 0).coeffs().isZero());
    Eigen::Matrix3d d = Eigen::Vector3d(4, 1, 0).asDiagonal();
    auto inv = regularized_inverse(from_matrix(g, d), 2);
    Eigen::Matrix3d expect = Eigen::Vector3d(0.25, 1, 0).asDiagonal();
    CHECK((inv.coeffs() - expect).norm() < 1e-14);
    CHECK(regularized_inverse(LinearOperator::identity(g), 3).coeffs().isApprox(Eigen::Matrix3d::Identity()));
    CHECK_THROWS_AS(regularized_inverse(from_matrix(g, d), 3), Error);
    CHECK_THROWS_AS(regularized_inverse(from_matrix(g, d), 4), Error);

    auto big = Grid::uniform(10);
    const Eigen::MatrixXd b = testutil::random_matrix(10, 4, 9);
    LinearOperator a(big, b * b.transpose());
    const auto p = (a * regularized_inverse(a, 4)).coeffs();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(10, 4);
    CHECK((p - q * q.transpose()).norm() < 1e-8);
}

TEST_CASE("projections") {
    auto g = Grid::uniform(5);
    auto e1 = testutil::unit_coord(g, 0);
    auto e2 = testutil::unit_coord(g, 1);
    auto e3 = testutil::unit_coord(g, 2);
    std::vector<GridFunction> one{e1};
    CHECK(projection_from(g, one).coeffs().isApprox(tensor(e1, e1).coeffs()));
    std::vector<GridFunction> two{e1, e2};
    auto p2 = projection_from(g, two);
    CHECK(p2.apply(e3).coords().norm() < 1e-15);
    CHECK(p2.coeffs().trace() == doctest::Approx(2.0));
    CHECK(projection_from(g, std::vector<GridFunction>{}).coeffs().isZero());

    std::vector<GridFunction> notortho{e1, GridFunction::from_coords(g, e1.coords() + e2.coords())};
    CHECK_THROWS_AS(projection_from(g, notortho), Error);

    auto big = Grid::uniform(40);
    const Eigen::MatrixXd q = testutil::random_orthogonal(40, 5).leftCols(6);
    std::vector<GridFunction> vs;
    for (Eigen::Index j = 0; j < 6; ++j) vs.push_back(GridFunction::from_coords(big, q.col(j)));
    auto p = projection_from(big, vs);
    CHECK((p.coeffs() * p.coeffs() - p.coeffs()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(p.asymmetry() < 1e-10);
    CHECK(p.norm() == doctest::Approx(1.0));
}

TEST_CASE("orthonormalize") {
    auto g = Grid::uniform(21);
    const Eigen::MatrixXd r = testutil::random_matrix(21, 3, 11);
    std::vector<GridFunction> vs;
    for (Eigen::Index j = 0; j < 3; ++j) vs.emplace_back(g, r.col(j));
    auto on = orthonormalize(vs);
    REQUIRE(on.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(inner_product(on[i], on[j]) == doctest::Approx(i == j ? 1.0 : 0.0));
    auto p1 = projection_from(g, on);
    for (const auto& v : vs) CHECK((p1.apply(v).values() - v.values()).norm() < 1e-10 * v.values().norm());

    std::vector<GridFunction> near{GridFunction(g, r.col(0)), GridFunction(g, r.col(0) + 1e-9 * r.col(1))};
    CHECK_THROWS_AS(orthonormalize(near), Error);
}
