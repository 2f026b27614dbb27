#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "attrforge/svm.hpp"
#include "qp_oracle.hpp"
#include "svm_datasets.hpp"

using namespace attrforge;

TEST_CASE("analytic two-point problem") {
    const auto ds = testing::analytic_pair();
    const auto xs = ds.sparse();
    const auto sol = solve_smo(xs, ds.labels, SvmParams{});
    CHECK(sol.model.weights[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.model.weights[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.model.bias == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(sol.alphas[0] == doctest::Approx(0.25));
    CHECK(sol.model.n_support == 2);
}

TEST_CASE("dual objective matches the brute-force oracle") {
    const auto sets = testing::small_datasets(120, 7);
    for (std::size_t k = 0; k < sets.size(); ++k) {
        CAPTURE(k);
        const auto& ds = sets[k];
        const auto xs = ds.sparse();
        SvmParams params;
        params.c = ds.c;
        params.tol = 1e-6;
        const auto sol = solve_smo(xs, ds.labels, params, ds.dimension());
        const auto ref = oracle::solve_dual(ds.points, ds.labels, ds.c);
        REQUIRE(ref.objective > 0.0);
        const double got = dual_objective(sol.alphas, xs, ds.labels);
        CHECK(std::abs(got - ref.objective) <= 1e-6 * ref.objective);
        CHECK(check_kkt(sol.model, sol.alphas, xs, ds.labels, 1e-3).empty());
    }
}

TEST_CASE("default tolerance leaves no KKT violations") {
    for (const auto& ds : testing::small_datasets(200, 17)) {
        const auto xs = ds.sparse();
        SvmParams params;
        params.c = ds.c;
        const auto sol = solve_smo(xs, ds.labels, params, ds.dimension());
        CHECK(check_kkt(sol.model, sol.alphas, xs, ds.labels, params.tol).empty());
    }
}

TEST_CASE("alphas stay feasible") {
    for (const auto& ds : testing::small_datasets(60, 11)) {
        const auto xs = ds.sparse();
        SvmParams params;
        params.c = ds.c;
        const auto sol = solve_smo(xs, ds.labels, params, ds.dimension());
        double balance = 0.0;
        for (std::size_t i = 0; i < sol.alphas.size(); ++i) {
            CHECK(sol.alphas[i] >= 0.0);
            CHECK(sol.alphas[i] <= ds.c);
            balance += sol.alphas[i] * ds.labels[i];
        }
        CHECK(std::abs(balance) < 1e-9);
    }
}

TEST_CASE("decision value is affine in x") {
    const auto ds = testing::small_datasets(5, 3).back();
    const auto model = train_binary(ds.sparse(), ds.labels, SvmParams{}, ds.dimension());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(ds.dimension());
        std::vector<double> b(ds.dimension());
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        const double t = u(rng);
        std::vector<double> mix(ds.dimension());
        for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = t * a[j] + (1 - t) * b[j];
        const double fa = decision_value(model, SparseVector::from_dense(a));
        const double fb = decision_value(model, SparseVector::from_dense(b));
        const double fm = decision_value(model, SparseVector::from_dense(mix));
        CHECK(fm == doctest::Approx(t * fa + (1 - t) * fb).epsilon(1e-9));
    }
}

TEST_CASE("duplicating a point does not change the separating hyperplane") {
    testing::SvmDataset ds;
    ds.points.resize(4, 2);
    ds.points << 2, 2, 3, 1, 0, 0, -1, 1;
    ds.labels = {1, 1, -1, -1};
    const auto base = train_binary(ds.sparse(), ds.labels, SvmParams{}, 2);

    testing::SvmDataset dup = ds;
    dup.points.conservativeResize(5, 2);
    dup.points.row(4) = ds.points.row(0);
    dup.labels.push_back(1);
    const auto twice = train_binary(dup.sparse(), dup.labels, SvmParams{}, 2);
    CHECK(twice.weights[0] == doctest::Approx(base.weights[0]).epsilon(1e-6));
    CHECK(twice.weights[1] == doctest::Approx(base.weights[1]).epsilon(1e-6));
    CHECK(twice.bias == doctest::Approx(base.bias).epsilon(1e-6));
}

TEST_CASE("training is deterministic") {
    for (const auto& ds : testing::small_datasets(20, 13)) {
        const auto xs = ds.sparse();
        SvmParams params;
        params.c = ds.c;
        const auto a = solve_smo(xs, ds.labels, params, ds.dimension());
        const auto b = solve_smo(xs, ds.labels, params, ds.dimension());
        CHECK(a.model == b.model);
        CHECK(a.alphas == b.alphas);
    }
}

TEST_CASE("input validation") {
    const auto ds = testing::analytic_pair();
    const auto xs = ds.sparse();
    std::vector<int> same = {1, 1};
    CHECK_THROWS_AS(solve_smo(xs, same, SvmParams{}), std::invalid_argument);
    std::vector<int> bad = {1, 0};
    CHECK_THROWS_AS(solve_smo(xs, bad, SvmParams{}), std::invalid_argument);
    SvmParams zero_c;
    zero_c.c = 0.0;
    CHECK_THROWS_AS(solve_smo(xs, ds.labels, zero_c), std::invalid_argument);
    CHECK_THROWS_AS(solve_smo(xs, ds.labels, SvmParams{}, 1), std::invalid_argument);

    const auto model = train_binary(xs, ds.labels, SvmParams{});
    SparseVector wide;
    wide.columns = {5};
    CHECK_THROWS_AS(decision_value(model, wide), std::out_of_range);
}

TEST_CASE("check_kkt flags a perturbed solution") {
    const auto ds = testing::analytic_pair();
    const auto xs = ds.sparse();
    auto sol = solve_smo(xs, ds.labels, SvmParams{});
    sol.model.bias += 0.5;
    CHECK_FALSE(check_kkt(sol.model, sol.alphas, xs, ds.labels, 1e-3).empty());
}
