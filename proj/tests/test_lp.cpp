// Optimization engine tests: oracle comparisons and duality properties.
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "iesmarket/lp.hpp"
#include "test_support.hpp"

using namespace ies::lp;

namespace {

double row_activity(const LinearModel& m, const Row& r, const std::vector<double>& x) {
    double lhs = 0.0;
    for (auto [j, a] : r.coefs) lhs += a * x[j];
    return lhs;
}

void check_duality_properties(const LinearModel& m, const Solution& sol) {
    REQUIRE(sol.status == Status::Optimal);
    // Primal feasibility residual.
    for (int i = 0; i < m.num_rows(); ++i) {
        const Row& r = m.row(i);
        double lhs = row_activity(m, r, sol.primal);
        switch (r.sense) {
            case Sense::LessEqual: CHECK(lhs <= r.rhs + 1e-7); break;
            case Sense::GreaterEqual: CHECK(lhs >= r.rhs - 1e-7); break;
            case Sense::Equal: CHECK(std::fabs(lhs - r.rhs) <= 1e-7); break;
        }
    }
    for (int j = 0; j < m.num_variables(); ++j) {
        CHECK(sol.primal[j] >= m.variable(j).lower - 1e-7);
        CHECK(sol.primal[j] <= m.variable(j).upper + 1e-7);
    }
    // Strong duality.
    double dual = dual_objective(m, sol);
    CHECK(std::fabs(sol.objective - dual) <= 1e-6 * (1.0 + std::fabs(sol.objective)));
    // Complementary slackness on rows.
    for (int i = 0; i < m.num_rows(); ++i) {
        const Row& r = m.row(i);
        if (r.sense == Sense::Equal) continue;
        double slack = r.rhs - row_activity(m, r, sol.primal);
        CHECK(std::fabs(sol.duals[i] * slack) <= 1e-6 * (1.0 + std::fabs(sol.objective)));
    }
}

}  // namespace

TEST_CASE("maximize single variable with one row") {
    LinearModel m;
    m.sense = Objective::Maximize;
    int x = m.add_variable("x", 0.0, kInf, 1.0);
    m.add_row(Sense::LessEqual, 3.0, {{x, 1.0}});
    Solution s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.primal[x] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.duals[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("contradictory rows are infeasible") {
    LinearModel m;
    int x = m.add_variable("x", -kInf, kInf, 0.0);
    m.add_row(Sense::GreaterEqual, 1.0, {{x, 1.0}});
    m.add_row(Sense::LessEqual, 0.0, {{x, 1.0}});
    CHECK(solve_lp(m).status == Status::Infeasible);
}

TEST_CASE("unbounded directions are reported") {
    LinearModel m;
    m.sense = Objective::Maximize;
    int x = m.add_variable("x", 0.0, kInf, 1.0);
    m.add_row(Sense::GreaterEqual, 1.0, {{x, 1.0}});
    CHECK(solve_lp(m).status == Status::Unbounded);

    LinearModel rowless;
    rowless.sense = Objective::Maximize;
    rowless.add_variable("x", 0.0, kInf, 1.0);
    CHECK(solve_lp(rowless).status == Status::Unbounded);
}

TEST_CASE("bound-only models skip the simplex") {
    LinearModel m;
    m.sense = Objective::Maximize;
    int x = m.add_variable("x", 0.0, 2.0, 3.0);
    int y = m.add_variable("y", -1.0, 5.0, -2.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[x] == doctest::Approx(2.0));
    CHECK(s.primal[y] == doctest::Approx(-1.0));
    CHECK(s.objective == doctest::Approx(8.0));
}

TEST_CASE("model validation rejects malformed input") {
    LinearModel m;
    int x = m.add_variable("x", 1.0, 0.0, 0.0);
    CHECK_THROWS_AS(solve_lp(m), ies::InputError);
    m.variable(x).lower = 0.0;
    m.variable(x).upper = 1.0;
    m.add_row(Sense::LessEqual, 1.0, {{7, 1.0}});
    CHECK_THROWS_AS(solve_lp(m), ies::InputError);
}

TEST_CASE("random LPs match vertex enumeration") {
    std::mt19937_64 rng(20240811);
    int solved = 0, infeasible = 0;
    for (int rep = 0; rep < 200; ++rep) {
        LinearModel m = testsup::random_lp(rng);
        auto oracle = testsup::vertex_enumeration_optimum(m);
        Solution s = solve_lp(m);
        if (!oracle) {
            CHECK(s.status == Status::Infeasible);
            ++infeasible;
            continue;
        }
        REQUIRE_MESSAGE(s.status == Status::Optimal, "rep " << rep);
        CHECK_MESSAGE(std::fabs(s.objective - *oracle) <=
                          1e-6 * (1.0 + std::fabs(*oracle)),
                      "rep " << rep << " solver " << s.objective << " oracle " << *oracle);
        check_duality_properties(m, s);
        ++solved;
    }
    CHECK(solved > 100);  // the generator must mostly produce feasible instances
    CHECK(infeasible > 0);
}

TEST_CASE("solver is deterministic") {
    std::mt19937_64 rng(7);
    LinearModel m = testsup::random_lp(rng);
    Solution a = solve_lp(m);
    Solution b = solve_lp(m);
    REQUIRE(a.status == b.status);
    REQUIRE(a.primal.size() == b.primal.size());
    CHECK(std::memcmp(a.primal.data(), b.primal.data(),
                      a.primal.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.duals.data(), b.duals.data(), a.duals.size() * sizeof(double)) == 0);
    CHECK(a.objective == b.objective);
}

TEST_CASE("warm start reproduces the cold-start optimum") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        LinearModel m = testsup::random_lp(rng);
        Solution cold = solve_lp(m);
        if (cold.status != Status::Optimal) continue;
        Solution warm = solve_lp(m, {}, &cold.basis);
        REQUIRE(warm.status == Status::Optimal);
        CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
    }
}

TEST_CASE("knapsack toy matches enumeration") {
    LinearModel m;
    m.sense = Objective::Maximize;
    int x = m.add_variable("x", 0.0, 1.0, 5.0, true);
    int y = m.add_variable("y", 0.0, 1.0, 4.0, true);
    m.add_row(Sense::LessEqual, 4.0, {{x, 3.0}, {y, 2.0}});
    SolverSettings st;
    st.rel_gap = 0.0;
    Solution s = solve_milp(m, st);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(5.0));
    CHECK(s.primal[x] == doctest::Approx(1.0));
    CHECK(s.primal[y] == doctest::Approx(0.0));
}

TEST_CASE("all-continuous model passes straight through branch and bound") {
    std::mt19937_64 rng(123);
    LinearModel m = testsup::random_lp(rng);
    Solution lp = solve_lp(m);
    Solution milp = solve_milp(m);
    REQUIRE(lp.status == milp.status);
    if (lp.status == Status::Optimal)
        CHECK(milp.objective == doctest::Approx(lp.objective).epsilon(1e-12));
}

TEST_CASE("toy unit commitment matches exhaustive enumeration") {
    std::mt19937_64 rng(424242);
    SolverSettings st;
    st.rel_gap = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        testsup::ToyUc uc = testsup::random_toy_uc(rng);
        auto oracle = testsup::toy_uc_enumerate(uc);
        LinearModel m = testsup::toy_uc_model(uc);
        Solution s = solve_milp(m, st);
        if (!oracle) {
            CHECK(s.status == Status::Infeasible);
            continue;
        }
        REQUIRE_MESSAGE(s.status == Status::Optimal, "rep " << rep);
        CHECK_MESSAGE(std::fabs(s.objective - *oracle) <= 1e-6 * (1.0 + *oracle),
                      "rep " << rep << " solver " << s.objective << " oracle " << *oracle);
    }
}

TEST_CASE("branch-and-bound bound log is monotone") {
    std::mt19937_64 rng(31337);
    testsup::ToyUc uc = testsup::random_toy_uc(rng);
    SolverSettings st;
    st.rel_gap = 0.0;
    Solution s = solve_milp(testsup::toy_uc_model(uc), st);
    if (s.status == Status::Optimal) {
        for (size_t k = 1; k < s.bound_log.size(); ++k)
            CHECK(s.bound_log[k] >= s.bound_log[k - 1] - 1e-9 * (1.0 + std::fabs(s.bound_log[k])));
        CHECK(s.mip_gap <= 1e-9);
        // Incumbent within the declared gap of the bound.
        CHECK(s.objective >= s.best_bound - 1e-6 * (1.0 + std::fabs(s.objective)));
    }
}

TEST_CASE("milp determinism") {
    std::mt19937_64 rng(5150);
    testsup::ToyUc uc = testsup::random_toy_uc(rng);
    LinearModel m = testsup::toy_uc_model(uc);
    SolverSettings st;
    st.rel_gap = 0.0;
    Solution a = solve_milp(m, st);
    Solution b = solve_milp(m, st);
    REQUIRE(a.status == b.status);
    if (a.status == Status::Optimal) {
        CHECK(a.objective == b.objective);
        CHECK(std::memcmp(a.primal.data(), b.primal.data(),
                          a.primal.size() * sizeof(double)) == 0);
        CHECK(a.nodes == b.nodes);
    }
}

TEST_CASE("fixed integer duals: pure LP is unchanged") {
    std::mt19937_64 rng(8);
    LinearModel m = testsup::random_lp(rng);
    Solution lp = solve_lp(m);
    if (lp.status != Status::Optimal) return;
    Solution fd = fixed_integer_duals(m, lp);
    REQUIRE(fd.status == Status::Optimal);
    CHECK(fd.objective == doctest::Approx(lp.objective).epsilon(1e-9));
    for (int i = 0; i < m.num_rows(); ++i)
        CHECK(fd.duals[i] == doctest::Approx(lp.duals[i]).epsilon(1e-9));
}

TEST_CASE("fixed integer duals: committed unit sets the balance price") {
    // One committed unit serving 10 MW at marginal cost 25.
    LinearModel m;
    int u = m.add_variable("u", 0.0, 1.0, 100.0, true);
    int p = m.add_variable("p", 0.0, kInf, 25.0);
    m.add_row(Sense::LessEqual, 0.0, {{p, 1.0}, {u, -50.0}});
    int balance = m.add_row(Sense::Equal, 10.0, {{p, 1.0}});
    SolverSettings st;
    st.rel_gap = 0.0;
    Solution inc = solve_milp(m, st);
    REQUIRE(inc.status == Status::Optimal);
    CHECK(inc.primal[u] == doctest::Approx(1.0));
    Solution fd = fixed_integer_duals(m, inc);
    REQUIRE(fd.status == Status::Optimal);
    CHECK(fd.duals[balance] == doctest::Approx(25.0));
}

TEST_CASE("two-bus congestion splits duals") {
    // Cheap unit at A, expensive at B, 10 MW line, 30 MW load at B.
    LinearModel m;
    int ga = m.add_variable("ga", 0.0, 100.0, 10.0);
    int gb = m.add_variable("gb", 0.0, 100.0, 50.0);
    int f = m.add_variable("flow", -10.0, 10.0, 0.0);
    int bal_a = m.add_row(Sense::Equal, 0.0, {{ga, 1.0}, {f, -1.0}});
    int bal_b = m.add_row(Sense::Equal, 30.0, {{gb, 1.0}, {f, 1.0}});
    Solution s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[f] == doctest::Approx(10.0));
    CHECK(s.duals[bal_a] == doctest::Approx(10.0));
    CHECK(s.duals[bal_b] == doctest::Approx(50.0));
    check_duality_properties(m, s);
}

TEST_CASE("lp text dump is written when requested") {
    LinearModel m;
    m.sense = Objective::Maximize;
    int x = m.add_variable("x", 0.0, 1.0, 2.0);
    m.add_row(Sense::LessEqual, 1.0, {{x, 1.0}}, "cap");
    std::string text = m.to_lp_text();
    CHECK(text.find("max:") != std::string::npos);
    CHECK(text.find("cap:") != std::string::npos);
}
