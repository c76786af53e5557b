// Shared test oracles: brute-force vertex enumeration for small LPs and
// exhaustive commitment enumeration for toy unit-commitment instances.
// These stay independent of the solver code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "iesmarket/lp.hpp"

namespace testsup {

// ---------------------------------------------------------------------------
// Vertex enumeration oracle. Requires every variable to carry finite bounds,
// so the feasible set is a polytope and the optimum (if any) sits at a vertex.
// ---------------------------------------------------------------------------

struct LinearSystemRow {
    std::vector<double> a;
    double b = 0.0;
};

// Solve an n x n dense system by Gaussian elimination; false if singular.
inline bool solve_dense(std::vector<LinearSystemRow> rows, std::vector<double>& x) {
    const int n = static_cast<int>(rows.size());
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        double best = 1e-10;
        for (int i = k; i < n; ++i) {
            double v = std::fabs(rows[i].a[k]);
            if (v > best) { best = v; piv = i; }
        }
        if (piv < 0) return false;
        std::swap(rows[k], rows[piv]);
        for (int i = k + 1; i < n; ++i) {
            double f = rows[i].a[k] / rows[k].a[k];
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) rows[i].a[j] -= f * rows[k].a[j];
            rows[i].b -= f * rows[k].b;
        }
    }
    x.assign(n, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        double s = rows[k].b;
        for (int j = k + 1; j < n; ++j) s -= rows[k].a[j] * x[j];
        x[k] = s / rows[k].a[k];
    }
    return true;
}

// Best objective over all feasible vertices, or nullopt when infeasible.
inline std::optional<double> vertex_enumeration_optimum(const ies::lp::LinearModel& m) {
    using namespace ies::lp;
    const int n = m.num_variables();

    struct Cand {
        std::vector<double> a;
        double b;
        bool equality;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < m.num_rows(); ++i) {
        const Row& r = m.row(i);
        Cand c;
        c.a.assign(n, 0.0);
        for (auto [j, v] : r.coefs) c.a[j] += v;
        c.b = r.rhs;
        c.equality = r.sense == Sense::Equal;
        cands.push_back(std::move(c));
    }
    for (int j = 0; j < n; ++j) {
        Cand lo, hi;
        lo.a.assign(n, 0.0); lo.a[j] = 1.0; lo.b = m.variable(j).lower; lo.equality = false;
        hi.a.assign(n, 0.0); hi.a[j] = 1.0; hi.b = m.variable(j).upper; hi.equality = false;
        cands.push_back(std::move(lo));
        cands.push_back(std::move(hi));
    }

    std::vector<int> forced;
    std::vector<int> optional_ids;
    for (size_t i = 0; i < cands.size(); ++i)
        (cands[i].equality ? forced : optional_ids).push_back(static_cast<int>(i));
    int need = n - static_cast<int>(forced.size());
    if (need < 0) return std::nullopt;

    std::optional<double> best;
    std::vector<int> pick(need);
    auto feasible = [&](const std::vector<double>& x) {
        for (int j = 0; j < n; ++j)
            if (x[j] < m.variable(j).lower - 1e-7 || x[j] > m.variable(j).upper + 1e-7)
                return false;
        for (int i = 0; i < m.num_rows(); ++i) {
            const Row& r = m.row(i);
            double lhs = 0.0;
            for (auto [j, v] : r.coefs) lhs += v * x[j];
            switch (r.sense) {
                case Sense::LessEqual: if (lhs > r.rhs + 1e-7) return false; break;
                case Sense::GreaterEqual: if (lhs < r.rhs - 1e-7) return false; break;
                case Sense::Equal: if (std::fabs(lhs - r.rhs) > 1e-7) return false; break;
            }
        }
        return true;
    };
    auto consider = [&](const std::vector<int>& active) {
        std::vector<LinearSystemRow> sys;
        for (int id : active) sys.push_back({cands[id].a, cands[id].b});
        std::vector<double> x;
        if (!solve_dense(std::move(sys), x)) return;
        for (double v : x)
            if (!std::isfinite(v)) return;
        if (!feasible(x)) return;
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += m.variable(j).objective * x[j];
        if (!best) best = obj;
        else if (m.sense == Objective::Maximize) best = std::max(*best, obj);
        else best = std::min(*best, obj);
    };

    // Enumerate all size-`need` subsets of the optional constraints.
    std::vector<int> idx(need);
    for (int i = 0; i < need; ++i) idx[i] = i;
    const int opt_n = static_cast<int>(optional_ids.size());
    if (need == 0) {
        consider(forced);
        return best;
    }
    if (opt_n < need) return std::nullopt;
    for (;;) {
        std::vector<int> active = forced;
        for (int i = 0; i < need; ++i) active.push_back(optional_ids[idx[i]]);
        consider(active);
        int i = need - 1;
        while (i >= 0 && idx[i] == opt_n - need + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int k = i + 1; k < need; ++k) idx[k] = idx[k - 1] + 1;
    }
    return best;
}

// Random box-bounded LP with a handful of rows.
inline ies::lp::LinearModel random_lp(std::mt19937_64& rng) {
    using namespace ies::lp;
    std::uniform_int_distribution<int> nvar(2, 8), nrow(1, 5), sense_pick(0, 2);
    std::uniform_real_distribution<double> coef(-5.0, 5.0), bound(0.5, 6.0), cost(-10.0, 10.0);
    std::bernoulli_distribution flip(0.5), use_coef(0.7);

    LinearModel m;
    m.sense = flip(rng) ? Objective::Maximize : Objective::Minimize;
    int n = nvar(rng);
    for (int j = 0; j < n; ++j) {
        double lo = -bound(rng), hi = bound(rng);
        m.add_variable("x" + std::to_string(j), lo, hi, cost(rng));
    }
    int rows = nrow(rng);
    for (int i = 0; i < rows; ++i) {
        std::vector<std::pair<int, double>> coefs;
        for (int j = 0; j < n; ++j)
            if (use_coef(rng)) coefs.emplace_back(j, coef(rng));
        if (coefs.empty()) coefs.emplace_back(0, 1.0);
        int s = sense_pick(rng);
        Sense sense = s == 0 ? Sense::LessEqual : (s == 1 ? Sense::GreaterEqual : Sense::Equal);
        // Equalities kept rare and consistent enough to leave room for vertices.
        if (sense == Sense::Equal && i > 0) sense = Sense::LessEqual;
        m.add_row(sense, coef(rng), std::move(coefs));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Toy unit commitment: 3 units, 6 periods, single bus, no ramps. Exhaustive
// enumeration over all 2^18 on/off patterns is the reference answer.
// ---------------------------------------------------------------------------

struct ToyUnit {
    double pmin, pmax;
    double cost;        // $/MWh
    double no_load;     // $/hr while on
    double startup;     // $ per start
    int min_up, min_down;
    bool init_on;
    int init_hours;     // time already spent in the initial state
};

struct ToyUc {
    std::vector<ToyUnit> units;
    std::vector<double> load;
    double shed_penalty = 1e4;
};

inline ToyUc random_toy_uc(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> cost(5.0, 50.0), pmin(5.0, 30.0), extra(20.0, 80.0);
    std::uniform_real_distribution<double> noload(0.0, 200.0), start(0.0, 500.0);
    std::uniform_int_distribution<int> updown(1, 3), inith(1, 3);
    std::bernoulli_distribution on(0.5);
    ToyUc uc;
    for (int g = 0; g < 3; ++g) {
        ToyUnit u;
        u.pmin = std::floor(pmin(rng));
        u.pmax = u.pmin + std::floor(extra(rng));
        u.cost = std::floor(cost(rng));
        u.no_load = std::floor(noload(rng));
        u.startup = std::floor(start(rng));
        u.min_up = updown(rng);
        u.min_down = updown(rng);
        u.init_on = on(rng);
        u.init_hours = inith(rng);
        uc.units.push_back(u);
    }
    std::uniform_real_distribution<double> load(30.0, 150.0);
    for (int t = 0; t < 6; ++t) uc.load.push_back(std::floor(load(rng)));
    return uc;
}

inline bool toy_pattern_feasible(const ToyUc& uc, const std::vector<std::vector<int>>& u) {
    const int T = static_cast<int>(uc.load.size());
    for (size_t g = 0; g < uc.units.size(); ++g) {
        const ToyUnit& un = uc.units[g];
        // Remaining obligation from the initial state.
        if (un.init_on && un.init_hours < un.min_up) {
            int must = un.min_up - un.init_hours;
            for (int t = 0; t < std::min(must, T); ++t)
                if (!u[g][t]) return false;
        }
        if (!un.init_on && un.init_hours < un.min_down) {
            int must = un.min_down - un.init_hours;
            for (int t = 0; t < std::min(must, T); ++t)
                if (u[g][t]) return false;
        }
        int prev = un.init_on ? 1 : 0;
        for (int t = 0; t < T; ++t) {
            if (u[g][t] && !prev) {  // startup: stay on (clipped at horizon)
                for (int k = t; k < std::min(t + un.min_up, T); ++k)
                    if (!u[g][k]) return false;
            }
            if (!u[g][t] && prev) {  // shutdown: stay off
                for (int k = t; k < std::min(t + un.min_down, T); ++k)
                    if (u[g][k]) return false;
            }
            prev = u[g][t];
        }
    }
    return true;
}

// Least-cost dispatch of one period for a fixed on/off set; nullopt when the
// committed minimums already exceed the load.
inline std::optional<double> toy_dispatch_cost(const ToyUc& uc,
                                               const std::vector<int>& on, double load) {
    double fixed = 0.0, min_sum = 0.0;
    for (size_t g = 0; g < uc.units.size(); ++g) {
        if (!on[g]) continue;
        fixed += uc.units[g].no_load + uc.units[g].cost * uc.units[g].pmin;
        min_sum += uc.units[g].pmin;
    }
    if (min_sum > load + 1e-9) return std::nullopt;
    double need = load - min_sum;
    std::vector<size_t> order;
    for (size_t g = 0; g < uc.units.size(); ++g)
        if (on[g]) order.push_back(g);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (uc.units[a].cost != uc.units[b].cost) return uc.units[a].cost < uc.units[b].cost;
        return a < b;
    });
    for (size_t g : order) {
        double take = std::min(need, uc.units[g].pmax - uc.units[g].pmin);
        fixed += take * uc.units[g].cost;
        need -= take;
        if (need <= 1e-12) break;
    }
    if (need > 1e-12) fixed += need * uc.shed_penalty;
    return fixed;
}

inline std::optional<double> toy_uc_enumerate(const ToyUc& uc) {
    const int T = static_cast<int>(uc.load.size());
    const int G = static_cast<int>(uc.units.size());
    std::optional<double> best;
    const uint32_t limit = 1u << (G * T);
    std::vector<std::vector<int>> u(G, std::vector<int>(T));
    for (uint32_t mask = 0; mask < limit; ++mask) {
        for (int g = 0; g < G; ++g)
            for (int t = 0; t < T; ++t) u[g][t] = (mask >> (g * T + t)) & 1u;
        if (!toy_pattern_feasible(uc, u)) continue;
        double cost = 0.0;
        bool ok = true;
        for (int t = 0; t < T && ok; ++t) {
            std::vector<int> on(G);
            for (int g = 0; g < G; ++g) on[g] = u[g][t];
            auto c = toy_dispatch_cost(uc, on, uc.load[t]);
            if (!c) { ok = false; break; }
            cost += *c;
        }
        if (!ok) continue;
        for (int g = 0; g < G; ++g) {
            int prev = uc.units[g].init_on ? 1 : 0;
            for (int t = 0; t < T; ++t) {
                if (u[g][t] && !prev) cost += uc.units[g].startup;
                prev = u[g][t];
            }
        }
        if (!best || cost < *best) best = cost;
    }
    return best;
}

// The matching mixed-integer model (Rajan-Takriti turn on/off windows).
inline ies::lp::LinearModel toy_uc_model(const ToyUc& uc) {
    using namespace ies::lp;
    const int T = static_cast<int>(uc.load.size());
    const int G = static_cast<int>(uc.units.size());
    LinearModel m;
    m.sense = Objective::Minimize;
    std::vector<std::vector<int>> u(G, std::vector<int>(T));
    std::vector<std::vector<int>> v(G, std::vector<int>(T));
    std::vector<std::vector<int>> p(G, std::vector<int>(T));
    std::vector<int> shed(T);
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            const ToyUnit& un = uc.units[g];
            double ulo = 0.0, uhi = 1.0;
            if (un.init_on && un.init_hours < un.min_up && t < un.min_up - un.init_hours)
                ulo = 1.0;
            if (!un.init_on && un.init_hours < un.min_down && t < un.min_down - un.init_hours)
                uhi = 0.0;
            u[g][t] = m.add_variable("u", ulo, uhi, un.no_load, true);
            v[g][t] = m.add_variable("v", 0.0, 1.0, un.startup);
            p[g][t] = m.add_variable("p", 0.0, kInf, un.cost);
        }
    }
    for (int t = 0; t < T; ++t) shed[t] = m.add_variable("shed", 0.0, uc.load[t], uc.shed_penalty);

    for (int g = 0; g < G; ++g) {
        const ToyUnit& un = uc.units[g];
        int u0 = un.init_on ? 1 : 0;
        for (int t = 0; t < T; ++t) {
            m.add_row(Sense::LessEqual, 0.0, {{p[g][t], 1.0}, {u[g][t], -un.pmax}});
            m.add_row(Sense::GreaterEqual, 0.0, {{p[g][t], 1.0}, {u[g][t], -un.pmin}});
            // v_t >= u_t - u_{t-1}
            if (t == 0)
                m.add_row(Sense::GreaterEqual, -u0, {{v[g][t], 1.0}, {u[g][t], -1.0}});
            else
                m.add_row(Sense::GreaterEqual, 0.0,
                          {{v[g][t], 1.0}, {u[g][t], -1.0}, {u[g][t - 1], 1.0}});
            // min up: sum of recent startups <= u_t
            {
                std::vector<std::pair<int, double>> c{{u[g][t], -1.0}};
                for (int k = std::max(0, t - un.min_up + 1); k <= t; ++k)
                    c.emplace_back(v[g][k], 1.0);
                m.add_row(Sense::LessEqual, 0.0, std::move(c));
            }
            // min down: sum of recent startups <= 1 - u_{t-DT}
            {
                std::vector<std::pair<int, double>> c;
                for (int k = std::max(0, t - un.min_down + 1); k <= t; ++k)
                    c.emplace_back(v[g][k], 1.0);
                int td = t - un.min_down;
                double rhs = 1.0;
                if (td >= 0) c.emplace_back(u[g][td], 1.0);
                else rhs = 1.0 - u0;
                m.add_row(Sense::LessEqual, rhs, std::move(c));
            }
        }
    }
    for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> c{{shed[t], 1.0}};
        for (int g = 0; g < G; ++g) c.emplace_back(p[g][t], 1.0);
        m.add_row(Sense::Equal, uc.load[t], std::move(c));
    }
    return m;
}

}  // namespace testsup
