// Branch-and-bound over the simplex engine.
//
// Most-fractional branching, best-bound node selection, warm starts from
// the parent basis, and a fix-and-resolve rounding heuristic at the root.
#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <vector>

#include "iesmarket/lp.hpp"

namespace ies::lp {


namespace {

using BoundChanges = std::vector<std::pair<int, std::pair<double, double>>>;

struct Node {
    double bound;  // parent LP objective, internal min sense
    long id;
    BoundChanges changes;
    std::shared_ptr<std::vector<uint8_t>> warm;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id > b.id;
    }
};

int most_fractional(const LinearModel& model, const std::vector<double>& x, double int_tol) {
    // Fractionality weighted by objective relevance: branching on the
    // costly ambivalent variables moves the bound far faster on
    // commitment-style models than plain most-fractional order.
    int pick = -1;
    double best = 0.0;
    for (int j = 0; j < model.num_variables(); ++j) {
        if (!model.variable(j).integral) continue;
        double frac = x[j] - std::floor(x[j]);
        double dist = std::min(frac, 1.0 - frac);
        if (dist <= int_tol) continue;
        double score = dist * (1.0 + std::fabs(model.variable(j).objective));
        if (pick < 0 || score > best + 1e-12) {
            best = score;
            pick = j;
        }
    }
    return pick;
}

double to_internal(const LinearModel& m, double obj) {
    return m.sense == Objective::Maximize ? -obj : obj;
}

double from_internal(const LinearModel& m, double obj) {
    return m.sense == Objective::Maximize ? -obj : obj;
}

void snap_integers(const LinearModel& model, std::vector<double>& x) {
    for (int j = 0; j < model.num_variables(); ++j)
        if (model.variable(j).integral) x[j] = std::round(x[j]);
}

}  // namespace

Solution solve_milp(const LinearModel& model, const SolverSettings& settings) {
    model.validate();
    if (!model.has_integers()) return solve_lp(model, settings);

    // Integral bound tightening.
    BoundChanges root_bounds;
    for (int j = 0; j < model.num_variables(); ++j) {
        const Variable& v = model.variable(j);
        if (!v.integral) continue;
        double lo = std::isfinite(v.lower) ? std::ceil(v.lower - settings.int_tol) : v.lower;
        double hi = std::isfinite(v.upper) ? std::floor(v.upper + settings.int_tol) : v.upper;
        if (lo > hi) {
            Solution s;
            s.status = Status::Infeasible;
            return s;
        }
        if (lo != v.lower || hi != v.upper) root_bounds.emplace_back(j, std::make_pair(lo, hi));
    }

    NodeSolver solver(model, settings);
    std::vector<uint8_t> root_status;
    Solution root = solver.solve(root_bounds, nullptr, &root_status);
    Solution best;
    best.status = Status::Infeasible;
    double incumbent = kInf;  // internal min sense
    long nodes = 0;
    std::vector<double> bound_log;

    if (root.status == Status::Unbounded) return root;
    if (root.status != Status::Optimal) return root;

    auto integral = [&](const std::vector<double>& x) {
        for (int j = 0; j < model.num_variables(); ++j) {
            if (!model.variable(j).integral) continue;
            double frac = x[j] - std::floor(x[j]);
            if (std::min(frac, 1.0 - frac) > settings.int_tol) return false;
        }
        return true;
    };

    auto accept = [&](Solution& cand) {
        double obj = to_internal(model, cand.objective);
        if (incumbent == kInf || obj < incumbent - 1e-12 * std::max(1.0, std::fabs(incumbent))) {
            incumbent = obj;
            snap_integers(model, cand.primal);
            best = cand;
            best.status = Status::Optimal;
        }
    };

    double root_bound = to_internal(model, root.objective);
    if (integral(root.primal)) {
        accept(root);
        best.mip_gap = 0.0;
        best.best_bound = best.objective;
        best.nodes = 1;
        best.bound_log = {best.objective};
        return best;
    }

    // Rounding heuristic: pin integers at the rounded relaxation and re-solve.
    {
        BoundChanges fix = root_bounds;
        bool ok = true;
        for (int j = 0; j < model.num_variables(); ++j) {
            const Variable& v = model.variable(j);
            if (!v.integral) continue;
            double r = std::round(root.primal[j]);
            r = std::clamp(r, v.lower, v.upper);
            fix.emplace_back(j, std::make_pair(r, r));
            if (!std::isfinite(r)) ok = false;
        }
        if (ok) {
            Solution h = solver.solve(fix, &root_status, nullptr);
            if (h.status == Status::Optimal) accept(h);
#ifdef IES_MILP_TRACE
            fprintf(stderr, "[fixsolve] status=%d obj=%.2f\n", (int)h.status,
                    h.status == Status::Optimal ? to_internal(model, h.objective) : -1.0);
#endif
        }
    }

    // Diving heuristics: pin one fractional variable at a time, re-solving
    // warm. Pass 0 fixes the most-integral variable first, pass 1 the most
    // ambivalent one; the incumbent keeps the best of both.
    for (int dive_pass = 0; dive_pass < 2; ++dive_pass) {
        std::vector<std::pair<double, double>> cur_bounds;
        cur_bounds.reserve(model.num_variables());
        for (int j = 0; j < model.num_variables(); ++j)
            cur_bounds.emplace_back(model.variable(j).lower, model.variable(j).upper);
        for (const auto& [j, lh] : root_bounds) cur_bounds[j] = lh;

        BoundChanges fix = root_bounds;
        std::vector<uint8_t> dive_status = root_status;
        Solution cur = root;
        std::vector<char> blocked(model.num_variables(), 0);
        const int max_steps = 3 * model.num_variables() + 16;
        for (int step = 0; step < max_steps; ++step) {
            int pick = -1;
            double best_dist = dive_pass == 0 ? 1.0 : -1.0;
            bool any_fractional = false;
            for (int j = 0; j < model.num_variables(); ++j) {
                if (!model.variable(j).integral) continue;
                double frac = cur.primal[j] - std::floor(cur.primal[j]);
                double dist = std::min(frac, 1.0 - frac);
                if (dist <= settings.int_tol) continue;
                any_fractional = true;
                if (blocked[j]) continue;
                if (dive_pass == 0 ? dist < best_dist : dist > best_dist) {
                    best_dist = dist;
                    pick = j;
                }
            }
            if (!any_fractional) {
#ifdef IES_MILP_TRACE
                fprintf(stderr, "[dive] integral after %d steps, obj=%.2f\n", step,
                        to_internal(model, cur.objective));
#endif
                accept(cur);
                break;
            }
            if (pick < 0) {
#ifdef IES_MILP_TRACE
                fprintf(stderr, "[dive] blocked at step %d\n", step);
#endif
                break;  // every fractional variable is blocked
            }
            double r = std::clamp(std::round(cur.primal[pick]), cur_bounds[pick].first,
                                  cur_bounds[pick].second);
            double other = cur.primal[pick] > r ? r + 1.0 : r - 1.0;
            bool other_ok =
                other >= cur_bounds[pick].first && other <= cur_bounds[pick].second;
            double cur_obj = to_internal(model, cur.objective);
            // A jump larger than this suggests a relief penalty got locked in;
            // evaluate the opposite side before committing.
            double jump_tol = 0.005 * std::max(1.0, std::fabs(cur_obj));

            fix.emplace_back(pick, std::make_pair(r, r));
            std::vector<uint8_t> status_r = dive_status;
            Solution nxt = solver.solve(fix, &dive_status, &status_r);
            bool r_ok = nxt.status == Status::Optimal;
            double obj_r = r_ok ? to_internal(model, nxt.objective) : kInf;
            if (other_ok && (!r_ok || obj_r > cur_obj + jump_tol)) {
                fix.back().second = std::make_pair(other, other);
                std::vector<uint8_t> status_o = dive_status;
                Solution alt = solver.solve(fix, &dive_status, &status_o);
                if (alt.status == Status::Optimal &&
                    to_internal(model, alt.objective) < obj_r) {
                    cur_bounds[pick] = {other, other};
                    cur = std::move(alt);
                    dive_status = std::move(status_o);
                    continue;
                }
                fix.back().second = std::make_pair(r, r);
            }
            if (!r_ok) {
                fix.pop_back();
                blocked[pick] = 1;
                continue;
            }
            cur_bounds[pick] = {r, r};
            cur = std::move(nxt);
            dive_status = std::move(status_r);
        }
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    {
        int j = most_fractional(model, root.primal, settings.int_tol);
        double x = root.primal[j];
        auto warm = std::make_shared<std::vector<uint8_t>>(root_status);
        Node down{root_bound, next_id++, root_bounds, warm};
        down.changes.emplace_back(j, std::make_pair(model.variable(j).lower, std::floor(x)));
        Node up{root_bound, next_id++, root_bounds, warm};
        up.changes.emplace_back(j, std::make_pair(std::ceil(x), model.variable(j).upper));
        open.push(std::move(down));
        open.push(std::move(up));
    }

    const double gap_eps = 1e-9;
    auto rel_gap = [&](double inc, double bound) {
        return (inc - bound) / std::max(1e-10, std::fabs(inc));
    };

    bool budget_hit = false;
    while (!open.empty()) {
        double global_bound = std::min(incumbent, open.top().bound);
        bound_log.push_back(from_internal(model, global_bound));
#ifdef IES_MILP_TRACE
        if (nodes % 50 == 0)
            fprintf(stderr, "[bb] nodes=%ld open=%zu bound=%.2f inc=%.2f\n", nodes,
                    open.size(), global_bound, incumbent);
#endif
        if (incumbent < kInf && rel_gap(incumbent, global_bound) <= settings.rel_gap + gap_eps)
            break;
        if (nodes >= settings.max_nodes) {
            budget_hit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (incumbent < kInf &&
            incumbent - node.bound <= settings.rel_gap * std::max(1e-10, std::fabs(incumbent)) +
                                          gap_eps * std::max(1.0, std::fabs(incumbent)))
            continue;
        ++nodes;

        Solution sol = solver.solve(node.changes, node.warm.get(), &root_status);
        if (sol.status != Status::Optimal) continue;  // infeasible subtree
        double bound = to_internal(model, sol.objective);
        if (incumbent < kInf &&
            incumbent - bound <= settings.rel_gap * std::max(1e-10, std::fabs(incumbent)) +
                                     gap_eps * std::max(1.0, std::fabs(incumbent)))
            continue;
        if (integral(sol.primal)) {
            accept(sol);
            continue;
        }
        int j = most_fractional(model, sol.primal, settings.int_tol);
        if (j < 0) {  // fractional only within tolerance
            accept(sol);
            continue;
        }
        double x = sol.primal[j];
        auto warm = std::make_shared<std::vector<uint8_t>>(root_status);
        // Branch bounds compose with any earlier change on the same variable.
        double cur_lo = model.variable(j).lower, cur_hi = model.variable(j).upper;
        for (const auto& [v, lh] : node.changes)
            if (v == j) { cur_lo = lh.first; cur_hi = lh.second; }
        Node down{bound, next_id++, node.changes, warm};
        down.changes.emplace_back(j, std::make_pair(cur_lo, std::floor(x)));
        Node up{bound, next_id++, node.changes, warm};
        up.changes.emplace_back(j, std::make_pair(std::ceil(x), cur_hi));
        if (std::floor(x) >= cur_lo - 0.5) open.push(std::move(down));
        if (std::ceil(x) <= cur_hi + 0.5) open.push(std::move(up));
    }

    double final_bound = incumbent;
    if (!open.empty()) final_bound = std::min(final_bound, open.top().bound);

    if (incumbent == kInf) {
        Solution s;
        s.status = budget_hit ? Status::GapLimit : Status::Infeasible;
        s.nodes = nodes;
        s.bound_log = bound_log;
        return s;
    }
    best.best_bound = from_internal(model, final_bound);
    best.mip_gap = rel_gap(incumbent, final_bound);
    best.nodes = nodes;
    best.bound_log = bound_log;
    if (budget_hit && best.mip_gap > settings.rel_gap + gap_eps) best.status = Status::GapLimit;
    return best;
}

Solution fixed_integer_duals(const LinearModel& model, const Solution& incumbent,
                             const SolverSettings& settings) {
    if (incumbent.primal.size() != static_cast<size_t>(model.num_variables()))
        throw InputError("fixed_integer_duals: incumbent does not match model");
    LinearModel fixed = model;
    for (int j = 0; j < fixed.num_variables(); ++j) {
        Variable& v = fixed.variable(j);
        if (!v.integral) continue;
        double r = std::round(incumbent.primal[j]);
        v.integral = false;
        v.lower = r;
        v.upper = r;
    }
    return solve_lp(fixed, settings);
}

}  // namespace ies::lp
