// Bounded-variable revised simplex with an LU basis factorization.
//
// The factorization peels row/column singletons (scheduling bases are
// mostly triangular) and eliminates the residual bump with sparse
// Markowitz pivoting, with product-form eta updates between
// refactorizations.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "iesmarket/lp.hpp"

namespace ies::lp {

namespace {

constexpr double kPivotAccept = 1e-8;   // smallest pivot taken without a refactor retry
constexpr double kAlphaTol = 1e-10;     // entries below this do not block the ratio test
constexpr double kDropTol = 1e-13;
constexpr int kRefactorEvery = 128;
constexpr int kBlandTrigger = 600;      // consecutive degenerate steps before Bland's rule

enum VarStatus : uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeNb = 3 };

struct SparseCol {
    std::vector<int> row;
    std::vector<double> val;
};

class BasisFactor {
  public:
    // cols[p] is the column of the variable occupying basis position p.
    bool factorize(const std::vector<const SparseCol*>& cols, int m);

    // Solve B x = v. Input indexed by row, output indexed by basis position.
    void ftran(std::vector<double>& v) const;
    // Solve B' y = c. Input indexed by basis position, output indexed by row.
    void btran(std::vector<double>& v) const;

  private:
    int m_ = 0;
    std::vector<int> piv_row_, piv_pos_;
    std::vector<double> piv_val_;
    std::vector<int> mult_start_, mult_row_;
    std::vector<double> mult_val_;
    std::vector<int> urow_start_, urow_pos_;
    std::vector<double> urow_val_;
    mutable std::vector<double> f_;
};

bool BasisFactor::factorize(const std::vector<const SparseCol*>& cols, int m) {
    m_ = m;
    piv_row_.clear(); piv_pos_.clear(); piv_val_.clear();
    mult_start_.assign(1, 0); mult_row_.clear(); mult_val_.clear();
    urow_start_.assign(1, 0); urow_pos_.clear(); urow_val_.clear();
    f_.assign(m, 0.0);
    if (m == 0) return true;

    // Row-wise view of the basis matrix.
    std::vector<int> row_cnt(m, 0);
    for (int p = 0; p < m; ++p)
        for (int r : cols[p]->row) row_cnt[r]++;
    std::vector<int> row_start(m + 1, 0);
    for (int r = 0; r < m; ++r) row_start[r + 1] = row_start[r] + row_cnt[r];
    std::vector<int> row_pos(row_start[m]);
    std::vector<double> row_val(row_start[m]);
    {
        std::vector<int> fill = row_start;
        for (int p = 0; p < m; ++p) {
            const SparseCol& c = *cols[p];
            for (size_t k = 0; k < c.row.size(); ++k) {
                int r = c.row[k];
                row_pos[fill[r]] = p;
                row_val[fill[r]] = c.val[k];
                fill[r]++;
            }
        }
    }

    std::vector<uint8_t> row_active(m, 1), pos_active(m, 1);
    std::vector<int> row_nnz = row_cnt;
    std::vector<int> col_nnz(m);
    for (int p = 0; p < m; ++p) col_nnz[p] = static_cast<int>(cols[p]->row.size());

    std::vector<int> colq, rowq;
    colq.reserve(m); rowq.reserve(m);
    for (int p = 0; p < m; ++p)
        if (col_nnz[p] == 1) colq.push_back(p);
    for (int r = 0; r < m; ++r)
        if (row_nnz[r] == 1) rowq.push_back(r);

    int done = 0;
    while (done < m) {
        int pick_pos = -1, pick_row = -1;
        bool col_single = false;
        while (!colq.empty()) {
            int p = colq.back(); colq.pop_back();
            if (pos_active[p] && col_nnz[p] == 1) { pick_pos = p; col_single = true; break; }
        }
        if (pick_pos < 0) {
            while (!rowq.empty()) {
                int r = rowq.back(); rowq.pop_back();
                if (row_active[r] && row_nnz[r] == 1) { pick_row = r; break; }
            }
        }

        if (col_single) {
            const SparseCol& c = *cols[pick_pos];
            double pv = 0.0;
            for (size_t k = 0; k < c.row.size(); ++k)
                if (row_active[c.row[k]]) { pick_row = c.row[k]; pv = c.val[k]; break; }
            if (pick_row < 0 || std::fabs(pv) < kDropTol) return false;
            piv_row_.push_back(pick_row);
            piv_pos_.push_back(pick_pos);
            piv_val_.push_back(pv);
            mult_start_.push_back(static_cast<int>(mult_row_.size()));
            row_active[pick_row] = 0;
            pos_active[pick_pos] = 0;
            for (int k = row_start[pick_row]; k < row_start[pick_row + 1]; ++k) {
                int p = row_pos[k];
                if (!pos_active[p]) continue;
                urow_pos_.push_back(p);
                urow_val_.push_back(row_val[k]);
                if (--col_nnz[p] == 1) colq.push_back(p);
            }
            urow_start_.push_back(static_cast<int>(urow_pos_.size()));
            ++done;
        } else if (pick_row >= 0) {
            int r = pick_row;
            int pos = -1;
            double pv = 0.0;
            for (int k = row_start[r]; k < row_start[r + 1]; ++k)
                if (pos_active[row_pos[k]]) { pos = row_pos[k]; pv = row_val[k]; break; }
            if (pos < 0 || std::fabs(pv) < kDropTol) return false;
            piv_row_.push_back(r);
            piv_pos_.push_back(pos);
            piv_val_.push_back(pv);
            row_active[r] = 0;
            pos_active[pos] = 0;
            const SparseCol& c = *cols[pos];
            for (size_t k = 0; k < c.row.size(); ++k) {
                int i = c.row[k];
                if (!row_active[i]) continue;
                mult_row_.push_back(i);
                mult_val_.push_back(c.val[k] / pv);
                if (--row_nnz[i] == 1) rowq.push_back(i);
            }
            mult_start_.push_back(static_cast<int>(mult_row_.size()));
            urow_start_.push_back(static_cast<int>(urow_pos_.size()));
            ++done;
        } else {
            // Sparse Markowitz elimination on the bump. Staircase bases
            // peel almost completely; what remains is eliminated with
            // min-fill pivoting so chains never densify.
            std::vector<int> bcols;
            for (int p = 0; p < m; ++p)
                if (pos_active[p]) bcols.push_back(p);
            const int q = static_cast<int>(bcols.size());
            {
                int act_rows = 0;
                for (int r = 0; r < m; ++r) act_rows += row_active[r];
                if (act_rows != q) return false;
            }
#ifdef IES_FACTOR_PROF
            fprintf(stderr, "[factor] m=%d bump=%d\n", m, q);
#endif
            // Working rows restricted to active entries.
            std::vector<std::vector<std::pair<int, double>>> wrow(m);
            std::vector<std::vector<int>> col_rows(m);
            std::vector<int> wcol_nnz(m, 0);
            for (int p : bcols) {
                const SparseCol& c = *cols[p];
                for (size_t k = 0; k < c.row.size(); ++k) {
                    int r = c.row[k];
                    if (!row_active[r]) continue;
                    wrow[r].emplace_back(p, c.val[k]);
                    col_rows[p].push_back(r);
                    wcol_nnz[p]++;
                }
            }
            std::vector<double> merge_val(m, 0.0);
            std::vector<uint8_t> merge_has(m, 0);

            for (int step = 0; step < q; ++step) {
                // Pivot choice: smallest Markowitz product among stable
                // candidates, scanning columns in nnz order.
                int best_col = -1, best_row = -1;
                double best_val = 0.0;
                long best_score = -1;
                for (int p : bcols) {
                    if (!pos_active[p]) continue;
                    if (best_score >= 0 && static_cast<long>(wcol_nnz[p]) - 1 >
                                               best_score)
                        continue;
                    // Column magnitude for the stability threshold.
                    double colmax = 0.0;
                    for (size_t ci = 0; ci < col_rows[p].size(); ++ci) {
                        int r = col_rows[p][ci];
                        if (!row_active[r]) continue;
                        for (const auto& [cc, vv] : wrow[r])
                            if (cc == p) colmax = std::max(colmax, std::fabs(vv));
                    }
                    if (colmax < kDropTol) continue;
                    for (size_t ci = 0; ci < col_rows[p].size(); ++ci) {
                        int r = col_rows[p][ci];
                        if (!row_active[r]) continue;
                        double v = 0.0;
                        bool found = false;
                        for (const auto& [cc, vv] : wrow[r])
                            if (cc == p) { v = vv; found = true; break; }
                        if (!found || std::fabs(v) < 0.05 * colmax) continue;
                        long score = static_cast<long>(wcol_nnz[p] - 1) *
                                     (static_cast<long>(wrow[r].size()) - 1);
                        if (best_score < 0 || score < best_score ||
                            (score == best_score && std::fabs(v) > std::fabs(best_val))) {
                            best_score = score;
                            best_col = p;
                            best_row = r;
                            best_val = v;
                        }
                    }
                    if (best_score == 0) break;  // cannot improve on zero fill
                }
                if (best_col < 0) return false;  // singular bump

                const int pr = best_row, pc = best_col;
                const double pv = best_val;
                piv_row_.push_back(pr);
                piv_pos_.push_back(pc);
                piv_val_.push_back(pv);
                row_active[pr] = 0;
                pos_active[pc] = 0;

                // The pivot row, split into urow entries (active columns).
                std::vector<std::pair<int, double>> prow;
                for (const auto& [cc, vv] : wrow[pr]) {
                    if (cc == pc || !pos_active[cc]) continue;
                    prow.emplace_back(cc, vv);
                    urow_pos_.push_back(cc);
                    urow_val_.push_back(vv);
                    wcol_nnz[cc]--;
                }
                urow_start_.push_back(static_cast<int>(urow_pos_.size()));

                // Eliminate the pivot column from every other active row.
                for (size_t ci = 0; ci < col_rows[pc].size(); ++ci) {
                    int r = col_rows[pc][ci];
                    if (!row_active[r]) continue;
                    double v = 0.0;
                    size_t at = wrow[r].size();
                    for (size_t k = 0; k < wrow[r].size(); ++k)
                        if (wrow[r][k].first == pc) { v = wrow[r][k].second; at = k; break; }
                    if (at == wrow[r].size() || std::fabs(v) < kDropTol) continue;
                    double lam = v / pv;
                    mult_row_.push_back(r);
                    mult_val_.push_back(lam);
                    // row_r -= lam * prow, with the pivot entry removed.
                    wrow[r][at] = wrow[r].back();
                    wrow[r].pop_back();
                    if (!prow.empty()) {
                        for (const auto& [cc, vv] : wrow[r]) {
                            merge_val[cc] = vv;
                            merge_has[cc] = 1;
                        }
                        for (const auto& [cc, vv] : prow) {
                            if (merge_has[cc]) {
                                merge_val[cc] -= lam * vv;
                            } else {
                                double nv = -lam * vv;
                                if (std::fabs(nv) > kDropTol) {
                                    wrow[r].emplace_back(cc, nv);
                                    merge_val[cc] = nv;
                                    merge_has[cc] = 1;
                                    col_rows[cc].push_back(r);
                                    wcol_nnz[cc]++;
                                }
                            }
                        }
                        size_t w = 0;
                        for (size_t k = 0; k < wrow[r].size(); ++k) {
                            int cc = wrow[r][k].first;
                            double nv = merge_val[cc];
                            if (std::fabs(nv) > kDropTol) {
                                wrow[r][w++] = {cc, nv};
                            } else {
                                wcol_nnz[cc]--;
                            }
                        }
                        wrow[r].resize(w);
                        for (const auto& [cc, vv] : prow) merge_has[cc] = 0;
                        for (const auto& [cc, vv] : wrow[r]) merge_has[cc] = 0;
                        // Reset markers for entries that were dropped.
                        for (const auto& [cc, vv] : prow) merge_val[cc] = 0.0;
                    }
                }
                mult_start_.push_back(static_cast<int>(mult_row_.size()));
                done += 1;
            }
        }
    }
    return true;
}

void BasisFactor::ftran(std::vector<double>& v) const {
    const int m = m_;
    // L pass in pivot order.
    for (int k = 0; k < m; ++k) {
        double t = v[piv_row_[k]];
        f_[k] = t;
        if (t == 0.0) continue;
        for (int s = mult_start_[k]; s < mult_start_[k + 1]; ++s)
            v[mult_row_[s]] -= mult_val_[s] * t;
    }
    // U pass in reverse; results keyed by basis position.
    for (int k = m - 1; k >= 0; --k) {
        double t = f_[k];
        for (int s = urow_start_[k]; s < urow_start_[k + 1]; ++s)
            t -= urow_val_[s] * v[urow_pos_[s]];
        v[piv_pos_[k]] = t / piv_val_[k];
    }
    // Positions not assigned above were overwritten in place; every position
    // is a pivot position exactly once, so v is now fully position-indexed.
}

void BasisFactor::btran(std::vector<double>& v) const {
    const int m = m_;
    // U' pass.
    for (int k = 0; k < m; ++k) {
        double z = v[piv_pos_[k]] / piv_val_[k];
        f_[k] = z;
        if (z == 0.0) continue;
        for (int s = urow_start_[k]; s < urow_start_[k + 1]; ++s)
            v[urow_pos_[s]] -= urow_val_[s] * z;
    }
    // L' pass in reverse; results keyed by row.
    for (int k = m - 1; k >= 0; --k) {
        double t = f_[k];
        for (int s = mult_start_[k]; s < mult_start_[k + 1]; ++s)
            t -= mult_val_[s] * v[mult_row_[s]];
        v[piv_row_[k]] = t;
    }
}

struct Eta {
    int pos = -1;
    double pivot = 0.0;
    std::vector<std::pair<int, double>> terms;  // position, value (pivot excluded)
};

}  // namespace

// Internal bounded-variable simplex over the model plus one slack per row.
class SimplexEngine {
  public:
    SimplexEngine(const LinearModel& model, const SolverSettings& settings);

    enum class Outcome { Optimal, Infeasible, Unbounded };
    Outcome run(const std::vector<uint8_t>* warm_status);

    void set_bounds(int var, double lo, double hi);
    void reset_bounds() { lo_ = lo0_; hi_ = hi0_; }
    void snapshot_bounds() { lo0_ = lo_; hi0_ = hi_; }
    double lower(int var) const { return lo_[var]; }
    double upper(int var) const { return hi_[var]; }

    Solution extract(const LinearModel& model, Outcome outcome) const;
    std::vector<uint8_t> status_snapshot() const { return vstat_; }
    long iterations() const { return iterations_; }

  private:
    double nb_value(int j) const {
        switch (vstat_[j]) {
            case kAtLower: return lo_[j];
            case kAtUpper: return hi_[j];
            default: return 0.0;
        }
    }
    void setup_basis(const std::vector<uint8_t>* warm_status);
    void refactorize();
    void compute_xb();
    void ftran_full(std::vector<double>& v) const;
    void btran_full(std::vector<double>& v) const;
    double infeasibility() const;
    bool price(const std::vector<double>& y, bool phase1, bool bland, int& enter,
               int& dir) const;
    // Returns false when the step is unblocked (unbounded direction).
    bool ratio(int enter, int dir, const std::vector<double>& alpha, bool phase1,
               double& theta, int& leave_pos, uint8_t& leave_to, bool& flip) const;
    void apply(int enter, int dir, double theta, int leave_pos, uint8_t leave_to,
               bool flip, std::vector<double>& alpha);

    int n_ = 0, m_ = 0, total_ = 0;
    bool maximize_ = false;
    double feas_tol_ = 1e-9, opt_tol_ = 1e-9;
    long max_iter_ = 0;
    std::vector<SparseCol> cols_;
    std::vector<double> lo_, hi_, cost_, b_;
    std::vector<double> lo0_, hi0_;
    std::vector<uint8_t> vstat_;
    std::vector<int> basic_, varpos_;
    std::vector<double> xb_;
    BasisFactor factor_;
    std::vector<Eta> etas_;
    long iterations_ = 0;
    mutable int price_cursor_ = 0;
    mutable std::vector<double> work_;
};

SimplexEngine::SimplexEngine(const LinearModel& model, const SolverSettings& settings) {
    n_ = model.num_variables();
    m_ = model.num_rows();
    total_ = n_ + m_;
    maximize_ = model.sense == Objective::Maximize;

    cols_.resize(total_);
    lo_.resize(total_);
    hi_.resize(total_);
    cost_.assign(total_, 0.0);
    b_.resize(m_);

    double cscale = 1.0, bscale = 1.0;
    for (int j = 0; j < n_; ++j) {
        const Variable& v = model.variable(j);
        lo_[j] = v.lower;
        hi_[j] = v.upper;
        cost_[j] = maximize_ ? -v.objective : v.objective;
        cscale = std::max(cscale, std::fabs(cost_[j]));
    }
    for (int i = 0; i < m_; ++i) {
        const Row& r = model.row(i);
        b_[i] = r.rhs;
        bscale = std::max(bscale, std::fabs(r.rhs));
        for (auto [j, a] : r.coefs) {
            if (a == 0.0) continue;
            cols_[j].row.push_back(i);
            cols_[j].val.push_back(a);
        }
        int s = n_ + i;
        cols_[s].row.push_back(i);
        cols_[s].val.push_back(1.0);
        switch (r.sense) {
            case Sense::LessEqual: lo_[s] = 0.0; hi_[s] = kInf; break;
            case Sense::GreaterEqual: lo_[s] = -kInf; hi_[s] = 0.0; break;
            case Sense::Equal: lo_[s] = 0.0; hi_[s] = 0.0; break;
        }
    }
    // Duplicate (j, a) pairs within a row would corrupt the column store;
    // merge them here so callers may add coefficients incrementally.
    for (int j = 0; j < total_; ++j) {
        auto& c = cols_[j];
        if (c.row.size() < 2) continue;
        bool sorted = true;
        for (size_t k = 1; k < c.row.size(); ++k)
            if (c.row[k] <= c.row[k - 1]) { sorted = false; break; }
        if (sorted) continue;
        std::vector<std::pair<int, double>> merged;
        merged.reserve(c.row.size());
        for (size_t k = 0; k < c.row.size(); ++k) merged.emplace_back(c.row[k], c.val[k]);
        std::sort(merged.begin(), merged.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        c.row.clear(); c.val.clear();
        for (auto& [r, a] : merged) {
            if (!c.row.empty() && c.row.back() == r) c.val.back() += a;
            else { c.row.push_back(r); c.val.push_back(a); }
        }
    }

    lo0_ = lo_;
    hi0_ = hi_;
    feas_tol_ = 1e-9 * std::max(1.0, bscale);
    opt_tol_ = 1e-9 * std::max(1.0, cscale);
    max_iter_ = settings.max_iterations > 0
                    ? settings.max_iterations
                    : 400L * (n_ + m_) + 20000L;
    work_.assign(m_, 0.0);
}

void SimplexEngine::set_bounds(int var, double lo, double hi) {
    lo_[var] = lo;
    hi_[var] = hi;
}

void SimplexEngine::setup_basis(const std::vector<uint8_t>* warm_status) {
    vstat_.assign(total_, kAtLower);
    if (warm_status && static_cast<int>(warm_status->size()) == total_) {
        int nb = 0;
        for (uint8_t s : (*warm_status))
            if (s == kBasic) ++nb;
        if (nb == m_) vstat_ = *warm_status;
        else warm_status = nullptr;
    } else {
        warm_status = nullptr;
    }
    if (!warm_status) {
        for (int j = 0; j < n_; ++j) {
            if (lo_[j] > -kInf) vstat_[j] = kAtLower;
            else if (hi_[j] < kInf) vstat_[j] = kAtUpper;
            else vstat_[j] = kFreeNb;
        }
        for (int i = 0; i < m_; ++i) vstat_[n_ + i] = kBasic;
    } else {
        // Statuses may refer to bounds that have since moved; repair.
        for (int j = 0; j < total_; ++j) {
            if (vstat_[j] == kBasic) continue;
            if (vstat_[j] == kAtLower && lo_[j] <= -kInf)
                vstat_[j] = hi_[j] < kInf ? kAtUpper : kFreeNb;
            else if (vstat_[j] == kAtUpper && hi_[j] >= kInf)
                vstat_[j] = lo_[j] > -kInf ? kAtLower : kFreeNb;
            else if (vstat_[j] == kFreeNb && (lo_[j] > -kInf || hi_[j] < kInf))
                vstat_[j] = lo_[j] > -kInf ? kAtLower : kAtUpper;
        }
    }
    basic_.clear();
    varpos_.assign(total_, -1);
    for (int j = 0; j < total_; ++j) {
        if (vstat_[j] == kBasic) {
            varpos_[j] = static_cast<int>(basic_.size());
            basic_.push_back(j);
        }
    }
    refactorize();
    compute_xb();
}

void SimplexEngine::refactorize() {
    std::vector<const SparseCol*> bc(m_);
    for (int p = 0; p < m_; ++p) bc[p] = &cols_[basic_[p]];
    if (!factor_.factorize(bc, m_)) {
        // Singular warm basis: fall back to the all-slack basis.
        for (int j = 0; j < total_; ++j) {
            if (vstat_[j] != kBasic) continue;
            vstat_[j] = lo_[j] > -kInf ? kAtLower : (hi_[j] < kInf ? kAtUpper : kFreeNb);
        }
        basic_.clear();
        varpos_.assign(total_, -1);
        for (int i = 0; i < m_; ++i) {
            int s = n_ + i;
            vstat_[s] = kBasic;
            varpos_[s] = i;
            basic_.push_back(s);
        }
        for (int p = 0; p < m_; ++p) bc[p] = &cols_[basic_[p]];
        if (!factor_.factorize(bc, m_))
            throw SolverError("basis factorization failed");
    }
    etas_.clear();
}

void SimplexEngine::ftran_full(std::vector<double>& v) const {
    factor_.ftran(v);
    for (const Eta& e : etas_) {
        double t = v[e.pos] / e.pivot;
        if (t != 0.0)
            for (auto [p, a] : e.terms) v[p] -= a * t;
        v[e.pos] = t;
    }
}

void SimplexEngine::btran_full(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double t = v[it->pos];
        for (auto [p, a] : it->terms) t -= a * v[p];
        v[it->pos] = t / it->pivot;
    }
    factor_.btran(v);
}

void SimplexEngine::compute_xb() {
    std::vector<double>& v = work_;
    v.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) v[i] = b_[i];
    for (int j = 0; j < total_; ++j) {
        if (vstat_[j] == kBasic) continue;
        double x = nb_value(j);
        if (x == 0.0) continue;
        const SparseCol& c = cols_[j];
        for (size_t k = 0; k < c.row.size(); ++k) v[c.row[k]] -= c.val[k] * x;
    }
    ftran_full(v);
    xb_ = v;
}

double SimplexEngine::infeasibility() const {
    double inf = 0.0;
    for (int p = 0; p < m_; ++p) {
        int j = basic_[p];
        if (xb_[p] < lo_[j]) inf += lo_[j] - xb_[p];
        else if (xb_[p] > hi_[j]) inf += xb_[p] - hi_[j];
    }
    return inf;
}

bool SimplexEngine::price(const std::vector<double>& y, bool phase1, bool bland,
                          int& enter, int& dir) const {
    enter = -1;
    dir = 0;
    const double tol = phase1 ? 1e-9 : opt_tol_;
    double best = tol;
    auto consider = [&](int j) {
        uint8_t s = vstat_[j];
        if (s == kBasic) return false;
        if (lo_[j] == hi_[j]) return false;  // fixed, never enters
        double rd = phase1 ? 0.0 : cost_[j];
        const SparseCol& c = cols_[j];
        for (size_t k = 0; k < c.row.size(); ++k) rd -= c.val[k] * y[c.row[k]];
        int d = 0;
        double score = 0.0;
        if (s == kAtLower) {
            if (rd < -best) { d = 1; score = -rd; }
        } else if (s == kAtUpper) {
            if (rd > best) { d = -1; score = rd; }
        } else {  // free at zero
            if (rd < -best) { d = 1; score = -rd; }
            else if (rd > best) { d = -1; score = rd; }
        }
        if (d != 0) {
            best = score;
            enter = j;
            dir = d;
            return true;
        }
        return false;
    };
    if (bland) {
        for (int j = 0; j < total_; ++j)
            if (consider(j)) return true;  // lowest eligible index
        return false;
    }
    // Rotating block pricing: Dantzig within a block, full sweep before
    // declaring optimality. Large models avoid an O(n) scan per pivot.
    const int block = std::max(1024, total_ / 16);
    int scanned = 0;
    int j = price_cursor_;
    while (scanned < total_) {
        int in_block = 0;
        bool found = false;
        while (in_block < block && scanned < total_) {
            if (consider(j)) found = true;
            j = j + 1 == total_ ? 0 : j + 1;
            ++in_block;
            ++scanned;
        }
        if (found) {
            price_cursor_ = j;
            return true;
        }
    }
    return false;
}

bool SimplexEngine::ratio(int enter, int dir, const std::vector<double>& alpha,
                          bool phase1, double& theta, int& leave_pos,
                          uint8_t& leave_to, bool& flip) const {
    theta = kInf;
    leave_pos = -1;
    leave_to = kAtLower;
    flip = false;
    int leave_var = total_;

    double range = hi_[enter] - lo_[enter];
    if (std::isfinite(range)) {
        theta = range;
        flip = true;
        leave_var = enter;
    }

    for (int p = 0; p < m_; ++p) {
        double a = alpha[p];
        if (std::fabs(a) < kAlphaTol) continue;
        double delta = -dir * a;  // d xb[p] / d theta
        int j = basic_[p];
        double x = xb_[p], l = lo_[j], h = hi_[j];
        double t = kInf;
        uint8_t to = kAtLower;
        if (phase1 && x < l - feas_tol_) {
            if (delta > 0) { t = (l - x) / delta; to = kAtLower; }
        } else if (phase1 && x > h + feas_tol_) {
            if (delta < 0) { t = (h - x) / delta; to = kAtUpper; }
        } else if (delta > 0) {
            if (h < kInf) { t = std::max(0.0, (h - x) / delta); to = kAtUpper; }
        } else {
            if (l > -kInf) { t = std::max(0.0, (l - x) / delta); to = kAtLower; }
        }
        if (t < theta - 1e-12 || (t < theta + 1e-12 && j < leave_var)) {
            theta = t;
            leave_pos = p;
            leave_to = to;
            leave_var = j;
            flip = false;
        }
    }
    if (!std::isfinite(theta)) return false;
    if (flip) leave_pos = -1;
    return true;
}

void SimplexEngine::apply(int enter, int dir, double theta, int leave_pos,
                          uint8_t leave_to, bool flip, std::vector<double>& alpha) {
    if (theta != 0.0) {
        for (int p = 0; p < m_; ++p) {
            double a = alpha[p];
            if (a != 0.0) xb_[p] -= theta * dir * a;
        }
    }
    if (flip) {
        vstat_[enter] = (vstat_[enter] == kAtLower) ? kAtUpper : kAtLower;
        return;
    }
    double enter_val = nb_value(enter) + theta * dir;
    int jleave = basic_[leave_pos];
    vstat_[jleave] = leave_to;
    varpos_[jleave] = -1;
    basic_[leave_pos] = enter;
    varpos_[enter] = leave_pos;
    vstat_[enter] = kBasic;
    xb_[leave_pos] = enter_val;

    Eta e;
    e.pos = leave_pos;
    e.pivot = alpha[leave_pos];
    for (int p = 0; p < m_; ++p)
        if (p != leave_pos && std::fabs(alpha[p]) > kDropTol)
            e.terms.emplace_back(p, alpha[p]);
    etas_.push_back(std::move(e));
    if (static_cast<int>(etas_.size()) >= kRefactorEvery) {
        refactorize();
        compute_xb();
    }
}

SimplexEngine::Outcome SimplexEngine::run(const std::vector<uint8_t>* warm_status) {
    iterations_ = 0;
    price_cursor_ = 0;
    etas_.clear();
    if (m_ == 0) {
        // Pure bound optimization.
        vstat_.assign(total_, kAtLower);
        for (int j = 0; j < n_; ++j) {
            if (lo_[j] > hi_[j]) return Outcome::Infeasible;
            if (cost_[j] > 0) {
                if (lo_[j] <= -kInf) return Outcome::Unbounded;
                vstat_[j] = kAtLower;
            } else if (cost_[j] < 0) {
                if (hi_[j] >= kInf) return Outcome::Unbounded;
                vstat_[j] = kAtUpper;
            } else {
                vstat_[j] = lo_[j] > -kInf ? kAtLower : (hi_[j] < kInf ? kAtUpper : kFreeNb);
            }
        }
        basic_.clear();
        xb_.clear();
        return Outcome::Optimal;
    }

    setup_basis(warm_status);

    std::vector<double> y(m_), alpha(m_);
    int degenerate_run = 0;
    bool bland = false;

    // Phase 1: drive out bound violations under the composite objective.
    while (infeasibility() > std::max(feas_tol_ * m_, 1e-7)) {
        if (++iterations_ > max_iter_) throw SolverError("simplex iteration limit (phase 1)");
        y.assign(m_, 0.0);
        for (int p = 0; p < m_; ++p) {
            int j = basic_[p];
            if (xb_[p] < lo_[j] - feas_tol_) y[p] = -1.0;
            else if (xb_[p] > hi_[j] + feas_tol_) y[p] = 1.0;
        }
        btran_full(y);
        int enter, dir;
        if (!price(y, true, bland, enter, dir)) {
            if (infeasibility() > std::max(feas_tol_ * m_, 1e-7) * 10.0)
                return Outcome::Infeasible;
            break;  // tiny residual: accept as feasible
        }
        alpha.assign(m_, 0.0);
        const SparseCol& c = cols_[enter];
        for (size_t k = 0; k < c.row.size(); ++k) alpha[c.row[k]] = c.val[k];
        ftran_full(alpha);

        double theta; int leave_pos; uint8_t leave_to; bool flip;
        if (!ratio(enter, dir, alpha, true, theta, leave_pos, leave_to, flip))
            return Outcome::Infeasible;  // cannot happen for a bounded phase-1 objective
        if (!flip && std::fabs(alpha[leave_pos]) < kPivotAccept && !etas_.empty()) {
            refactorize();
            compute_xb();
            continue;  // retry with fresh numbers
        }
        bland = theta < 1e-10 ? (++degenerate_run > kBlandTrigger) : (degenerate_run = 0, false);
        apply(enter, dir, theta, leave_pos, leave_to, flip, alpha);
    }

    // Phase 2.
    degenerate_run = 0;
    bland = false;
    int stall_verifies = 0;
    for (;;) {
        if (++iterations_ > max_iter_) throw SolverError("simplex iteration limit (phase 2)");
        y.assign(m_, 0.0);
        for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
        btran_full(y);
        int enter, dir;
        if (!price(y, false, bland, enter, dir)) {
            // Verify with a fresh factorization before declaring optimality.
            if (etas_.empty() && stall_verifies > 0) return Outcome::Optimal;
            refactorize();
            compute_xb();
            ++stall_verifies;
            if (stall_verifies > 4) return Outcome::Optimal;
            y.assign(m_, 0.0);
            for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
            btran_full(y);
            if (!price(y, false, bland, enter, dir)) return Outcome::Optimal;
        }
        alpha.assign(m_, 0.0);
        const SparseCol& c = cols_[enter];
        for (size_t k = 0; k < c.row.size(); ++k) alpha[c.row[k]] = c.val[k];
        ftran_full(alpha);

        double theta; int leave_pos; uint8_t leave_to; bool flip;
        if (!ratio(enter, dir, alpha, false, theta, leave_pos, leave_to, flip))
            return Outcome::Unbounded;
        if (!flip && std::fabs(alpha[leave_pos]) < kPivotAccept && !etas_.empty()) {
            refactorize();
            compute_xb();
            continue;
        }
        bland = theta < 1e-10 ? (++degenerate_run > kBlandTrigger) : (degenerate_run = 0, false);
        apply(enter, dir, theta, leave_pos, leave_to, flip, alpha);
    }
}

Solution SimplexEngine::extract(const LinearModel& model, Outcome outcome) const {
    Solution sol;
    sol.iterations = iterations_;
    switch (outcome) {
        case Outcome::Optimal: sol.status = Status::Optimal; break;
        case Outcome::Infeasible: sol.status = Status::Infeasible; break;
        case Outcome::Unbounded: sol.status = Status::Unbounded; break;
    }
    if (sol.status != Status::Optimal) return sol;

    sol.primal.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
        sol.primal[j] = vstat_[j] == kBasic ? xb_[varpos_[j]] : nb_value(j);

    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * sol.primal[j];
    sol.objective = maximize_ ? -obj : obj;
    sol.best_bound = sol.objective;

    std::vector<double> y(m_, 0.0);
    if (m_ > 0) {
        for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
        btran_full(y);
    }
    sol.duals.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) sol.duals[i] = maximize_ ? -y[i] : y[i];

    sol.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        if (vstat_[j] == kBasic) continue;
        double rd = cost_[j];
        const SparseCol& c = cols_[j];
        for (size_t k = 0; k < c.row.size(); ++k) rd -= c.val[k] * y[c.row[k]];
        sol.reduced_costs[j] = maximize_ ? -rd : rd;
    }
    sol.basis.status = vstat_;
    return sol;
}

Solution solve_lp(const LinearModel& model, const SolverSettings& settings,
                  const Basis* warm) {
    model.validate();
    for (const auto& v : model.variables())
        if (v.integral) throw InputError("solve_lp: model has integrality flags");
    if (!settings.dump_lp_path.empty()) {
        std::ofstream out(settings.dump_lp_path);
        out << model.to_lp_text();
    }
    SimplexEngine engine(model, settings);
    auto outcome = engine.run(warm && !warm->empty() ? &warm->status : nullptr);
    return engine.extract(model, outcome);
}

double dual_objective(const LinearModel& model, const Solution& sol) {
    const bool maximize = model.sense == Objective::Maximize;
    double val = 0.0;
    for (int i = 0; i < model.num_rows(); ++i) val += sol.duals[i] * model.row(i).rhs;
    for (int j = 0; j < model.num_variables(); ++j) {
        double rd = sol.reduced_costs[j];
        if (rd == 0.0) continue;
        const Variable& v = model.variable(j);
        bool at_lower = maximize ? rd < 0 : rd > 0;
        double bound = at_lower ? v.lower : v.upper;
        if (std::isfinite(bound)) val += rd * bound;
    }
    return val;
}

// Branch-and-bound layer lives in lp_milp.cpp; it reuses one engine
// instance across nodes through this handle.
struct NodeSolver::Impl {
    SimplexEngine engine;
    const LinearModel& model;
    Impl(const LinearModel& m, const SolverSettings& s) : engine(m, s), model(m) {}
};

NodeSolver::NodeSolver(const LinearModel& model, const SolverSettings& settings)
    : impl_(new Impl(model, settings)) {}
NodeSolver::~NodeSolver() = default;

Solution NodeSolver::solve(const std::vector<std::pair<int, std::pair<double, double>>>& bounds,
                           const std::vector<uint8_t>* warm,
                           std::vector<uint8_t>* status_out) {
    impl_->engine.reset_bounds();
    for (const auto& [j, lh] : bounds) impl_->engine.set_bounds(j, lh.first, lh.second);
    auto outcome = impl_->engine.run(warm);
    Solution sol = impl_->engine.extract(impl_->model, outcome);
    if (status_out) *status_out = impl_->engine.status_snapshot();
    return sol;
}

Solution detail_solve_with_engine(const LinearModel& model, const SolverSettings& settings,
                                  const std::vector<std::pair<int, std::pair<double, double>>>& bounds,
                                  const std::vector<uint8_t>* warm,
                                  std::vector<uint8_t>* status_out) {
    SimplexEngine engine(model, settings);
    for (const auto& [j, lh] : bounds) engine.set_bounds(j, lh.first, lh.second);
    auto outcome = engine.run(warm);
    Solution sol = engine.extract(model, outcome);
    if (status_out) *status_out = engine.status_snapshot();
    return sol;
}

}  // namespace ies::lp
