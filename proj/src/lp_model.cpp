// LinearModel construction, validation, and text dump.
#include "iesmarket/lp.hpp"

#include <cmath>
#include <sstream>

namespace ies::lp {

int LinearModel::add_variable(std::string name, double lower, double upper,
                              double objective, bool integral) {
    Variable v;
    v.name = std::move(name);
    v.lower = lower;
    v.upper = upper;
    v.objective = objective;
    v.integral = integral;
    vars_.push_back(std::move(v));
    return static_cast<int>(vars_.size()) - 1;
}

int LinearModel::add_row(Sense s, double rhs, std::vector<std::pair<int, double>> coefs,
                         std::string name) {
    Row r;
    r.name = std::move(name);
    r.sense = s;
    r.rhs = rhs;
    r.coefs = std::move(coefs);
    rows_.push_back(std::move(r));
    return static_cast<int>(rows_.size()) - 1;
}

bool LinearModel::has_integers() const {
    for (const auto& v : vars_)
        if (v.integral) return true;
    return false;
}

void LinearModel::validate() const {
    for (size_t j = 0; j < vars_.size(); ++j) {
        const auto& v = vars_[j];
        if (std::isnan(v.lower) || std::isnan(v.upper) || !std::isfinite(v.objective))
            throw InputError("variable " + v.name + ": non-finite bound or objective");
        if (v.lower > v.upper)
            throw InputError("variable " + v.name + ": lower bound exceeds upper bound");
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r.rhs))
            throw InputError("row " + r.name + ": non-finite right-hand side");
        for (auto [j, a] : r.coefs) {
            if (j < 0 || j >= static_cast<int>(vars_.size()))
                throw InputError("row " + r.name + ": references undeclared variable");
            if (!std::isfinite(a))
                throw InputError("row " + r.name + ": non-finite coefficient");
        }
    }
}

namespace {

void append_linear(std::ostringstream& out, const LinearModel& m,
                   const std::vector<std::pair<int, double>>& terms) {
    bool first = true;
    for (auto [j, a] : terms) {
        if (a == 0.0) continue;
        if (first) {
            out << (a < 0 ? "- " : "");
        } else {
            out << (a < 0 ? " - " : " + ");
        }
        double mag = std::fabs(a);
        if (mag != 1.0) out << mag << " ";
        const std::string& nm = m.variable(j).name;
        out << (nm.empty() ? "x" + std::to_string(j) : nm);
        first = false;
    }
    if (first) out << "0";
}

}  // namespace

std::string LinearModel::to_lp_text() const {
    std::ostringstream out;
    out.precision(12);
    out << (sense == Objective::Minimize ? "min:" : "max:") << " ";
    std::vector<std::pair<int, double>> obj;
    for (int j = 0; j < num_variables(); ++j)
        if (vars_[j].objective != 0.0) obj.emplace_back(j, vars_[j].objective);
    append_linear(out, *this, obj);
    out << ";\n";
    for (int i = 0; i < num_rows(); ++i) {
        const Row& r = rows_[i];
        out << (r.name.empty() ? "r" + std::to_string(i) : r.name) << ": ";
        append_linear(out, *this, r.coefs);
        switch (r.sense) {
            case Sense::LessEqual: out << " <= "; break;
            case Sense::Equal: out << " = "; break;
            case Sense::GreaterEqual: out << " >= "; break;
        }
        out << r.rhs << ";\n";
    }
    for (int j = 0; j < num_variables(); ++j) {
        const Variable& v = vars_[j];
        const std::string nm = v.name.empty() ? "x" + std::to_string(j) : v.name;
        out << nm << " in [" << v.lower << ", " << v.upper << "]";
        if (v.integral) out << " int";
        out << ";\n";
    }
    return out.str();
}

}  // namespace ies::lp
