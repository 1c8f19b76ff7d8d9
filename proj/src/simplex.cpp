#include "drlcheck/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "drlcheck/errors.hpp"

namespace drlcheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kDualTol = 1e-9;

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper };

struct Tableau {
    // Columns: structurals, then one slack per row, then artificials.
    std::size_t m = 0;  // rows
    std::vector<std::vector<std::pair<std::size_t, double>>> cols;
    std::vector<double> lower, upper, cost, value;
    std::vector<VarState> state;
    std::vector<std::size_t> basis;      // row -> basic column
    std::vector<int> basis_row;          // column -> row or -1
    Eigen::MatrixXd binv;
    Eigen::VectorXd rhs;
    std::vector<bool> enterable;

    double col_dot(std::size_t j, const Eigen::VectorXd& y) const {
        double acc = 0.0;
        for (const auto& [r, v] : cols[j])
            acc += y(static_cast<long>(r)) * v;
        return acc;
    }

    Eigen::VectorXd ftran(std::size_t j) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<long>(m));
        for (const auto& [r, v] : cols[j])
            w += v * binv.col(static_cast<long>(r));
        return w;
    }

    // Recompute the inverse and the basic values from scratch.
    bool refactor() {
        Eigen::MatrixXd b(static_cast<long>(m), static_cast<long>(m));
        b.setZero();
        for (std::size_t r = 0; r < m; ++r)
            for (const auto& [row, v] : cols[basis[r]])
                b(static_cast<long>(row), static_cast<long>(r)) = v;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        const Eigen::MatrixXd inv = lu.inverse();
        if (!inv.allFinite())
            return false;
        binv = inv;
        recompute_basic_values();
        return true;
    }

    void recompute_basic_values() {
        Eigen::VectorXd residual = rhs;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (basis_row[j] >= 0 || value[j] == 0.0)
                continue;
            for (const auto& [r, v] : cols[j])
                residual(static_cast<long>(r)) -= v * value[j];
        }
        const Eigen::VectorXd xb = binv * residual;
        for (std::size_t r = 0; r < m; ++r)
            value[basis[r]] = xb(static_cast<long>(r));
    }
};

}

LpResult lp_feasible(const LpProblem& p, const LpConfig& cfg) {
    LpResult res;
    const std::size_t m = p.rows.size();
    const std::size_t ns = p.num_vars;
    if (p.lower.size() != ns || p.upper.size() != ns)
        throw ModelError("lp: bounds arrays must match num_vars");

    Tableau t;
    t.m = m;
    t.rhs = Eigen::VectorXd::Zero(static_cast<long>(m));

    // Structural columns.
    t.cols.assign(ns, {});
    for (std::size_t r = 0; r < m; ++r) {
        for (const auto& [j, coef] : p.rows[r].terms) {
            if (j >= ns)
                throw ModelError("lp: row references unknown variable");
            if (coef != 0.0)
                t.cols[j].push_back({r, coef});
        }
        t.rhs(static_cast<long>(r)) = p.rows[r].rhs;
    }
    t.lower = p.lower;
    t.upper = p.upper;
    for (std::size_t j = 0; j < ns; ++j)
        if (t.lower[j] > t.upper[j])
            return {LpStatus::Infeasible, {}, 0, t.lower[j] - t.upper[j]};

    // One slack per row: row + slack = rhs.
    for (std::size_t r = 0; r < m; ++r) {
        t.cols.push_back({{r, 1.0}});
        switch (p.rows[r].rel) {
        case Relation::Le:
            t.lower.push_back(0.0);
            t.upper.push_back(kInf);
            break;
        case Relation::Ge:
            t.lower.push_back(-kInf);
            t.upper.push_back(0.0);
            break;
        default:
            t.lower.push_back(0.0);
            t.upper.push_back(0.0);
            break;
        }
    }

    const std::size_t total_no_art = t.cols.size();
    t.cost.assign(total_no_art, 0.0);
    t.value.assign(total_no_art, 0.0);
    t.state.assign(total_no_art, VarState::AtLower);
    t.enterable.assign(total_no_art, true);

    // Nonbasic structurals start at their finite bound nearest the origin.
    for (std::size_t j = 0; j < ns; ++j) {
        if (std::isfinite(t.lower[j])) {
            t.state[j] = VarState::AtLower;
            t.value[j] = t.lower[j];
        } else if (std::isfinite(t.upper[j])) {
            t.state[j] = VarState::AtUpper;
            t.value[j] = t.upper[j];
        } else {
            t.state[j] = VarState::AtLower;
            t.value[j] = 0.0;
        }
    }

    // Slack basis; rows whose slack lands outside its bounds get an
    // artificial carrying the violation, and the slack moves to the
    // nearest bound.
    t.basis.resize(m);
    t.basis_row.assign(total_no_art, -1);
    for (std::size_t r = 0; r < m; ++r) {
        double target = t.rhs(static_cast<long>(r));
        for (const auto& [j, coef] : p.rows[r].terms)
            target -= coef * t.value[j];
        const std::size_t slack = ns + r;
        if (target >= t.lower[slack] && target <= t.upper[slack]) {
            t.basis[r] = slack;
            t.basis_row[slack] = static_cast<int>(r);
            t.value[slack] = target;
            t.state[slack] = VarState::Basic;
            continue;
        }
        const double clamped =
            target < t.lower[slack] ? t.lower[slack] : t.upper[slack];
        t.value[slack] = clamped;
        t.state[slack] = target < t.lower[slack] ? VarState::AtLower : VarState::AtUpper;
        const double residual = target - clamped;
        const std::size_t art = t.cols.size();
        t.cols.push_back({{r, residual > 0.0 ? 1.0 : -1.0}});
        t.lower.push_back(0.0);
        t.upper.push_back(kInf);
        t.cost.push_back(1.0);
        t.value.push_back(std::abs(residual));
        t.state.push_back(VarState::Basic);
        t.enterable.push_back(false);  // driven out, never re-admitted
        t.basis_row.push_back(static_cast<int>(r));
        t.basis[r] = art;
    }

    const std::size_t n = t.cols.size();
    t.binv = Eigen::MatrixXd::Identity(static_cast<long>(m), static_cast<long>(m));
    // Artificial columns with coefficient -1 need their basis row scaled.
    for (std::size_t r = 0; r < m; ++r)
        if (t.basis[r] >= total_no_art && t.cols[t.basis[r]][0].second < 0.0)
            t.binv.row(static_cast<long>(r)) *= -1.0;

    const std::uint64_t bland_after =
        cfg.bland_after ? cfg.bland_after : 5 * static_cast<std::uint64_t>(m + n);
    const std::uint64_t max_iter =
        cfg.max_iterations ? cfg.max_iterations
                           : 50 * static_cast<std::uint64_t>(m + n) + 10000;

    auto objective = [&] {
        double obj = 0.0;
        for (std::size_t j = total_no_art; j < n; ++j)
            obj += t.value[j];
        return obj;
    };

    std::uint64_t since_refactor = 0;
    bool just_refactored = true;
    Eigen::VectorXd y(static_cast<long>(m));

    while (true) {
        if (res.iterations >= max_iter)
            return {LpStatus::Stalled, {}, res.iterations, objective()};
        const bool bland = res.iterations >= bland_after;

        // y = cost_B * binv, then reduced costs on demand.
        for (std::size_t r = 0; r < m; ++r)
            y(static_cast<long>(r)) = t.cost[t.basis[r]];
        y = (y.transpose() * t.binv).transpose();

        std::size_t entering = SIZE_MAX;
        int direction = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (t.basis_row[j] >= 0 || !t.enterable[j])
                continue;
            if (t.lower[j] == t.upper[j])
                continue;
            const double d = t.cost[j] - t.col_dot(j, y);
            int dir = 0;
            if (t.state[j] == VarState::AtLower && d < -kDualTol)
                dir = 1;
            else if (t.state[j] == VarState::AtUpper && d > kDualTol)
                dir = -1;
            if (dir == 0)
                continue;
            if (bland) {
                entering = j;
                direction = dir;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                entering = j;
                direction = dir;
            }
        }

        if (entering == SIZE_MAX) {
            // Optimal for phase 1. Refactor once and re-price before
            // trusting the verdict.
            if (!just_refactored) {
                if (!t.refactor())
                    return {LpStatus::Stalled, {}, res.iterations, objective()};
                just_refactored = true;
                continue;
            }
            const double obj = objective();
            if (obj > cfg.tau)
                return {LpStatus::Infeasible, {}, res.iterations, obj};
            double drift = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (t.value[j] < t.lower[j])
                    drift = std::max(drift, t.lower[j] - t.value[j]);
                if (t.value[j] > t.upper[j])
                    drift = std::max(drift, t.value[j] - t.upper[j]);
            }
            if (drift > 10.0 * cfg.tau)
                return {LpStatus::Stalled, {}, res.iterations, obj};
            res.status = LpStatus::Feasible;
            res.infeasibility = obj;
            res.point.assign(ns, 0.0);
            for (std::size_t j = 0; j < ns; ++j)
                res.point[j] = t.value[j];
            return res;
        }

        ++res.iterations;
        just_refactored = false;
        const Eigen::VectorXd w = t.ftran(entering);

        // Ratio test: how far can the entering variable move.
        double limit = t.upper[entering] - t.lower[entering];  // bound flip
        std::size_t leaving_row = SIZE_MAX;
        bool leaving_to_upper = false;
        for (std::size_t r = 0; r < m; ++r) {
            const double g = -direction * w(static_cast<long>(r));
            if (std::abs(g) <= kPivotTol)
                continue;
            const std::size_t bj = t.basis[r];
            double room;
            bool to_upper;
            if (g > 0.0) {
                if (!std::isfinite(t.upper[bj]))
                    continue;
                room = (t.upper[bj] - t.value[bj]) / g;
                to_upper = true;
            } else {
                if (!std::isfinite(t.lower[bj]))
                    continue;
                room = (t.lower[bj] - t.value[bj]) / g;
                to_upper = false;
            }
            if (room < 0.0)
                room = 0.0;
            bool better = room < limit - 1e-12;
            if (!better && room < limit + 1e-12 && leaving_row != SIZE_MAX) {
                // Tie-break: Bland picks the lowest variable index,
                // Dantzig the largest pivot magnitude.
                const std::size_t cur = t.basis[leaving_row];
                if (bland)
                    better = bj < cur;
                else
                    better = std::abs(w(static_cast<long>(r))) >
                             std::abs(w(static_cast<long>(leaving_row)));
            }
            if (better) {
                limit = room;
                leaving_row = r;
                leaving_to_upper = to_upper;
            }
        }

        if (!std::isfinite(limit))
            // Phase 1 is bounded below, so this means numerical trouble.
            return {LpStatus::Stalled, {}, res.iterations, objective()};

        if (leaving_row == SIZE_MAX) {
            // Bound flip: the entering variable crosses to its other bound.
            t.value[entering] += direction * limit;
            t.state[entering] =
                direction > 0 ? VarState::AtUpper : VarState::AtLower;
            for (std::size_t r = 0; r < m; ++r)
                t.value[t.basis[r]] -= direction * limit * w(static_cast<long>(r));
        } else {
            const std::size_t leaving = t.basis[leaving_row];
            for (std::size_t r = 0; r < m; ++r)
                t.value[t.basis[r]] -= direction * limit * w(static_cast<long>(r));
            t.value[entering] += direction * limit;
            t.value[leaving] = leaving_to_upper ? t.upper[leaving] : t.lower[leaving];
            t.state[leaving] = leaving_to_upper ? VarState::AtUpper : VarState::AtLower;
            t.state[entering] = VarState::Basic;
            t.basis_row[leaving] = -1;
            t.basis_row[entering] = static_cast<int>(leaving_row);
            t.basis[leaving_row] = entering;

            // Rank-one update of the inverse.
            const double alpha = w(static_cast<long>(leaving_row));
            if (std::abs(alpha) <= kPivotTol) {
                if (!t.refactor())
                    return {LpStatus::Stalled, {}, res.iterations, objective()};
                just_refactored = true;
            } else {
                t.binv.row(static_cast<long>(leaving_row)) /= alpha;
                for (std::size_t r = 0; r < m; ++r) {
                    if (r == leaving_row)
                        continue;
                    const double f = w(static_cast<long>(r));
                    if (f != 0.0)
                        t.binv.row(static_cast<long>(r)) -=
                            f * t.binv.row(static_cast<long>(leaving_row));
                }
            }
            if (++since_refactor >= 64) {
                since_refactor = 0;
                if (!t.refactor())
                    return {LpStatus::Stalled, {}, res.iterations, objective()};
                just_refactored = true;
            }
        }
    }
}

}
