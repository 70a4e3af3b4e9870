#include "ontoscope/ratlp.hpp"

#include <cmath>
#include <stdexcept>

namespace ontoscope::ratlp {

using boost::multiprecision::cpp_int;

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("to_rational: non-finite input");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double mantissa = std::frexp(x, &exp);  // x = mantissa * 2^exp, |mantissa| in [0.5, 1)
    auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    int e2 = exp - 53;
    Rational r(scaled);
    if (e2 > 0) {
        r *= Rational(cpp_int(1) << e2);
    } else if (e2 < 0) {
        r /= Rational(cpp_int(1) << -e2);
    }
    return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace {

// Canonical one-sided row a.x <= beta over x >= 0.
struct CanonRow {
    std::vector<std::pair<int, Rational>> coeffs;
    Rational beta;
    std::string label;
};

std::vector<CanonRow> canonicalize(const Problem& problem) {
    std::vector<CanonRow> rows;
    for (const auto& row : problem.rows) {
        if (!row.lo && !row.hi) continue;
        if (row.hi) rows.push_back({row.coeffs, *row.hi, row.label + ":le"});
        if (row.lo) {
            CanonRow flipped;
            flipped.label = row.label + ":ge";
            flipped.beta = -*row.lo;
            for (const auto& [j, a] : row.coeffs) flipped.coeffs.emplace_back(j, -a);
            rows.push_back(std::move(flipped));
        }
    }
    for (std::size_t j = 0; j < problem.var_upper.size(); ++j) {
        if (problem.var_upper[j]) {
            rows.push_back({{{static_cast<int>(j), Rational(1)}}, *problem.var_upper[j],
                            "xu:" + std::to_string(j)});
        }
    }
    return rows;
}

// Dense exact solve of B^T y = c by Gaussian elimination.
std::vector<Rational> solve_transposed(std::vector<std::vector<Rational>> bt,
                                       std::vector<Rational> c) {
    const std::size_t m = bt.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        while (pivot < m && bt[pivot][col] == 0) ++pivot;
        if (pivot == m) throw std::logic_error("ratlp: singular basis matrix");
        std::swap(bt[col], bt[pivot]);
        std::swap(c[col], c[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || bt[r][col] == 0) continue;
            Rational f = bt[r][col] / bt[col][col];
            for (std::size_t k = col; k < m; ++k) bt[r][k] -= f * bt[col][k];
            c[r] -= f * c[col];
        }
    }
    std::vector<Rational> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = c[i] / bt[i][i];
    return y;
}

}  // namespace

bool verify_certificate(const Problem& problem, const InfeasibilityCertificate& cert) {
    auto rows = canonicalize(problem);
    std::vector<Rational> combo(static_cast<std::size_t>(problem.num_vars), Rational(0));
    Rational rhs(0);
    for (const auto& [label, q] : cert.row_multipliers) {
        if (q < 0) return false;
        if (q == 0) continue;
        const CanonRow* found = nullptr;
        for (const auto& row : rows) {
            if (row.label == label) {
                found = &row;
                break;
            }
        }
        if (found == nullptr) return false;
        for (const auto& [j, a] : found->coeffs) combo[static_cast<std::size_t>(j)] += q * a;
        rhs += q * found->beta;
    }
    for (const auto& c : combo) {
        if (c < 0) return false;  // would admit x >= 0 escaping the contradiction
    }
    return rhs < 0;
}

SolveResult solve(const Problem& problem) {
    SolveResult result;
    const int nv = problem.num_vars;
    auto canon = canonicalize(problem);
    const std::size_t m = canon.size();
    if (m == 0) {
        result.feasible = true;
        result.x.assign(static_cast<std::size_t>(nv), Rational(0));
        return result;
    }

    // Equality tableau R xall = rhs over xall = [x, slack, artificial] >= 0;
    // rows with negative beta are negated and given an artificial basic var.
    const std::size_t ncols = static_cast<std::size_t>(nv) + 2 * m;
    auto art_col = [&](std::size_t i) { return static_cast<std::size_t>(nv) + m + i; };
    std::vector<std::vector<Rational>> R(m, std::vector<Rational>(ncols, Rational(0)));
    std::vector<Rational> rhs(m);
    std::vector<int> sign(m, 1);
    std::vector<std::size_t> basis(m);
    std::vector<bool> has_artificial(m, false);

    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& [j, a] : canon[i].coeffs) R[i][static_cast<std::size_t>(j)] += a;
        R[i][static_cast<std::size_t>(nv) + i] = 1;  // slack
        rhs[i] = canon[i].beta;
        if (rhs[i] < 0) {
            sign[i] = -1;
            for (std::size_t j = 0; j < static_cast<std::size_t>(nv) + m; ++j) R[i][j] = -R[i][j];
            rhs[i] = -rhs[i];
            R[i][art_col(i)] = 1;
            basis[i] = art_col(i);
            has_artificial[i] = true;
        } else {
            basis[i] = static_cast<std::size_t>(nv) + i;
        }
    }

    // Working tableau (R is kept pristine for dual extraction).
    auto T = R;
    auto b = rhs;

    // Phase-1 objective: minimize sum of artificials. Reduced-cost row with
    // basic columns zeroed out.
    std::vector<Rational> z(ncols, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        if (has_artificial[i]) z[art_col(i)] = 1;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!has_artificial[i]) continue;
        for (std::size_t j = 0; j < ncols; ++j) z[j] -= T[i][j];
    }

    while (true) {
        // Bland: lowest-index column with negative reduced cost.
        std::size_t enter = ncols;
        for (std::size_t j = 0; j < ncols; ++j) {
            if (z[j] < 0) {
                enter = j;
                break;
            }
        }
        if (enter == ncols) break;
        std::size_t leave = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] <= 0) continue;
            Rational ratio = b[i] / T[i][enter];
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) throw std::logic_error("ratlp: phase-1 objective unbounded");
        ++result.pivots;
        Rational pivot = T[leave][enter];
        for (std::size_t j = 0; j < ncols; ++j) T[leave][j] /= pivot;
        b[leave] /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || T[i][enter] == 0) continue;
            Rational f = T[i][enter];
            for (std::size_t j = 0; j < ncols; ++j) T[i][j] -= f * T[leave][j];
            b[i] -= f * b[leave];
        }
        if (z[enter] != 0) {
            Rational f = z[enter];
            for (std::size_t j = 0; j < ncols; ++j) z[j] -= f * T[leave][j];
        }
        basis[leave] = enter;
    }

    Rational objective(0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= art_col(0)) objective += b[i];
    }

    if (objective == 0) {
        result.feasible = true;
        result.x.assign(static_cast<std::size_t>(nv), Rational(0));
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < static_cast<std::size_t>(nv)) result.x[basis[i]] = b[i];
        }
        return result;
    }

    // Infeasible: y solves B^T y = c_B over the pristine columns; the Farkas
    // multipliers for the original row orientation are q_i = -sign_i * y_i.
    std::vector<std::vector<Rational>> bt(m, std::vector<Rational>(m));
    std::vector<Rational> cb(m, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < m; ++r) bt[i][r] = R[r][basis[i]];
        if (basis[i] >= art_col(0)) cb[i] = 1;
    }
    std::vector<Rational> y = solve_transposed(std::move(bt), std::move(cb));
    result.certificate.gap = 0;
    for (std::size_t i = 0; i < m; ++i) {
        Rational q = -Rational(sign[i]) * y[i];
        if (q == 0) continue;
        result.certificate.row_multipliers.emplace_back(canon[i].label, q);
        result.certificate.gap -= q * canon[i].beta;
    }
    if (!verify_certificate(problem, result.certificate))
        throw std::logic_error("ratlp: extracted certificate failed verification");
    return result;
}

}  // namespace ontoscope::ratlp
