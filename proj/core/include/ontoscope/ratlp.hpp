#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ontoscope::ratlp {

using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion: every finite double is a dyadic rational.
Rational to_rational(double x);
double to_double(const Rational& r);

/// Linear feasibility system over nonnegative variables. A row carries a
/// sparse coefficient list and an interval [lo, hi]; equalities have
/// lo == hi, one-sided rows omit a bound. Optional per-variable upper
/// bounds become rows internally.
struct Row {
    std::vector<std::pair<int, Rational>> coeffs;
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    std::string label;
};

struct Problem {
    int num_vars = 0;
    std::vector<std::optional<Rational>> var_upper;  // empty or size num_vars; lower bounds are 0
    std::vector<Row> rows;
};

/// Farkas-style infeasibility certificate: multipliers q over the
/// canonicalized one-sided rows (a.x <= beta, with q >= 0) such that
/// sum q a >= 0 componentwise while sum q beta < 0.
struct InfeasibilityCertificate {
    std::vector<std::pair<std::string, Rational>> row_multipliers;  // (row label, q)
    Rational gap;  // -(sum q beta) > 0
};

struct SolveResult {
    bool feasible = false;
    std::vector<Rational> x;  // when feasible
    InfeasibilityCertificate certificate;
    std::uint64_t pivots = 0;
};

/// Phase-1 simplex with Bland's rule over exact rationals. Complete:
/// always terminates with a point or a verified certificate.
SolveResult solve(const Problem& problem);

/// Exact check of an infeasibility certificate against the problem.
bool verify_certificate(const Problem& problem, const InfeasibilityCertificate& cert);

}  // namespace ontoscope::ratlp
