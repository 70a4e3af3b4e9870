#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ontoscope/ontic.hpp"
#include "ontoscope/ratlp.hpp"

namespace ontoscope::feasibility {

/// Rays identified up to phase, plus contexts as index tuples of d mutually
/// orthogonal rays. The combinatorial core of the coloring question.
struct RaySet {
    int dim = 0;
    std::vector<Ket> rays;
    std::vector<std::vector<int>> contexts;

    /// Throws unless context tuples are in range, of size dim, and pairwise
    /// orthogonal within the quantum-side tolerance.
    void validate() const;

    nlohmann::ordered_json to_json() const;
    static RaySet from_json(const nlohmann::json& j);
};

/// Deduplicates rays across contexts by phase-invariant identity
/// (|<u|v>| > 1 - 1e-9), keeping first-appearance order.
RaySet rays_from_contexts(std::span<const ProjectiveContext> contexts);

/// Outcome of the {0,1} coloring search: either a satisfying assignment
/// (exactly one 1 per context) or a complete-exhaustion certificate with
/// the number of decision nodes visited.
struct ColoringResult {
    bool feasible = false;
    std::vector<int> assignment;  // per-ray values when feasible
    std::uint64_t nodes = 0;

    nlohmann::ordered_json certificate() const;
};

/// Complete backtracking over ray values with unit propagation: a context
/// holding a 1 forces its other rays to 0, a context with dim-1 zeros
/// forces the last ray to 1. Rays are branched in first-context-appearance
/// order, trying 1 before 0.
ColoringResult ks_colorable(const RaySet& rayset);

/// The 18-ray, 9-context dim-4 uncolorable set (exact integer vectors,
/// each ray in exactly two contexts).
RaySet bks18_rayset();

/// One Born constraint: the model probability for (state, effect-in-context)
/// must land within tol of `probability`. `scale` multiplies the stored row
/// (a positive rescaling never changes feasibility).
struct BornTarget {
    int state_index = 0;
    std::string context_label;
    int effect_index = 0;
    double probability = 0.0;
    double scale = 1.0;
};

struct RhoTable {
    int state_index = 0;
    std::vector<double> density;
};

struct XiTable {
    std::string context_label;
    int effect_index = 0;
    int state_index = -1;  // -1: state-independent table
    std::vector<double> table;
};

/// Linear feasibility question in one free side of the model equation:
/// fix_rho_solve_xi searches response tables against given distributions,
/// fix_xi_solve_rho searches distributions against given responses. The
/// joint bilinear problem is rejected by construction.
struct FeasibilityProblem {
    enum class Mode { FixRhoSolveXi, FixXiSolveRho };

    Mode mode = Mode::FixRhoSolveXi;
    int dim = 0;
    OnticSpace space;
    std::vector<Ket> states;
    std::vector<std::string> preps;  // optional, aligned with states
    std::vector<ProjectiveContext> contexts;
    std::vector<RhoTable> fixed_rho;  // FixRhoSolveXi inputs
    std::vector<XiTable> fixed_xi;    // FixXiSolveRho inputs
    bool lambda_sufficient = true;    // free xi may not depend on the state
    bool noncontextual = false;       // free xi may not depend on the context beyond its effect
    std::vector<BornTarget> targets;
    double tol = 1e-7;

    /// Structural checks: targets in [0,1], each (state, context) group
    /// complete and summing to 1 within 1e-6, fixed side present and the
    /// other absent. Throws std::invalid_argument.
    void validate() const;

    nlohmann::ordered_json to_json() const;
    static FeasibilityProblem from_json(const nlohmann::json& j);
};

struct LpResult {
    bool feasible = false;
    double max_residual = 0.0;  // returned point vs targets, exact arithmetic
    std::uint64_t pivots = 0;
    std::vector<XiTable> xi_solution;
    std::vector<RhoTable> rho_solution;
    nlohmann::ordered_json certificate;  // {"type": "solution" | "infeasible", ...}
};

/// Exact-rational feasibility of the linear system: nonnegativity,
/// normalization, the tying constraints implied by the lambda_sufficient /
/// noncontextual flags, and the Born bands.
LpResult lp_feasible(const FeasibilityProblem& problem);

}  // namespace ontoscope::feasibility
