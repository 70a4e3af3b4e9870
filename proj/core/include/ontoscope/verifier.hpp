#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ontoscope/ontic.hpp"

namespace ontoscope::verifier {

// Behavioral lambda-sufficiency: response slices for different states must
// agree to this tolerance.
inline constexpr double kLambdaSuffTol = 1e-12;

/// One replayable piece of evidence for a failed (or notable) check.
/// The fields identify the exact model evaluation that produced `defect`;
/// replay_witness recomputes it.
struct Witness {
    std::string kind;
    int lambda_index = -1;
    std::string lambda_id;
    std::string state_digest;   // probe/slice state, when relevant
    std::string state2_digest;  // second state (lambda-sufficiency pairs)
    std::string prep = "P0";
    std::string effect_key;
    std::string effect2_key;    // second effect (disjointness pairs)
    std::string context_label;
    std::string context2_label; // second context (invariance / cross-context pairs)
    double value = 0.0;
    double value2 = 0.0;
    double defect = 0.0;
};

struct CheckVerdict {
    std::string id;
    bool applicable = true;
    bool pass = false;
    double max_defect = 0.0;
    std::size_t witness_total = 0;          // full count before capping
    std::vector<Witness> witnesses;         // canonically sorted, capped
    std::size_t coverage_gaps = 0;
    nlohmann::ordered_json details;
};

struct VerificationReport {
    std::string model;
    std::uint64_t seed = 0;
    std::vector<CheckVerdict> checks;

    bool all_pass() const;
    std::size_t coverage_gaps() const;
    /// 0 = all pass, 2 = at least one fail, 4 = coverage gap (and no fail).
    int exit_code() const;
    nlohmann::ordered_json to_json() const;
};

/// A fixed effect together with contexts that all contain it; the probe set
/// for cross-context comparisons.
struct ContextFamily {
    Effect shared_effect;
    std::vector<ProjectiveContext> contexts;

    /// Throws unless every member contains the shared effect.
    void validate() const;
    /// Position of the shared effect in member k.
    int shared_index(int k) const;
};

/// Base context plus `members - 1` Haar-random completions of the shared
/// ray. The shared effect is placed first in each completion except for the
/// last `reordered_members`, where it is moved to the back (those members
/// witness ordering contextuality in the Bell construction).
ContextFamily make_family(const ProjectiveContext& base, int shared_index, int members, Rng& rng,
                          int reordered_members = 0);

struct SupportVerdicts {
    CheckVerdict invariance;    // the union response support is POVM-invariant
    CheckVerdict exclusion;     // response supports avoid orthogonal states' supports
    CheckVerdict disjointness;  // deterministic responses partition within a context
};

/// Runs the three support checks over measurement units (povms enter as
/// unvalidated effect-list handles) and projective contexts. Exclusion and
/// disjointness run per context; disjointness only applies to
/// outcome-deterministic models. State-dependent models are evaluated slice
/// by slice: exclusion uses the measured basis state's own slice.
SupportVerdicts check_support_properties(const OntologicalModel& model, std::span<const Povm> povms,
                                         std::span<const ProjectiveContext> contexts,
                                         double supp_tol = kSuppTol);

/// Support comparison for one (state, context): reports whether
/// Supp(rho) is contained in Supp(xi_{E_psi}) and whether the inclusion is
/// strict with measure gap above supp_tol ("deficient"). Also aggregates,
/// over the model's registered contexts, which shared effects have
/// context-varying supports (the more-than-one-contextual-outcome statistic
/// for deterministic models at dim >= 3).
CheckVerdict check_deficiency(const OntologicalModel& model, const Ket& state, const std::string& prep,
                              const ProjectiveContext& context, double supp_tol = kSuppTol);

/// Cross-context constraint for a family sharing one effect: for every
/// probe state and every pair of members, the response-weighted mass of the
/// shared effect must agree within tol. Reports the contextual set
/// lambda_c per pair and verifies, slice-matched on each pair's basis
/// states chi, that lambda_c(chi) never meets Supp(rho(.|chi)); for
/// lambda-sufficient models this is exactly the interstitial-region
/// containment. Also reports the density variance over the union-minus-
/// intersection response region.
CheckVerdict check_cross_context(const OntologicalModel& model, const ContextFamily& family,
                                 std::span<const Ket> states, std::span<const std::string> preps,
                                 std::optional<double> tol = std::nullopt,
                                 double supp_tol = kSuppTol);

/// Structural pass when no response row depends on the quantum state;
/// otherwise compares response slices pairwise across the given states.
CheckVerdict check_lambda_sufficiency(const OntologicalModel& model, std::span<const Ket> states);

/// max |predicted - Born| over all (state, effect-in-context) triples.
/// Missing rows count as coverage gaps, not failures.
CheckVerdict check_born_agreement(const OntologicalModel& model, std::span<const Ket> states,
                                  std::span<const std::string> preps,
                                  std::span<const ProjectiveContext> contexts,
                                  std::optional<double> tol = std::nullopt);

/// Recomputes a witness's defect against the model. `extra_contexts`
/// resolves context labels that are not registered on the model.
double replay_witness(const OntologicalModel& model, const Witness& witness,
                      std::span<const ProjectiveContext> extra_contexts = {},
                      std::span<const Ket> extra_states = {});

struct SuiteConfig {
    std::vector<std::string> checks;  // empty -> no checks (an explicit full list is kFullSuite)
    std::uint64_t seed = 0;
    std::optional<double> born_tol;
    std::optional<double> ctx_tol;
};

inline const std::vector<std::string> kFullSuite = {
    "validate", "determinism", "born", "support", "deficiency", "cross_context", "lambda_sufficiency"};

/// Executes the selected checks over the model's registered probe sets.
/// Throws std::invalid_argument for an unknown check id.
VerificationReport run_report(const OntologicalModel& model, const SuiteConfig& config);

}  // namespace ontoscope::verifier
