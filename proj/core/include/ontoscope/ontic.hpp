#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ontoscope/quantum.hpp"

namespace ontoscope {

// Support threshold: below quadrature noise, above round-off.
inline constexpr double kSuppTol = 1e-12;

/// Finite weighted ontic space: ordered point ids with per-point measure.
struct OnticSpace {
    std::vector<std::string> ids;
    std::vector<double> measure;

    int size() const { return static_cast<int>(ids.size()); }
    /// Throws unless ids are unique and all weights positive.
    void validate() const;
};

/// Stored distribution rho(lambda | psi, P) over an ontic space.
struct EpistemicState {
    std::string state_digest;
    std::string prep;
    std::vector<double> density;
};

/// Stored response row xi_E(lambda, M) for one (effect, context). A model
/// violating lambda-sufficiency carries per-state tables instead of (or in
/// addition to) the plain one.
struct ResponseFunction {
    std::string effect_key;
    std::string context_label;
    std::vector<double> table;
    std::map<std::string, std::vector<double>> state_dependent;  // state digest -> table
};

struct ModelMetadata {
    std::string name;
    bool claims_deterministic = false;
    bool claims_lambda_sufficient = true;
    double born_tol = 1e-9;  // |predicted - Born| tolerance for this model's fidelity
    double ctx_tol = 1e-9;   // cross-context Delta tolerance
    std::uint64_t seed = 0;
};

/// Raised when a table-backed model lacks a requested row. The verifier
/// reports these as coverage gaps rather than failures.
struct MissingDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelViolation {
    std::string kind;  // epistemic_norm | epistemic_range | response_norm | response_range | context
    std::string context_label;
    std::string state_digest;  // response slice digest (may be empty) / epistemic state digest
    std::string prep;
    std::string effect_key;
    int lambda_index = -1;
    double defect = 0.0;
};

/// Full snapshot of a model over explicit state and context lists; the
/// JSON exchange form and the mutation point for constructed test models.
struct ModelSnapshot {
    ModelMetadata metadata;
    int dim = 0;
    OnticSpace space;
    bool responses_state_dependent = false;
    std::vector<std::pair<Ket, std::string>> states;  // (ket, prep)
    std::vector<ProjectiveContext> contexts;
    std::vector<EpistemicState> epistemic;
    std::vector<ResponseFunction> responses;

    nlohmann::ordered_json to_json() const;
    static ModelSnapshot from_json(const nlohmann::json& j);
};

/// Ontological model: ontic space + epistemic distributions + response
/// functions, either rule-backed (zoo constructions, evaluated on demand)
/// or table-backed (loaded snapshots). Immutable once the probe registries
/// are set up; evaluation is pure and the epistemic cache is read-through.
class OntologicalModel {
   public:
    using EpistemicRule = std::function<std::vector<double>(const Ket&, const std::string& prep)>;
    // `state` is null for lambda-sufficient evaluation.
    using ResponseRule =
        std::function<std::vector<double>(const Effect&, const ProjectiveContext&, const Ket* state)>;

    OntologicalModel(OnticSpace space, int dim, ModelMetadata metadata, EpistemicRule epistemic,
                     ResponseRule response, bool responses_state_dependent);

    static OntologicalModel from_snapshot(const ModelSnapshot& snap);

    int dim() const { return dim_; }
    const OnticSpace& space() const { return space_; }
    const ModelMetadata& metadata() const { return metadata_; }
    bool responses_state_dependent() const { return responses_state_dependent_; }

    /// rho(.|state, prep); cached by (state digest, prep label).
    const std::vector<double>& epistemic_density(const Ket& state, const std::string& prep) const;

    /// xi_effect(., context[, state]). For state-dependent models a state is
    /// required; lambda-sufficient models ignore it.
    std::vector<double> response_table(const Effect& effect, const ProjectiveContext& context,
                                       const Ket* state = nullptr) const;

    // Probe registries: the concrete states/contexts enumeration-style checks
    // and snapshots run over.
    void register_context(ProjectiveContext ctx);
    void register_state(Ket state, std::string prep = "P0");
    const std::vector<ProjectiveContext>& contexts() const { return contexts_; }
    const std::vector<std::pair<Ket, std::string>>& states() const { return states_; }
    const ProjectiveContext& context_by_label(const std::string& label) const;

    /// Materializes tables over the registered states and contexts.
    ModelSnapshot snapshot() const;

   private:
    struct Cache {
        std::mutex mutex;
        std::unordered_map<std::string, std::unique_ptr<std::vector<double>>> entries;
    };

    OnticSpace space_;
    int dim_;
    ModelMetadata metadata_;
    EpistemicRule epistemic_;
    ResponseRule response_;
    bool responses_state_dependent_;
    std::vector<ProjectiveContext> contexts_;
    std::vector<std::pair<Ket, std::string>> states_;
    mutable std::unique_ptr<Cache> cache_;
};

/// Eq-of-the-model probability: sum_lambda xi(lambda) rho(lambda) mu(lambda),
/// clamped to [0, 1]. Throws MissingDataError when the model lacks a row.
double predicted_probability(const OntologicalModel& model, const Ket& state, const std::string& prep,
                             const Effect& effect, const ProjectiveContext& context);

/// {lambda : value > threshold}, as sorted point indices.
std::vector<int> support(std::span<const double> table, double threshold = kSuppTol);

/// Epistemic/response normalization and range checks over the registered
/// probe sets; one record per violation. Rows the model cannot supply are
/// counted into `coverage_gaps` (when given) rather than raised.
std::vector<ModelViolation> validate_model(const OntologicalModel& model,
                                           std::size_t* coverage_gaps = nullptr);

struct DeterminismReport {
    bool deterministic = true;
    // First offending entry when not.
    int lambda_index = -1;
    std::string effect_key;
    std::string context_label;
    std::string state_digest;
    double value = 0.0;
};

/// True iff every response entry is within `tol` of {0, 1} across the
/// registered contexts (and registered states, for state-dependent models).
DeterminismReport is_outcome_deterministic(const OntologicalModel& model, double tol = 1e-9);

}  // namespace ontoscope
