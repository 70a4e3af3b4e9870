#include "ontoscope/ontic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ontoscope {

void OnticSpace::validate() const {
    if (ids.size() != measure.size())
        throw std::invalid_argument("OnticSpace: ids/measure length mismatch");
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) throw std::invalid_argument("OnticSpace: duplicate id " + id);
    }
    for (double m : measure) {
        if (!(m > 0.0)) throw std::invalid_argument("OnticSpace: nonpositive measure");
    }
}

OntologicalModel::OntologicalModel(OnticSpace space, int dim, ModelMetadata metadata,
                                   EpistemicRule epistemic, ResponseRule response,
                                   bool responses_state_dependent)
    : space_(std::move(space)),
      dim_(dim),
      metadata_(std::move(metadata)),
      epistemic_(std::move(epistemic)),
      response_(std::move(response)),
      responses_state_dependent_(responses_state_dependent),
      cache_(std::make_unique<Cache>()) {
    space_.validate();
    if (dim_ < 2) throw std::invalid_argument("OntologicalModel: dim must be >= 2");
}

const std::vector<double>& OntologicalModel::epistemic_density(const Ket& state,
                                                               const std::string& prep) const {
    const std::string key = state.digest() + "|" + prep;
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->entries.find(key);
        if (it != cache_->entries.end()) return *it->second;
    }
    auto dens = std::make_unique<std::vector<double>>(epistemic_(state, prep));
    if (static_cast<int>(dens->size()) != space_.size())
        throw std::logic_error("epistemic rule returned wrong-length density");
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto [it, inserted] = cache_->entries.emplace(key, std::move(dens));
    (void)inserted;  // concurrent read-through: first fill wins, fills are identical
    return *it->second;
}

std::vector<double> OntologicalModel::response_table(const Effect& effect,
                                                     const ProjectiveContext& context,
                                                     const Ket* state) const {
    if (responses_state_dependent_ && state == nullptr)
        throw MissingDataError("response_table: model is state-dependent but no state given");
    auto table = response_(effect, context, responses_state_dependent_ ? state : nullptr);
    if (static_cast<int>(table.size()) != space_.size())
        throw std::logic_error("response rule returned wrong-length table");
    return table;
}

void OntologicalModel::register_context(ProjectiveContext ctx) {
    if (ctx.dim != dim_) throw std::invalid_argument("register_context: dimension mismatch");
    auto verdict = validate_context(ctx);
    if (!verdict.pass) throw std::invalid_argument("register_context: invalid context " + ctx.label);
    for (const auto& c : contexts_) {
        if (c.label == ctx.label) throw std::invalid_argument("register_context: duplicate label " + ctx.label);
    }
    contexts_.push_back(std::move(ctx));
}

void OntologicalModel::register_state(Ket state, std::string prep) {
    if (state.dim() != dim_) throw std::invalid_argument("register_state: dimension mismatch");
    states_.emplace_back(std::move(state), std::move(prep));
}

const ProjectiveContext& OntologicalModel::context_by_label(const std::string& label) const {
    for (const auto& c : contexts_) {
        if (c.label == label) return c;
    }
    throw MissingDataError("no registered context labeled " + label);
}

ModelSnapshot OntologicalModel::snapshot() const {
    ModelSnapshot snap;
    snap.metadata = metadata_;
    snap.dim = dim_;
    snap.space = space_;
    snap.responses_state_dependent = responses_state_dependent_;
    snap.states = states_;
    snap.contexts = contexts_;
    for (const auto& [ket, prep] : states_) {
        snap.epistemic.push_back({ket.digest(), prep, epistemic_density(ket, prep)});
    }
    for (const auto& ctx : contexts_) {
        for (const auto& effect : ctx.effects) {
            ResponseFunction rf;
            rf.effect_key = effect.key();
            rf.context_label = ctx.label;
            if (responses_state_dependent_) {
                for (const auto& [ket, prep] : states_) {
                    rf.state_dependent[ket.digest()] = response_table(effect, ctx, &ket);
                }
            } else {
                rf.table = response_table(effect, ctx, nullptr);
            }
            snap.responses.push_back(std::move(rf));
        }
    }
    return snap;
}

OntologicalModel OntologicalModel::from_snapshot(const ModelSnapshot& snap) {
    // Shared lookup tables captured by the rules.
    auto epistemic_by_key = std::make_shared<std::map<std::string, std::vector<double>>>();
    for (const auto& e : snap.epistemic) (*epistemic_by_key)[e.state_digest + "|" + e.prep] = e.density;
    auto responses_by_key = std::make_shared<std::map<std::string, ResponseFunction>>();
    for (const auto& r : snap.responses) (*responses_by_key)[r.effect_key + "@" + r.context_label] = r;

    EpistemicRule epi = [epistemic_by_key](const Ket& state, const std::string& prep) {
        auto it = epistemic_by_key->find(state.digest() + "|" + prep);
        if (it == epistemic_by_key->end())
            throw MissingDataError("snapshot model: no epistemic state for digest " + state.digest());
        return it->second;
    };
    ResponseRule resp = [responses_by_key](const Effect& effect, const ProjectiveContext& ctx,
                                           const Ket* state) {
        auto it = responses_by_key->find(effect.key() + "@" + ctx.label);
        if (it == responses_by_key->end())
            throw MissingDataError("snapshot model: no response row for context " + ctx.label);
        const ResponseFunction& rf = it->second;
        if (state != nullptr && !rf.state_dependent.empty()) {
            auto st = rf.state_dependent.find(state->digest());
            if (st == rf.state_dependent.end())
                throw MissingDataError("snapshot model: no response slice for state " + state->digest());
            return st->second;
        }
        if (rf.table.empty())
            throw MissingDataError("snapshot model: response row is state-dependent, no state given");
        return rf.table;
    };

    OntologicalModel model(snap.space, snap.dim, snap.metadata, std::move(epi), std::move(resp),
                           snap.responses_state_dependent);
    for (const auto& ctx : snap.contexts) model.register_context(ctx);
    for (const auto& [ket, prep] : snap.states) model.register_state(ket, prep);
    return model;
}

double predicted_probability(const OntologicalModel& model, const Ket& state, const std::string& prep,
                             const Effect& effect, const ProjectiveContext& context) {
    const auto& rho = model.epistemic_density(state, prep);
    const auto xi = model.response_table(effect, context, &state);
    const auto& mu = model.space().measure;
    double p = 0.0;
    for (int i = 0; i < model.space().size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        p += xi[k] * rho[k] * mu[k];
    }
    return std::clamp(p, 0.0, 1.0);
}

std::vector<int> support(std::span<const double> table, double threshold) {
    std::vector<int> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] > threshold) out.push_back(static_cast<int>(i));
    }
    return out;
}

namespace {

void check_response_slice(const OntologicalModel& model, const ProjectiveContext& ctx, const Ket* state,
                          std::vector<ModelViolation>& out) {
    const int n = model.space().size();
    const std::string slice = state != nullptr ? state->digest() : "";
    std::vector<std::vector<double>> tables;
    tables.reserve(ctx.effects.size());
    for (const auto& effect : ctx.effects) tables.push_back(model.response_table(effect, ctx, state));
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double sum = 0.0;
        for (std::size_t e = 0; e < tables.size(); ++e) {
            double v = tables[e][k];
            sum += v;
            if (v < -kNormTol || v > 1.0 + kNormTol) {
                ModelViolation violation;
                violation.kind = "response_range";
                violation.context_label = ctx.label;
                violation.state_digest = slice;
                violation.effect_key = ctx.effects[e].key();
                violation.lambda_index = i;
                violation.defect = std::max(-v, v - 1.0);
                out.push_back(std::move(violation));
            }
        }
        if (std::abs(sum - 1.0) > kNormTol) {
            ModelViolation violation;
            violation.kind = "response_norm";
            violation.context_label = ctx.label;
            violation.state_digest = slice;
            violation.lambda_index = i;
            violation.defect = std::abs(sum - 1.0);
            out.push_back(std::move(violation));
        }
    }
}

}  // namespace

std::vector<ModelViolation> validate_model(const OntologicalModel& model,
                                           std::size_t* coverage_gaps) {
    std::vector<ModelViolation> out;
    std::size_t gaps = 0;
    for (const auto& ctx : model.contexts()) {
        auto verdict = validate_context(ctx);
        if (!verdict.pass) {
            ModelViolation violation;
            violation.kind = "context";
            violation.context_label = ctx.label;
            violation.defect = std::max(verdict.orthogonality_defect, verdict.completeness_defect);
            out.push_back(std::move(violation));
        }
    }
    const auto& mu = model.space().measure;
    for (const auto& [ket, prep] : model.states()) {
        const std::vector<double>* rho = nullptr;
        try {
            rho = &model.epistemic_density(ket, prep);
        } catch (const MissingDataError&) {
            ++gaps;
            continue;
        }
        double total = 0.0;
        for (int i = 0; i < model.space().size(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            if ((*rho)[k] < 0.0) {
                ModelViolation violation;
                violation.kind = "epistemic_range";
                violation.state_digest = ket.digest();
                violation.prep = prep;
                violation.lambda_index = i;
                violation.defect = -(*rho)[k];
                out.push_back(std::move(violation));
            }
            total += (*rho)[k] * mu[k];
        }
        if (std::abs(total - 1.0) > kNormTol) {
            ModelViolation violation;
            violation.kind = "epistemic_norm";
            violation.state_digest = ket.digest();
            violation.prep = prep;
            violation.defect = std::abs(total - 1.0);
            out.push_back(std::move(violation));
        }
    }
    for (const auto& ctx : model.contexts()) {
        if (model.responses_state_dependent()) {
            for (const auto& [ket, prep] : model.states()) {
                try {
                    check_response_slice(model, ctx, &ket, out);
                } catch (const MissingDataError&) {
                    ++gaps;
                }
            }
        } else {
            try {
                check_response_slice(model, ctx, nullptr, out);
            } catch (const MissingDataError&) {
                ++gaps;
            }
        }
    }
    if (coverage_gaps != nullptr) *coverage_gaps = gaps;
    return out;
}

DeterminismReport is_outcome_deterministic(const OntologicalModel& model, double tol) {
    DeterminismReport report;
    auto scan = [&](const ProjectiveContext& ctx, const Ket* state) {
        for (const auto& effect : ctx.effects) {
            auto table = model.response_table(effect, ctx, state);
            for (int i = 0; i < model.space().size(); ++i) {
                double v = table[static_cast<std::size_t>(i)];
                if (std::min(std::abs(v), std::abs(1.0 - v)) > tol) {
                    report.deterministic = false;
                    report.lambda_index = i;
                    report.effect_key = effect.key();
                    report.context_label = ctx.label;
                    report.state_digest = state != nullptr ? state->digest() : "";
                    report.value = v;
                    return false;
                }
            }
        }
        return true;
    };
    for (const auto& ctx : model.contexts()) {
        if (model.responses_state_dependent()) {
            for (const auto& [ket, prep] : model.states()) {
                if (!scan(ctx, &ket)) return report;
            }
        } else {
            if (!scan(ctx, nullptr)) return report;
        }
    }
    return report;
}

nlohmann::ordered_json ModelSnapshot::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = metadata.name;
    j["dim"] = dim;
    j["metadata"] = {{"claims_deterministic", metadata.claims_deterministic},
                     {"claims_lambda_sufficient", metadata.claims_lambda_sufficient},
                     {"born_tol", metadata.born_tol},
                     {"ctx_tol", metadata.ctx_tol},
                     {"seed", metadata.seed}};
    j["ontic"] = {{"ids", space.ids}, {"measure", space.measure}};
    j["responses_state_dependent"] = responses_state_dependent;
    auto jstates = nlohmann::ordered_json::array();
    for (const auto& [ket, prep] : states) {
        jstates.push_back({{"digest", ket.digest()}, {"prep", prep}, {"ket", ontoscope::to_json(ket)}});
    }
    j["states"] = std::move(jstates);
    auto jctx = nlohmann::ordered_json::array();
    for (const auto& ctx : contexts) jctx.push_back(ontoscope::to_json(ctx));
    j["contexts"] = std::move(jctx);
    auto jepi = nlohmann::ordered_json::array();
    for (const auto& e : epistemic) {
        jepi.push_back({{"state", e.state_digest}, {"prep", e.prep}, {"density", e.density}});
    }
    j["epistemic"] = std::move(jepi);
    auto jresp = nlohmann::ordered_json::array();
    for (const auto& r : responses) {
        nlohmann::ordered_json row{{"context", r.context_label}, {"effect", r.effect_key}};
        if (!r.table.empty()) row["table"] = r.table;
        if (!r.state_dependent.empty()) {
            nlohmann::ordered_json sd;
            for (const auto& [digest, table] : r.state_dependent) sd[digest] = table;
            row["state_dependent"] = std::move(sd);
        }
        jresp.push_back(std::move(row));
    }
    j["responses"] = std::move(jresp);
    return j;
}

ModelSnapshot ModelSnapshot::from_json(const nlohmann::json& j) {
    ModelSnapshot snap;
    snap.metadata.name = j.at("name").get<std::string>();
    snap.dim = j.at("dim").get<int>();
    const auto& meta = j.at("metadata");
    snap.metadata.claims_deterministic = meta.at("claims_deterministic").get<bool>();
    snap.metadata.claims_lambda_sufficient = meta.at("claims_lambda_sufficient").get<bool>();
    snap.metadata.born_tol = meta.at("born_tol").get<double>();
    snap.metadata.ctx_tol = meta.at("ctx_tol").get<double>();
    snap.metadata.seed = meta.value("seed", std::uint64_t{0});
    snap.space.ids = j.at("ontic").at("ids").get<std::vector<std::string>>();
    snap.space.measure = j.at("ontic").at("measure").get<std::vector<double>>();
    snap.responses_state_dependent = j.at("responses_state_dependent").get<bool>();
    for (const auto& s : j.at("states")) {
        snap.states.emplace_back(ket_from_json(s.at("ket")), s.at("prep").get<std::string>());
    }
    for (const auto& c : j.at("contexts")) snap.contexts.push_back(context_from_json(c));
    for (const auto& e : j.at("epistemic")) {
        snap.epistemic.push_back({e.at("state").get<std::string>(), e.at("prep").get<std::string>(),
                                  e.at("density").get<std::vector<double>>()});
    }
    for (const auto& r : j.at("responses")) {
        ResponseFunction rf;
        rf.context_label = r.at("context").get<std::string>();
        rf.effect_key = r.at("effect").get<std::string>();
        if (r.contains("table")) rf.table = r.at("table").get<std::vector<double>>();
        if (r.contains("state_dependent")) {
            for (const auto& [digest, table] : r.at("state_dependent").items()) {
                rf.state_dependent[digest] = table.get<std::vector<double>>();
            }
        }
        snap.responses.push_back(std::move(rf));
    }
    return snap;
}

}  // namespace ontoscope
