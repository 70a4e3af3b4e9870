#include "ontoscope/zoo.hpp"

#include <cmath>
#include <memory>

namespace ontoscope::zoo {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<std::array<double, 3>> fibonacci_sphere(int n) {
    if (n < 1) throw std::invalid_argument("fibonacci_sphere: n must be >= 1");
    std::vector<std::array<double, 3>> pts;
    pts.reserve(static_cast<std::size_t>(n));
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        double z = 1.0 - (2.0 * k + 1.0) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden_angle * k;
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return pts;
}

OntologicalModel build_bb_model(int dim, const std::vector<Ket>& state_list) {
    if (dim < 2) throw std::invalid_argument("build_bb_model: dim must be >= 2");
    if (state_list.empty()) throw std::invalid_argument("build_bb_model: state list must be nonempty");
    auto points = std::make_shared<std::vector<Ket>>();
    for (const auto& s : state_list) {
        if (s.dim() != dim) throw std::invalid_argument("build_bb_model: state dimension mismatch");
        bool dup = false;
        for (const auto& p : *points) dup = dup || p.same_ray(s);
        if (!dup) points->push_back(s);
    }
    OnticSpace space;
    for (std::size_t i = 0; i < points->size(); ++i) {
        space.ids.push_back("pt" + std::to_string(i));
        space.measure.push_back(1.0);
    }
    ModelMetadata meta;
    meta.name = "bb";
    meta.claims_deterministic = false;
    meta.claims_lambda_sufficient = true;
    meta.born_tol = 1e-12;
    meta.ctx_tol = 1e-9;

    OntologicalModel::EpistemicRule epi = [points](const Ket& state, const std::string&) {
        std::vector<double> density(points->size(), 0.0);
        for (std::size_t i = 0; i < points->size(); ++i) {
            if ((*points)[i].same_ray(state)) {
                density[i] = 1.0;  // measure is 1 at every point
                return density;
            }
        }
        throw MissingDataError("bb model: state is not among the snapshot ontic points");
    };
    OntologicalModel::ResponseRule resp = [points](const Effect& effect, const ProjectiveContext&,
                                                   const Ket*) {
        std::vector<double> table(points->size(), 0.0);
        for (std::size_t i = 0; i < points->size(); ++i) {
            table[i] = born_probability((*points)[i], effect);
        }
        return table;
    };
    return OntologicalModel(std::move(space), dim, std::move(meta), std::move(epi), std::move(resp),
                            /*responses_state_dependent=*/false);
}

OntologicalModel build_ks_qubit_model(int n_points, std::uint64_t seed) {
    if (n_points < 1000) throw std::invalid_argument("build_ks_qubit_model: lattice needs >= 1000 points");
    auto lattice = std::make_shared<std::vector<std::array<double, 3>>>(fibonacci_sphere(n_points));
    const double cell = 4.0 * kPi / n_points;
    OnticSpace space;
    space.ids.reserve(static_cast<std::size_t>(n_points));
    space.measure.assign(static_cast<std::size_t>(n_points), cell);
    for (int i = 0; i < n_points; ++i) space.ids.push_back("gp" + std::to_string(i));

    ModelMetadata meta;
    meta.name = "ks_qubit";
    meta.claims_deterministic = true;
    meta.claims_lambda_sufficient = true;
    meta.born_tol = 3.0 / std::sqrt(static_cast<double>(n_points));
    meta.ctx_tol = 1e-9;
    meta.seed = seed;

    OntologicalModel::EpistemicRule epi = [lattice, cell](const Ket& state, const std::string&) {
        auto b = bloch_vector(state);
        std::vector<double> density(lattice->size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < lattice->size(); ++i) {
            const auto& u = (*lattice)[i];
            double c = b[0] * u[0] + b[1] * u[1] + b[2] * u[2];
            if (c > 0.0) {
                density[i] = c;
                total += c * cell;
            }
        }
        // Renormalize the quadrature so the epistemic invariant holds exactly.
        for (auto& d : density) d /= total;
        return density;
    };
    OntologicalModel::ResponseRule resp = [lattice](const Effect& effect, const ProjectiveContext&,
                                                    const Ket*) {
        if (!effect.rank1_ray())
            throw MissingDataError("ks_qubit model: responses are defined for rank-1 projectors only");
        auto b = bloch_vector(*effect.rank1_ray());
        std::vector<double> table(lattice->size(), 0.0);
        for (std::size_t i = 0; i < lattice->size(); ++i) {
            const auto& u = (*lattice)[i];
            // Closed hemisphere: the cos = 0 tie goes to 1.
            table[i] = (b[0] * u[0] + b[1] * u[1] + b[2] * u[2] >= 0.0) ? 1.0 : 0.0;
        }
        return table;
    };
    return OntologicalModel(std::move(space), 2, std::move(meta), std::move(epi), std::move(resp),
                            /*responses_state_dependent=*/false);
}

OntologicalModel build_bell_model(int dim, int n_grid, const std::vector<ProjectiveContext>& context_list) {
    if (dim < 2) throw std::invalid_argument("build_bell_model: dim must be >= 2");
    if (n_grid < 100) throw std::invalid_argument("build_bell_model: grid needs >= 100 cells");
    for (const auto& ctx : context_list) {
        if (!validate_context(ctx).pass)
            throw std::invalid_argument("build_bell_model: invalid context " + ctx.label);
    }
    OnticSpace space;
    space.ids.reserve(static_cast<std::size_t>(n_grid));
    space.measure.assign(static_cast<std::size_t>(n_grid), 1.0 / n_grid);
    for (int i = 0; i < n_grid; ++i) space.ids.push_back("cell" + std::to_string(i));

    ModelMetadata meta;
    meta.name = "bell";
    meta.claims_deterministic = true;
    meta.claims_lambda_sufficient = false;
    meta.born_tol = 1.0 / n_grid;
    meta.ctx_tol = 2.0 / n_grid;

    const int n = n_grid;
    OntologicalModel::EpistemicRule epi = [n, dim](const Ket& state, const std::string&) {
        if (state.dim() != dim) throw std::invalid_argument("bell model: state dimension mismatch");
        return std::vector<double>(static_cast<std::size_t>(n), 1.0);
    };
    OntologicalModel::ResponseRule resp = [n](const Effect& effect, const ProjectiveContext& ctx,
                                              const Ket* state) {
        if (state == nullptr) throw MissingDataError("bell model: responses require a quantum state");
        int position = ctx.find_effect(effect);
        if (position < 0) throw MissingDataError("bell model: effect not part of context " + ctx.label);
        const int d = ctx.size();
        std::vector<double> cumulative(static_cast<std::size_t>(d));
        double run = 0.0;
        for (int j = 0; j < d; ++j) {
            run += born_probability(*state, ctx.effect(j));
            cumulative[static_cast<std::size_t>(j)] = run;
        }
        std::vector<double> table(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double tau = (i + 0.5) / n;
            int outcome = d - 1;  // cumulative rounding can leave tau above the last entry
            for (int j = 0; j < d; ++j) {
                if (cumulative[static_cast<std::size_t>(j)] >= tau) {
                    outcome = j;
                    break;
                }
            }
            if (outcome == position) table[static_cast<std::size_t>(i)] = 1.0;
        }
        return table;
    };
    OntologicalModel model(std::move(space), dim, std::move(meta), std::move(epi), std::move(resp),
                           /*responses_state_dependent=*/true);
    for (const auto& ctx : context_list) model.register_context(ctx);
    return model;
}

OntologicalModel build(const ZooSpec& spec) {
    if (spec.model_id == "bb") {
        auto model = build_bb_model(spec.dim, spec.states);
        for (const auto& c : spec.contexts) model.register_context(c);
        for (const auto& s : spec.states) model.register_state(s);
        return model;
    }
    if (spec.model_id == "ks_qubit") {
        auto model = build_ks_qubit_model(spec.sphere_points, spec.seed);
        for (const auto& c : spec.contexts) model.register_context(c);
        for (const auto& s : spec.states) model.register_state(s);
        return model;
    }
    if (spec.model_id == "bell") {
        auto model = build_bell_model(spec.dim, spec.grid_cells, spec.contexts);
        for (const auto& s : spec.states) model.register_state(s);
        return model;
    }
    throw std::invalid_argument("zoo::build: unknown model id " + spec.model_id);
}

}  // namespace ontoscope::zoo
