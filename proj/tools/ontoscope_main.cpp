// Command-line front end: builds zoo models, runs verification suites and
// decides coloring / LP feasibility questions, all with JSON files on both
// ends. Exit codes: 0 pass/feasible, 1 usage or parse error, 2 verification
// failure, 3 infeasible, 4 coverage gap.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ontoscope/feasibility.hpp"
#include "ontoscope/verifier.hpp"
#include "ontoscope/zoo.hpp"

namespace {

using namespace ontoscope;

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// Accepts {"states": [...]} or a bare array.
std::vector<Ket> load_states(const std::string& path) {
    nlohmann::json j = load_json(path);
    const nlohmann::json& arr = j.is_object() ? j.at("states") : j;
    std::vector<Ket> states;
    for (const auto& s : arr) states.push_back(ket_from_json(s));
    return states;
}

std::vector<ProjectiveContext> load_contexts(const std::string& path) {
    nlohmann::json j = load_json(path);
    const nlohmann::json& arr = j.is_object() ? j.at("contexts") : j;
    std::vector<ProjectiveContext> contexts;
    for (const auto& c : arr) contexts.push_back(context_from_json(c));
    return contexts;
}

struct ZooArgs {
    std::string model;
    int dim = 2;
    int grid = 10000;
    int n_points = 100000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string states_path;
    std::string contexts_path;
    std::string out_path;
};

// Support checks need rho for every context basis state, so the snapshot must
// carry those as probe states as well.
void register_ray_probes(OntologicalModel& model) {
    for (const auto& ctx : model.contexts()) {
        for (const auto& ray : ctx.basis_states()) {
            bool present = false;
            for (const auto& [state, prep] : model.states()) {
                present = present || state.digest() == ray.digest();
            }
            if (!present) model.register_state(ray);
        }
    }
}

int write_snapshot(const OntologicalModel& model, const ZooArgs& args) {
    auto snap = model.snapshot();
    write_text(args.out_path, snap.to_json().dump(2) + "\n");
    auto determinism = is_outcome_deterministic(model);
    std::cout << "model " << model.metadata().name << " dim " << model.dim() << " points "
              << model.space().size() << " states " << model.states().size() << " contexts "
              << model.contexts().size() << " deterministic "
              << (determinism.deterministic ? "yes" : "no") << " lambda_sufficient "
              << (model.metadata().claims_lambda_sufficient ? "yes" : "no") << "\n";
    std::cout << "wrote " << args.out_path << "\n";
    return 0;
}

int cmd_zoo(const ZooArgs& args) {
    zoo::ZooSpec spec;
    spec.model_id = args.model;
    spec.dim = args.dim;
    spec.grid_cells = args.grid;
    spec.sphere_points = args.n_points;
    spec.seed = args.seed;
    if (!args.states_path.empty()) spec.states = load_states(args.states_path);
    if (!args.contexts_path.empty()) spec.contexts = load_contexts(args.contexts_path);

    if (args.model == "bb") {
        if (spec.states.empty()) {
            std::cerr << "zoo: bb requires a finite state list (--states)\n";
            return 1;
        }
        if (spec.contexts.empty()) spec.contexts.push_back(complete_basis({}, spec.dim, "canonical"));
        // Snapshot ontic points: the listed states plus the measured rays.
        std::vector<Ket> points = spec.states;
        for (const auto& ctx : spec.contexts) {
            for (const auto& k : ctx.basis_states()) points.push_back(k);
        }
        auto model = zoo::build_bb_model(spec.dim, points);
        for (const auto& c : spec.contexts) model.register_context(c);
        for (const auto& s : spec.states) model.register_state(s);
        register_ray_probes(model);
        return write_snapshot(model, args);
    }
    if (args.model == "ks_qubit") {
        spec.dim = 2;
        if (spec.states.empty()) {
            if (!args.seed_given) {
                std::cerr << "zoo: ks_qubit without --states needs --seed for the default probes\n";
                return 1;
            }
            Rng rng(spec.seed);
            for (int i = 0; i < 8; ++i) spec.states.push_back(random_ket(2, rng));
        }
        if (spec.contexts.empty()) {
            for (std::size_t i = 0; i < spec.states.size(); ++i) {
                std::vector<Ket> partial{spec.states[i]};
                spec.contexts.push_back(complete_basis(partial, 2, "ctx_s" + std::to_string(i)));
            }
        }
        auto model = zoo::build(spec);
        register_ray_probes(model);
        return write_snapshot(model, args);
    }
    if (args.model == "bell") {
        if (spec.contexts.empty()) {
            std::cerr << "zoo: bell requires a context list (--contexts)\n";
            return 1;
        }
        if (spec.states.empty()) {
            // Deterministic default: the rays of the provided contexts.
            for (const auto& ctx : spec.contexts) {
                for (const auto& k : ctx.basis_states()) {
                    bool dup = false;
                    for (const auto& s : spec.states) dup = dup || s.same_ray(k);
                    if (!dup) spec.states.push_back(k);
                }
            }
        }
        auto model = zoo::build(spec);
        register_ray_probes(model);
        return write_snapshot(model, args);
    }
    std::cerr << "zoo: unknown model " << args.model << "\n";
    return 1;
}

struct VerifyArgs {
    std::string model_path;
    std::string checks = "validate,determinism,born,support,deficiency,cross_context,lambda_sufficiency";
    std::uint64_t seed = 0;
    std::string out_path;
    double born_tol = -1.0;
    double ctx_tol = -1.0;
};

int cmd_verify(const VerifyArgs& args) {
    auto snap = ModelSnapshot::from_json(load_json(args.model_path));
    auto model = OntologicalModel::from_snapshot(snap);
    verifier::SuiteConfig config;
    config.seed = args.seed;
    if (args.born_tol >= 0.0) config.born_tol = args.born_tol;
    if (args.ctx_tol >= 0.0) config.ctx_tol = args.ctx_tol;
    std::stringstream checks(args.checks);
    std::string id;
    while (std::getline(checks, id, ',')) {
        if (!id.empty()) config.checks.push_back(id);
    }
    auto report = verifier::run_report(model, config);
    if (!args.out_path.empty()) write_text(args.out_path, report.to_json().dump(2) + "\n");
    for (const auto& check : report.checks) {
        std::cout << check.id << ": "
                  << (!check.applicable ? "not applicable" : (check.pass ? "pass" : "FAIL"))
                  << " (max defect " << check.max_defect << ", witnesses " << check.witness_total
                  << ")\n";
    }
    return report.exit_code();
}

int cmd_feas_color(const std::string& rays_path, const std::string& out_path) {
    auto rayset = feasibility::RaySet::from_json(load_json(rays_path));
    auto result = feasibility::ks_colorable(rayset);
    nlohmann::ordered_json j{{"rays", rayset.rays.size()},
                             {"contexts", rayset.contexts.size()},
                             {"certificate", result.certificate()}};
    if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
    std::cout << (result.feasible ? "feasible" : "infeasible") << " after " << result.nodes
              << " nodes\n";
    return result.feasible ? 0 : 3;
}

int cmd_feas_lp(const std::string& problem_path, const std::string& out_path) {
    auto problem = feasibility::FeasibilityProblem::from_json(load_json(problem_path));
    auto result = feasibility::lp_feasible(problem);
    nlohmann::ordered_json j{{"certificate", result.certificate}};
    if (result.feasible) {
        auto jxi = nlohmann::ordered_json::array();
        for (const auto& t : result.xi_solution) {
            jxi.push_back({{"context", t.context_label},
                           {"effect_index", t.effect_index},
                           {"state", t.state_index},
                           {"table", t.table}});
        }
        auto jrho = nlohmann::ordered_json::array();
        for (const auto& t : result.rho_solution) {
            jrho.push_back({{"state", t.state_index}, {"density", t.density}});
        }
        j["xi_solution"] = std::move(jxi);
        j["rho_solution"] = std::move(jrho);
    }
    if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
    std::cout << (result.feasible ? "feasible" : "infeasible") << ", pivots " << result.pivots;
    if (result.feasible) std::cout << ", max residual " << result.max_residual;
    std::cout << "\n";
    return result.feasible ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ontoscope: discrete ontological models, structural checks, feasibility searches"};
    app.require_subcommand(1);

    ZooArgs zoo_args;
    auto* zoo_cmd = app.add_subcommand("zoo", "build a zoo model and write its JSON snapshot");
    zoo_cmd->add_option("--model", zoo_args.model, "bb | ks_qubit | bell")->required();
    zoo_cmd->add_option("--dim", zoo_args.dim, "Hilbert space dimension (bb, bell)");
    zoo_cmd->add_option("--grid", zoo_args.grid, "bell interval cells (>= 100)");
    zoo_cmd->add_option("--n", zoo_args.n_points, "ks_qubit sphere lattice points (>= 1000)");
    auto* seed_opt = zoo_cmd->add_option("--seed", zoo_args.seed, "seed for default Haar probes");
    zoo_cmd->add_option("--states", zoo_args.states_path, "states JSON file");
    zoo_cmd->add_option("--contexts", zoo_args.contexts_path, "contexts JSON file");
    zoo_cmd->add_option("--out", zoo_args.out_path, "output model JSON")->required();

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "run the verification suite on a model snapshot");
    verify_cmd->add_option("--model", verify_args.model_path, "model JSON snapshot")->required();
    verify_cmd->add_option("--checks", verify_args.checks, "comma-separated check ids");
    verify_cmd->add_option("--seed", verify_args.seed, "report seed");
    verify_cmd->add_option("--born-tol", verify_args.born_tol, "override Born tolerance");
    verify_cmd->add_option("--ctx-tol", verify_args.ctx_tol, "override cross-context tolerance");
    verify_cmd->add_option("--out", verify_args.out_path, "report JSON path");

    auto* feas_cmd = app.add_subcommand("feasibility", "coloring and LP feasibility");
    feas_cmd->require_subcommand(1);
    std::string rays_path, problem_path, feas_out;
    auto* color_cmd = feas_cmd->add_subcommand("color", "deterministic noncontextual coloring search");
    color_cmd->add_option("--rays", rays_path, "ray set JSON")->required();
    color_cmd->add_option("--out", feas_out, "certificate JSON path");
    auto* lp_cmd = feas_cmd->add_subcommand("lp", "linear feasibility under the Born constraint");
    lp_cmd->add_option("--problem", problem_path, "problem JSON")->required();
    lp_cmd->add_option("--out", feas_out, "certificate JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (zoo_cmd->parsed()) {
            zoo_args.seed_given = seed_opt->count() > 0;
            return cmd_zoo(zoo_args);
        }
        if (verify_cmd->parsed()) return cmd_verify(verify_args);
        if (feas_cmd->parsed()) {
            if (color_cmd->parsed()) return cmd_feas_color(rays_path, feas_out);
            if (lp_cmd->parsed()) return cmd_feas_lp(problem_path, feas_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
