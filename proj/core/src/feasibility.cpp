#include "ontoscope/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ontoscope::feasibility {

using ratlp::Rational;
using ratlp::to_rational;

void RaySet::validate() const {
    if (dim < 2) throw std::invalid_argument("RaySet: dim must be >= 2");
    for (const auto& r : rays) {
        if (r.dim() != dim) throw std::invalid_argument("RaySet: ray dimension mismatch");
    }
    for (const auto& ctx : contexts) {
        if (static_cast<int>(ctx.size()) != dim)
            throw std::invalid_argument("RaySet: context must name exactly dim rays");
        for (std::size_t a = 0; a < ctx.size(); ++a) {
            int ia = ctx[a];
            if (ia < 0 || ia >= static_cast<int>(rays.size()))
                throw std::invalid_argument("RaySet: ray index out of range");
            for (std::size_t b = a + 1; b < ctx.size(); ++b) {
                const auto& u = rays[static_cast<std::size_t>(ia)];
                const auto& v = rays[static_cast<std::size_t>(ctx[b])];
                if (std::abs(u.overlap(v)) > kNormTol)
                    throw std::invalid_argument("RaySet: context rays not mutually orthogonal");
            }
        }
    }
}

nlohmann::ordered_json RaySet::to_json() const {
    nlohmann::ordered_json jrays = nlohmann::ordered_json::array();
    for (const auto& r : rays) {
        std::vector<double> re, im;
        for (int i = 0; i < r.dim(); ++i) {
            re.push_back(r.amplitudes()(i).real());
            im.push_back(r.amplitudes()(i).imag());
        }
        jrays.push_back(nlohmann::ordered_json::array({re, im}));
    }
    return nlohmann::ordered_json{{"dim", dim}, {"rays", std::move(jrays)}, {"contexts", contexts}};
}

RaySet RaySet::from_json(const nlohmann::json& j) {
    RaySet rs;
    rs.dim = j.at("dim").get<int>();
    for (const auto& jr : j.at("rays")) {
        auto re = jr.at(0).get<std::vector<double>>();
        auto im = jr.at(1).get<std::vector<double>>();
        if (re.size() != im.size()) throw std::invalid_argument("RaySet: ray re/im length mismatch");
        CVector v(static_cast<int>(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<int>(i)) = Complex(re[i], im[i]);
        double n = v.norm();
        if (n == 0.0) throw std::invalid_argument("RaySet: zero ray");
        rs.rays.push_back(Ket(v / n));
    }
    rs.contexts = j.at("contexts").get<std::vector<std::vector<int>>>();
    rs.validate();
    return rs;
}

RaySet rays_from_contexts(std::span<const ProjectiveContext> contexts) {
    RaySet rs;
    for (const auto& ctx : contexts) {
        if (rs.dim == 0) rs.dim = ctx.dim;
        if (ctx.dim != rs.dim) throw std::invalid_argument("rays_from_contexts: dimension mismatch");
        std::vector<int> tuple;
        for (const auto& effect : ctx.effects) {
            if (!effect.rank1_ray())
                throw std::invalid_argument("rays_from_contexts: effect missing rank-1 ray");
            const Ket& ray = *effect.rank1_ray();
            int found = -1;
            for (std::size_t i = 0; i < rs.rays.size(); ++i) {
                if (rs.rays[i].same_ray(ray)) {
                    found = static_cast<int>(i);
                    break;
                }
            }
            if (found < 0) {
                found = static_cast<int>(rs.rays.size());
                rs.rays.push_back(ray);
            }
            tuple.push_back(found);
        }
        rs.contexts.push_back(std::move(tuple));
    }
    return rs;
}

nlohmann::ordered_json ColoringResult::certificate() const {
    if (feasible)
        return nlohmann::ordered_json{{"type", "assignment"}, {"values", assignment}, {"nodes", nodes}};
    return nlohmann::ordered_json{{"type", "exhaustion"}, {"nodes", nodes}};
}

namespace {

struct ColoringSearch {
    const RaySet& rayset;
    std::vector<std::vector<int>> contexts_of;  // ray -> context indices
    std::vector<int> value;                     // -1 unassigned / 0 / 1
    std::vector<int> ones, assigned;            // per-context counters
    std::vector<int> trail;
    std::uint64_t nodes = 0;

    explicit ColoringSearch(const RaySet& rs)
        : rayset(rs),
          contexts_of(rs.rays.size()),
          value(rs.rays.size(), -1),
          ones(rs.contexts.size(), 0),
          assigned(rs.contexts.size(), 0) {
        for (std::size_t c = 0; c < rs.contexts.size(); ++c) {
            for (int r : rs.contexts[c]) contexts_of[static_cast<std::size_t>(r)].push_back(static_cast<int>(c));
        }
    }

    // Assign and propagate; false on contradiction.
    bool assign(int ray, int v) {
        const auto r = static_cast<std::size_t>(ray);
        if (value[r] != -1) return value[r] == v;
        value[r] = v;
        trail.push_back(ray);
        for (int c : contexts_of[r]) {
            const auto ci = static_cast<std::size_t>(c);
            ++assigned[ci];
            if (v == 1) ++ones[ci];
        }
        for (int c : contexts_of[r]) {
            const auto ci = static_cast<std::size_t>(c);
            const auto& tuple = rayset.contexts[ci];
            const int d = static_cast<int>(tuple.size());
            if (ones[ci] > 1) return false;
            if (ones[ci] == 0 && assigned[ci] == d) return false;
            if (ones[ci] == 1 && assigned[ci] < d) {
                for (int other : tuple) {
                    if (value[static_cast<std::size_t>(other)] == -1 && !assign(other, 0)) return false;
                }
            } else if (ones[ci] == 0 && assigned[ci] == d - 1) {
                for (int other : tuple) {
                    if (value[static_cast<std::size_t>(other)] == -1 && !assign(other, 1)) return false;
                }
            }
        }
        return true;
    }

    void undo(std::size_t mark) {
        while (trail.size() > mark) {
            int ray = trail.back();
            trail.pop_back();
            const auto r = static_cast<std::size_t>(ray);
            for (int c : contexts_of[r]) {
                const auto ci = static_cast<std::size_t>(c);
                --assigned[ci];
                if (value[r] == 1) --ones[ci];
            }
            value[r] = -1;
        }
    }

    bool dfs() {
        int next = -1;
        for (std::size_t r = 0; r < value.size(); ++r) {
            if (value[r] == -1) {
                next = static_cast<int>(r);
                break;
            }
        }
        if (next == -1) return true;  // propagation keeps every context consistent
        ++nodes;
        for (int v : {1, 0}) {
            std::size_t mark = trail.size();
            if (assign(next, v) && dfs()) return true;
            undo(mark);
        }
        return false;
    }
};

}  // namespace

ColoringResult ks_colorable(const RaySet& rayset) {
    rayset.validate();
    ColoringSearch search(rayset);
    ColoringResult result;
    result.feasible = search.dfs();
    result.nodes = search.nodes;
    if (result.feasible) {
        result.assignment.assign(rayset.rays.size(), 0);
        for (std::size_t r = 0; r < search.value.size(); ++r) {
            if (search.value[r] == 1) result.assignment[r] = 1;
        }
        for (const auto& tuple : rayset.contexts) {
            int sum = 0;
            for (int r : tuple) sum += result.assignment[static_cast<std::size_t>(r)];
            if (sum != 1) throw std::logic_error("ks_colorable: returned assignment violates a context");
        }
    }
    return result;
}

RaySet bks18_rayset() {
    static const int vecs[9][4][4] = {
        {{0, 0, 0, 1}, {0, 0, 1, 0}, {1, 1, 0, 0}, {1, -1, 0, 0}},
        {{0, 0, 0, 1}, {0, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, -1, 0}},
        {{1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}},
        {{1, -1, 1, -1}, {1, 1, 1, 1}, {1, 0, -1, 0}, {0, 1, 0, -1}},
        {{0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 1}, {1, 0, 0, -1}},
        {{1, -1, -1, 1}, {1, 1, 1, 1}, {1, 0, 0, -1}, {0, 1, -1, 0}},
        {{1, 1, -1, 1}, {1, 1, 1, -1}, {1, -1, 0, 0}, {0, 0, 1, 1}},
        {{1, 1, -1, 1}, {-1, 1, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, -1}},
        {{1, 1, 1, -1}, {-1, 1, 1, 1}, {1, 0, 0, 1}, {0, 1, -1, 0}},
    };
    std::vector<ProjectiveContext> contexts;
    for (int c = 0; c < 9; ++c) {
        ProjectiveContext ctx;
        ctx.dim = 4;
        ctx.label = "B" + std::to_string(c + 1);
        for (int r = 0; r < 4; ++r) {
            CVector v(4);
            for (int i = 0; i < 4; ++i) v(i) = Complex(vecs[c][r][i], 0.0);
            ctx.effects.push_back(Effect::rank1(Ket(v / v.norm())));
        }
        contexts.push_back(std::move(ctx));
    }
    RaySet rs = rays_from_contexts(contexts);
    rs.validate();
    return rs;
}

namespace {

const RhoTable* find_rho(const FeasibilityProblem& problem, int state_index) {
    for (const auto& t : problem.fixed_rho) {
        if (t.state_index == state_index) return &t;
    }
    return nullptr;
}

const XiTable* find_xi(const FeasibilityProblem& problem, const std::string& context_label,
                       int effect_index, int state_index) {
    const XiTable* generic = nullptr;
    for (const auto& t : problem.fixed_xi) {
        if (t.context_label != context_label || t.effect_index != effect_index) continue;
        if (t.state_index == state_index) return &t;
        if (t.state_index == -1) generic = &t;
    }
    return generic;
}

const ProjectiveContext& context_by_label(const FeasibilityProblem& problem, const std::string& label) {
    for (const auto& c : problem.contexts) {
        if (c.label == label) return c;
    }
    throw std::invalid_argument("FeasibilityProblem: unknown context label " + label);
}

}  // namespace

void FeasibilityProblem::validate() const {
    if (dim < 2) throw std::invalid_argument("FeasibilityProblem: dim must be >= 2");
    space.validate();
    const auto n = static_cast<std::size_t>(space.size());
    for (const auto& s : states) {
        if (s.dim() != dim) throw std::invalid_argument("FeasibilityProblem: state dimension mismatch");
    }
    for (const auto& c : contexts) {
        if (!validate_context(c).pass)
            throw std::invalid_argument("FeasibilityProblem: invalid context " + c.label);
    }
    if (mode == Mode::FixRhoSolveXi) {
        if (fixed_rho.empty() || !fixed_xi.empty())
            throw std::invalid_argument(
                "FeasibilityProblem: fix_rho_solve_xi requires fixed_rho only (one side free)");
        for (const auto& t : fixed_rho) {
            if (t.state_index < 0 || t.state_index >= static_cast<int>(states.size()))
                throw std::invalid_argument("FeasibilityProblem: fixed_rho state index out of range");
            if (t.density.size() != n)
                throw std::invalid_argument("FeasibilityProblem: fixed_rho table length mismatch");
            for (double v : t.density) {
                if (v < 0.0) throw std::invalid_argument("FeasibilityProblem: negative density");
            }
        }
    } else {
        if (fixed_xi.empty() || !fixed_rho.empty())
            throw std::invalid_argument(
                "FeasibilityProblem: fix_xi_solve_rho requires fixed_xi only (one side free)");
        for (const auto& t : fixed_xi) {
            context_by_label(*this, t.context_label);
            if (t.table.size() != n)
                throw std::invalid_argument("FeasibilityProblem: fixed_xi table length mismatch");
            for (double v : t.table) {
                if (v < -kNormTol || v > 1.0 + kNormTol)
                    throw std::invalid_argument("FeasibilityProblem: response value outside [0,1]");
            }
        }
    }
    // Target groups must be complete per (state, context) and sum to one.
    std::map<std::pair<int, std::string>, std::map<int, double>> groups;
    for (const auto& t : targets) {
        if (t.state_index < 0 || t.state_index >= static_cast<int>(states.size()))
            throw std::invalid_argument("FeasibilityProblem: target state index out of range");
        if (t.probability < -1e-12 || t.probability > 1.0 + 1e-12)
            throw std::invalid_argument("FeasibilityProblem: target outside [0,1]");
        if (!(t.scale > 0.0)) throw std::invalid_argument("FeasibilityProblem: row scale must be positive");
        const auto& ctx = context_by_label(*this, t.context_label);
        if (t.effect_index < 0 || t.effect_index >= ctx.size())
            throw std::invalid_argument("FeasibilityProblem: target effect index out of range");
        auto& group = groups[{t.state_index, t.context_label}];
        if (!group.emplace(t.effect_index, t.probability).second)
            throw std::invalid_argument("FeasibilityProblem: duplicate target");
        if (mode == Mode::FixRhoSolveXi && find_rho(*this, t.state_index) == nullptr)
            throw std::invalid_argument("FeasibilityProblem: target state has no fixed density");
        if (mode == Mode::FixXiSolveRho &&
            find_xi(*this, t.context_label, t.effect_index, t.state_index) == nullptr)
            throw std::invalid_argument("FeasibilityProblem: target effect has no fixed response");
    }
    for (const auto& [key, group] : groups) {
        const auto& ctx = context_by_label(*this, key.second);
        if (static_cast<int>(group.size()) != ctx.size())
            throw std::invalid_argument("FeasibilityProblem: incomplete target group for context " +
                                        key.second);
        double sum = 0.0;
        for (const auto& [idx, p] : group) sum += p;
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("FeasibilityProblem: context targets sum to " +
                                        std::to_string(sum) + ", expected 1");
    }
}

LpResult lp_feasible(const FeasibilityProblem& problem) {
    problem.validate();
    const int n = problem.space.size();
    LpResult out;

    ratlp::Problem lp;
    std::vector<Rational> mu;
    mu.reserve(static_cast<std::size_t>(n));
    for (double m : problem.space.measure) mu.push_back(to_rational(m));

    if (problem.mode == FeasibilityProblem::Mode::FixRhoSolveXi) {
        // Variable blocks: one response table per (effect class, state slice).
        auto class_key = [&](const ProjectiveContext& ctx, int e) {
            return problem.noncontextual ? ctx.effect(e).key()
                                         : ctx.label + "#" + std::to_string(e);
        };
        auto block_key = [&](const ProjectiveContext& ctx, int e, int s) {
            return problem.lambda_sufficient ? class_key(ctx, e)
                                             : class_key(ctx, e) + "|s" + std::to_string(s);
        };
        std::map<std::string, int> blocks;
        auto block_base = [&](const std::string& key) {
            auto it = blocks.find(key);
            if (it != blocks.end()) return it->second;
            int base = static_cast<int>(blocks.size()) * n;
            blocks.emplace(key, base);
            return base;
        };
        std::vector<int> slices;
        if (problem.lambda_sufficient) {
            slices.push_back(-1);
        } else {
            for (int s = 0; s < static_cast<int>(problem.states.size()); ++s) slices.push_back(s);
        }
        // Materialize all blocks first so num_vars is known.
        for (const auto& ctx : problem.contexts) {
            for (int e = 0; e < ctx.size(); ++e) {
                for (int s : slices) block_base(block_key(ctx, e, s));
            }
        }
        lp.num_vars = static_cast<int>(blocks.size()) * n;
        lp.var_upper.assign(static_cast<std::size_t>(lp.num_vars), Rational(1));

        for (const auto& ctx : problem.contexts) {
            for (int s : slices) {
                for (int l = 0; l < n; ++l) {
                    ratlp::Row row;
                    row.label = "norm:" + ctx.label + (s >= 0 ? "|s" + std::to_string(s) : "") + ":" +
                                std::to_string(l);
                    for (int e = 0; e < ctx.size(); ++e) {
                        row.coeffs.emplace_back(block_base(block_key(ctx, e, s)) + l, Rational(1));
                    }
                    row.lo = row.hi = Rational(1);
                    lp.rows.push_back(std::move(row));
                }
            }
        }
        for (std::size_t t = 0; t < problem.targets.size(); ++t) {
            const auto& target = problem.targets[t];
            const auto& ctx = context_by_label(problem, target.context_label);
            const auto* rho = find_rho(problem, target.state_index);
            int slice = problem.lambda_sufficient ? -1 : target.state_index;
            int base = block_base(block_key(ctx, target.effect_index, slice));
            Rational scale = to_rational(target.scale);
            ratlp::Row row;
            row.label = "born:" + std::to_string(t);
            for (int l = 0; l < n; ++l) {
                Rational coeff =
                    scale * to_rational(rho->density[static_cast<std::size_t>(l)]) * mu[static_cast<std::size_t>(l)];
                if (coeff != 0) row.coeffs.emplace_back(base + l, coeff);
            }
            Rational p = to_rational(target.probability);
            Rational tol = to_rational(problem.tol);
            row.lo = scale * (p - tol);
            row.hi = scale * (p + tol);
            lp.rows.push_back(std::move(row));
        }

        auto solved = ratlp::solve(lp);
        out.pivots = solved.pivots;
        if (!solved.feasible) {
            out.feasible = false;
            nlohmann::ordered_json multipliers = nlohmann::ordered_json::array();
            for (const auto& [label, q] : solved.certificate.row_multipliers) {
                multipliers.push_back({{"row", label}, {"multiplier", ratlp::to_double(q)}});
            }
            out.certificate = nlohmann::ordered_json{{"type", "infeasible"},
                                                     {"farkas", std::move(multipliers)},
                                                     {"gap", ratlp::to_double(solved.certificate.gap)},
                                                     {"pivots", out.pivots}};
            return out;
        }
        out.feasible = true;
        for (const auto& ctx : problem.contexts) {
            for (int e = 0; e < ctx.size(); ++e) {
                for (int s : slices) {
                    int base = block_base(block_key(ctx, e, s));
                    XiTable table;
                    table.context_label = ctx.label;
                    table.effect_index = e;
                    table.state_index = s;
                    for (int l = 0; l < n; ++l)
                        table.table.push_back(ratlp::to_double(solved.x[static_cast<std::size_t>(base + l)]));
                    out.xi_solution.push_back(std::move(table));
                }
            }
        }
        // Exact residual of the returned point against the Born targets.
        Rational worst(0);
        for (const auto& target : problem.targets) {
            const auto& ctx = context_by_label(problem, target.context_label);
            const auto* rho = find_rho(problem, target.state_index);
            int slice = problem.lambda_sufficient ? -1 : target.state_index;
            int base = block_base(block_key(ctx, target.effect_index, slice));
            Rational sum(0);
            for (int l = 0; l < n; ++l) {
                sum += to_rational(rho->density[static_cast<std::size_t>(l)]) *
                       mu[static_cast<std::size_t>(l)] * solved.x[static_cast<std::size_t>(base + l)];
            }
            Rational residual = abs(sum - to_rational(target.probability));
            if (residual > worst) worst = residual;
        }
        out.max_residual = ratlp::to_double(worst);
        out.certificate = nlohmann::ordered_json{
            {"type", "solution"}, {"max_residual", out.max_residual}, {"pivots", out.pivots}};
        return out;
    }

    // FixXiSolveRho: one density block per state.
    lp.num_vars = static_cast<int>(problem.states.size()) * n;
    for (int s = 0; s < static_cast<int>(problem.states.size()); ++s) {
        ratlp::Row row;
        row.label = "norm:s" + std::to_string(s);
        for (int l = 0; l < n; ++l) row.coeffs.emplace_back(s * n + l, mu[static_cast<std::size_t>(l)]);
        row.lo = row.hi = Rational(1);
        lp.rows.push_back(std::move(row));
    }
    for (std::size_t t = 0; t < problem.targets.size(); ++t) {
        const auto& target = problem.targets[t];
        const auto* xi = find_xi(problem, target.context_label, target.effect_index, target.state_index);
        Rational scale = to_rational(target.scale);
        ratlp::Row row;
        row.label = "born:" + std::to_string(t);
        for (int l = 0; l < n; ++l) {
            Rational coeff = scale * to_rational(xi->table[static_cast<std::size_t>(l)]) *
                             mu[static_cast<std::size_t>(l)];
            if (coeff != 0) row.coeffs.emplace_back(target.state_index * n + l, coeff);
        }
        Rational p = to_rational(target.probability);
        Rational tol = to_rational(problem.tol);
        row.lo = scale * (p - tol);
        row.hi = scale * (p + tol);
        lp.rows.push_back(std::move(row));
    }

    auto solved = ratlp::solve(lp);
    out.pivots = solved.pivots;
    if (!solved.feasible) {
        out.feasible = false;
        nlohmann::ordered_json multipliers = nlohmann::ordered_json::array();
        for (const auto& [label, q] : solved.certificate.row_multipliers) {
            multipliers.push_back({{"row", label}, {"multiplier", ratlp::to_double(q)}});
        }
        out.certificate = nlohmann::ordered_json{{"type", "infeasible"},
                                                 {"farkas", std::move(multipliers)},
                                                 {"gap", ratlp::to_double(solved.certificate.gap)},
                                                 {"pivots", out.pivots}};
        return out;
    }
    out.feasible = true;
    for (int s = 0; s < static_cast<int>(problem.states.size()); ++s) {
        RhoTable table;
        table.state_index = s;
        for (int l = 0; l < n; ++l)
            table.density.push_back(ratlp::to_double(solved.x[static_cast<std::size_t>(s * n + l)]));
        out.rho_solution.push_back(std::move(table));
    }
    Rational worst(0);
    for (const auto& target : problem.targets) {
        const auto* xi = find_xi(problem, target.context_label, target.effect_index, target.state_index);
        Rational sum(0);
        for (int l = 0; l < n; ++l) {
            sum += to_rational(xi->table[static_cast<std::size_t>(l)]) * mu[static_cast<std::size_t>(l)] *
                   solved.x[static_cast<std::size_t>(target.state_index * n + l)];
        }
        Rational residual = abs(sum - to_rational(target.probability));
        if (residual > worst) worst = residual;
    }
    out.max_residual = ratlp::to_double(worst);
    out.certificate = nlohmann::ordered_json{
        {"type", "solution"}, {"max_residual", out.max_residual}, {"pivots", out.pivots}};
    return out;
}

nlohmann::ordered_json FeasibilityProblem::to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = mode == Mode::FixRhoSolveXi ? "fix_rho_solve_xi" : "fix_xi_solve_rho";
    j["dim"] = dim;
    j["tol"] = tol;
    j["lambda_sufficient"] = lambda_sufficient;
    j["noncontextual"] = noncontextual;
    j["ontic"] = {{"ids", space.ids}, {"measure", space.measure}};
    auto jstates = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < states.size(); ++s) {
        jstates.push_back({{"ket", ontoscope::to_json(states[s])},
                           {"prep", s < preps.size() ? preps[s] : "P0"}});
    }
    j["states"] = std::move(jstates);
    auto jctx = nlohmann::ordered_json::array();
    for (const auto& c : contexts) jctx.push_back(ontoscope::to_json(c));
    j["contexts"] = std::move(jctx);
    auto jrho = nlohmann::ordered_json::array();
    for (const auto& t : fixed_rho) jrho.push_back({{"state", t.state_index}, {"density", t.density}});
    j["fixed_rho"] = std::move(jrho);
    auto jxi = nlohmann::ordered_json::array();
    for (const auto& t : fixed_xi) {
        jxi.push_back({{"context", t.context_label},
                       {"effect_index", t.effect_index},
                       {"state", t.state_index},
                       {"table", t.table}});
    }
    j["fixed_xi"] = std::move(jxi);
    auto jtargets = nlohmann::ordered_json::array();
    for (const auto& t : targets) {
        jtargets.push_back({{"state", t.state_index},
                            {"context", t.context_label},
                            {"effect_index", t.effect_index},
                            {"p", t.probability},
                            {"scale", t.scale}});
    }
    j["targets"] = std::move(jtargets);
    return j;
}

FeasibilityProblem FeasibilityProblem::from_json(const nlohmann::json& j) {
    FeasibilityProblem p;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "fix_rho_solve_xi") {
        p.mode = Mode::FixRhoSolveXi;
    } else if (mode == "fix_xi_solve_rho") {
        p.mode = Mode::FixXiSolveRho;
    } else {
        throw std::invalid_argument("FeasibilityProblem: unknown mode " + mode);
    }
    p.dim = j.at("dim").get<int>();
    p.tol = j.value("tol", 1e-7);
    p.lambda_sufficient = j.value("lambda_sufficient", true);
    p.noncontextual = j.value("noncontextual", false);
    p.space.ids = j.at("ontic").at("ids").get<std::vector<std::string>>();
    p.space.measure = j.at("ontic").at("measure").get<std::vector<double>>();
    for (const auto& s : j.at("states")) {
        p.states.push_back(ket_from_json(s.at("ket")));
        p.preps.push_back(s.value("prep", "P0"));
    }
    for (const auto& c : j.at("contexts")) p.contexts.push_back(context_from_json(c));
    if (j.contains("fixed_rho")) {
        for (const auto& t : j.at("fixed_rho")) {
            p.fixed_rho.push_back(
                {t.at("state").get<int>(), t.at("density").get<std::vector<double>>()});
        }
    }
    if (j.contains("fixed_xi")) {
        for (const auto& t : j.at("fixed_xi")) {
            XiTable x;
            x.context_label = t.at("context").get<std::string>();
            x.effect_index = t.at("effect_index").get<int>();
            x.state_index = t.value("state", -1);
            x.table = t.at("table").get<std::vector<double>>();
            p.fixed_xi.push_back(std::move(x));
        }
    }
    for (const auto& t : j.at("targets")) {
        BornTarget target;
        target.state_index = t.at("state").get<int>();
        target.context_label = t.at("context").get<std::string>();
        target.effect_index = t.at("effect_index").get<int>();
        target.probability = t.at("p").get<double>();
        target.scale = t.value("scale", 1.0);
        p.targets.push_back(std::move(target));
    }
    return p;
}

}  // namespace ontoscope::feasibility
