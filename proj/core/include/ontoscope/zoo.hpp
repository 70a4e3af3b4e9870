#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ontoscope/ontic.hpp"

namespace ontoscope::zoo {

/// Parameters for a zoo build, mirroring the CLI surface.
struct ZooSpec {
    std::string model_id;  // "bb" | "ks_qubit" | "bell"
    int dim = 2;
    int sphere_points = 100000;  // ks_qubit lattice size, >= 1000
    int grid_cells = 10000;      // bell interval cells, >= 100
    std::uint64_t seed = 0;
    std::vector<Ket> states;                 // bb requires a nonempty list
    std::vector<ProjectiveContext> contexts; // bell requires a nonempty list
};

/// psi-complete model: the ontic points are the listed quantum states
/// themselves, rho is a point mass at lambda = psi and xi_E(lambda) =
/// <lambda|E|lambda>. Outcome-indeterministic, lambda-sufficient,
/// noncontextual; reproduces the Born rule exactly.
OntologicalModel build_bb_model(int dim, const std::vector<Ket>& state_list);

/// Deterministic lambda-sufficient qubit model on a Fibonacci lattice of
/// the Bloch sphere: rho(lambda|psi) ~ cos(theta) on the open hemisphere
/// around psi, xi for a rank-1 effect is the closed-hemisphere indicator
/// around its Bloch axis. Born agreement is approximate in the lattice size.
OntologicalModel build_ks_qubit_model(int n_points, std::uint64_t seed);

/// Bell's interval construction: ontic space is [0,1] in equal cells, rho
/// is uniform for every state, and the outcome for a cell at midpoint tau
/// is the first effect (in the context's stored order) whose cumulative
/// Born weight reaches tau. Deterministic, measurement-contextual through
/// the effect ordering, and explicitly state-dependent (lambda-insufficient).
OntologicalModel build_bell_model(int dim, int n_grid, const std::vector<ProjectiveContext>& context_list);

/// Dispatch on model_id; registers the given states and contexts.
OntologicalModel build(const ZooSpec& spec);

/// Equal-weight Fibonacci lattice on the unit sphere.
std::vector<std::array<double, 3>> fibonacci_sphere(int n);

}  // namespace ontoscope::zoo
