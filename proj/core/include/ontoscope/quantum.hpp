#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ontoscope/rng.hpp"

namespace ontoscope {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Tolerance for all quantum-side invariant checks (normalization,
// Hermiticity, orthogonality, completeness).
inline constexpr double kNormTol = 1e-9;

// Two unit rays are identified when |<u|v>| exceeds this.
inline constexpr double kRayIdentityTol = 1e-9;

/// Normalized pure state of a finite-dimensional system.
class Ket {
   public:
    /// Throws std::invalid_argument unless the amplitudes are unit-norm
    /// within kNormTol and dim >= 1.
    explicit Ket(CVector amplitudes);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const CVector& amplitudes() const { return amplitudes_; }

    /// <this|other>.
    Complex overlap(const Ket& other) const;

    /// Phase-invariant ray identity: |<u|v>| > 1 - tol.
    bool same_ray(const Ket& other, double tol = kRayIdentityTol) const;

    /// Bit-exact fingerprint of the amplitude doubles (FNV-1a, hex).
    /// Used as a cache and serialization key; global phase is NOT modded out.
    std::string digest() const;

    static Ket basis_state(int dim, int index);

   private:
    CVector amplitudes_;
};

/// POVM element: positive-semidefinite matrix with eigenvalues in [0, 1].
/// Carries the generating ray when the effect is a rank-1 projector.
class Effect {
   public:
    /// Validates Hermiticity and the eigenvalue range.
    static Effect from_matrix(CMatrix m);

    /// |ray><ray|.
    static Effect rank1(const Ket& ray);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const CMatrix& matrix() const { return matrix_; }
    const std::optional<Ket>& rank1_ray() const { return ray_; }

    bool approx_equal(const Effect& other, double tol = kNormTol) const;

    /// Fingerprint of the matrix entries; phase-invariant for rank-1
    /// projectors since |r><r| absorbs the ray's global phase.
    std::string key() const;

   private:
    Effect(CMatrix m, std::optional<Ket> ray);
    CMatrix matrix_;
    std::optional<Ket> ray_;
};

/// Complete set of d mutually orthogonal rank-1 projectors, in a fixed
/// order. The label identifies the measurement setting M; the order is
/// part of the setting (the Bell construction depends on it).
struct ProjectiveContext {
    int dim = 0;
    std::vector<Effect> effects;
    std::string label;

    const Effect& effect(int i) const { return effects.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(effects.size()); }

    /// Index of the effect matching `e` (ray identity), or -1.
    int find_effect(const Effect& e, double tol = kNormTol) const;

    /// The rays of the effects, in context order.
    std::vector<Ket> basis_states() const;
};

/// General positive operator-valued measure: effects summing to identity.
struct Povm {
    int dim = 0;
    std::vector<Effect> effects;
};

struct ContextVerdict {
    double orthogonality_defect = 0.0;  // max |<entry>| of E_i * E_j, i != j
    double completeness_defect = 0.0;   // max |entry| of (sum E_i) - I
    bool pass = false;
};

/// Born rule: <psi|E|psi>. Tiny negative round-off (< kNormTol in magnitude)
/// is clamped to zero. Throws on dimension mismatch or non-normalized input.
double born_probability(const Ket& state, const Effect& effect);

/// Checks pairwise orthogonality and completeness of a context.
ContextVerdict validate_context(const ProjectiveContext& ctx);

/// Completes `partial` to a full orthonormal context by Gram-Schmidt over
/// canonical basis vectors in ascending index order, skipping candidates
/// whose residual norm falls below 1e-6. Deterministic for identical input.
/// Throws if the partial set is not orthonormal.
ProjectiveContext complete_basis(std::span<const Ket> partial, int dim,
                                 const std::string& label = "");

inline ProjectiveContext complete_basis(std::initializer_list<Ket> partial, int dim,
                                        const std::string& label = "") {
    return complete_basis(std::span<const Ket>(partial.begin(), partial.size()), dim, label);
}

/// Haar-uniform random unit vector (complex Gaussian entries, normalized).
/// Requires dim >= 2. Identical generator state gives bit-identical output.
Ket random_ket(int dim, Rng& rng);

/// A Haar-random context whose first effect is |first_ray><first_ray|:
/// the remaining rays are random inside the orthogonal complement.
ProjectiveContext random_context_sharing(const Ket& first_ray, Rng& rng,
                                         const std::string& label = "");

/// Fully Haar-random context (random_context_sharing of a random ray).
ProjectiveContext random_context(int dim, Rng& rng, const std::string& label = "");

/// Checks Sum E_i = 1 and E_i >= 0 for a POVM.
ContextVerdict validate_povm(const Povm& povm);

// Bloch-sphere helpers, d = 2 only.
std::array<double, 3> bloch_vector(const Ket& ket);
Ket ket_from_bloch(const std::array<double, 3>& unit);

// JSON encoding: Ket as {"dim", "re", "im"}; Effect as {"ray": Ket} for
// rank-1 projectors or {"matrix": {"re", "im"}} otherwise; context as
// {"label", "rays"}.
nlohmann::ordered_json to_json(const Ket& k);
nlohmann::ordered_json to_json(const Effect& e);
nlohmann::ordered_json to_json(const ProjectiveContext& c);
Ket ket_from_json(const nlohmann::json& j);
Effect effect_from_json(const nlohmann::json& j);
ProjectiveContext context_from_json(const nlohmann::json& j);

}  // namespace ontoscope
