#include "ontoscope/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <sstream>

namespace ontoscope {

namespace {

std::string fnv1a_hex(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace

Ket::Ket(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 1) throw std::invalid_argument("Ket: empty amplitude vector");
    double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol)
        throw std::invalid_argument("Ket: amplitudes not normalized (norm " + std::to_string(norm) + ")");
}

Complex Ket::overlap(const Ket& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("Ket::overlap: dimension mismatch");
    return amplitudes_.dot(other.amplitudes_);
}

bool Ket::same_ray(const Ket& other, double tol) const {
    if (dim() != other.dim()) return false;
    return std::abs(overlap(other)) > 1.0 - tol;
}

std::string Ket::digest() const {
    return fnv1a_hex(amplitudes_.data(), sizeof(Complex) * static_cast<std::size_t>(amplitudes_.size()));
}

Ket Ket::basis_state(int dim, int index) {
    if (index < 0 || index >= dim) throw std::invalid_argument("Ket::basis_state: index out of range");
    CVector v = CVector::Zero(dim);
    v(index) = Complex(1.0, 0.0);
    return Ket(std::move(v));
}

Effect::Effect(CMatrix m, std::optional<Ket> ray) : matrix_(std::move(m)), ray_(std::move(ray)) {}

Effect Effect::from_matrix(CMatrix m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument("Effect: matrix must be square and nonempty");
    double herm_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > kNormTol)
        throw std::invalid_argument("Effect: matrix not Hermitian (defect " + std::to_string(herm_defect) + ")");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo < -kNormTol || hi > 1.0 + kNormTol)
        throw std::invalid_argument("Effect: eigenvalues outside [0, 1]");
    return Effect(std::move(m), std::nullopt);
}

Effect Effect::rank1(const Ket& ray) {
    CMatrix m = ray.amplitudes() * ray.amplitudes().adjoint();
    return Effect(std::move(m), ray);
}

bool Effect::approx_equal(const Effect& other, double tol) const {
    if (dim() != other.dim()) return false;
    return (matrix_ - other.matrix_).cwiseAbs().maxCoeff() <= tol;
}

std::string Effect::key() const {
    // Round entries to 12 decimals first so rank-1 projectors built from
    // phase-shifted copies of one ray share a key despite last-ulp noise.
    std::vector<double> rounded;
    rounded.reserve(static_cast<std::size_t>(matrix_.size()) * 2);
    for (Eigen::Index c = 0; c < matrix_.cols(); ++c) {
        for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
            const Complex& z = matrix_(r, c);
            rounded.push_back(std::round(z.real() * 1e12) + 0.0);  // +0.0 folds -0 into +0
            rounded.push_back(std::round(z.imag() * 1e12) + 0.0);
        }
    }
    return fnv1a_hex(rounded.data(), rounded.size() * sizeof(double));
}

int ProjectiveContext::find_effect(const Effect& e, double tol) const {
    for (int i = 0; i < size(); ++i) {
        if (effects[static_cast<std::size_t>(i)].approx_equal(e, tol)) return i;
    }
    return -1;
}

std::vector<Ket> ProjectiveContext::basis_states() const {
    std::vector<Ket> out;
    out.reserve(effects.size());
    for (const auto& e : effects) {
        if (!e.rank1_ray()) throw std::invalid_argument("ProjectiveContext: effect missing rank-1 ray");
        out.push_back(*e.rank1_ray());
    }
    return out;
}

double born_probability(const Ket& state, const Effect& effect) {
    if (state.dim() != effect.dim())
        throw std::invalid_argument("born_probability: dimension mismatch");
    double p;
    if (effect.rank1_ray()) {
        p = std::norm(effect.rank1_ray()->overlap(state));
    } else {
        p = (state.amplitudes().adjoint() * effect.matrix() * state.amplitudes())(0).real();
    }
    if (p < 0.0 && p > -kNormTol) p = 0.0;
    if (p > 1.0 && p < 1.0 + kNormTol) p = 1.0;
    return p;
}

ContextVerdict validate_context(const ProjectiveContext& ctx) {
    ContextVerdict v;
    const int d = ctx.dim;
    if (d < 1 || ctx.effects.empty()) {
        v.orthogonality_defect = 1.0;
        v.completeness_defect = 1.0;
        return v;
    }
    for (const auto& e : ctx.effects) {
        if (e.dim() != d) {
            v.orthogonality_defect = 1.0;
            v.completeness_defect = 1.0;
            return v;
        }
    }
    CMatrix sum = CMatrix::Zero(d, d);
    for (int i = 0; i < ctx.size(); ++i) {
        sum += ctx.effect(i).matrix();
        for (int j = i + 1; j < ctx.size(); ++j) {
            double defect = (ctx.effect(i).matrix() * ctx.effect(j).matrix()).cwiseAbs().maxCoeff();
            v.orthogonality_defect = std::max(v.orthogonality_defect, defect);
        }
    }
    v.completeness_defect = (sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    v.pass = v.orthogonality_defect <= kNormTol && v.completeness_defect <= kNormTol;
    return v;
}

ContextVerdict validate_povm(const Povm& povm) {
    ContextVerdict v;
    CMatrix sum = CMatrix::Zero(povm.dim, povm.dim);
    for (const auto& e : povm.effects) sum += e.matrix();
    v.completeness_defect = (sum - CMatrix::Identity(povm.dim, povm.dim)).cwiseAbs().maxCoeff();
    v.pass = v.completeness_defect <= kNormTol;
    return v;
}

namespace {

// Shared Gram-Schmidt core: orthonormalizes `candidates` against `accepted`
// in order, appending survivors until `dim` vectors are accepted.
void gram_schmidt_extend(std::vector<CVector>& accepted, const std::vector<CVector>& candidates,
                         int dim, double residual_floor) {
    for (const auto& cand : candidates) {
        if (static_cast<int>(accepted.size()) == dim) break;
        CVector r = cand;
        for (const auto& a : accepted) r -= a.dot(r) * a;
        // Second pass for numerical orthogonality.
        for (const auto& a : accepted) r -= a.dot(r) * a;
        double n = r.norm();
        if (n < residual_floor) continue;
        accepted.push_back(r / n);
    }
}

}  // namespace

ProjectiveContext complete_basis(std::span<const Ket> partial, int dim, const std::string& label) {
    if (dim < 1) throw std::invalid_argument("complete_basis: dim must be >= 1");
    if (static_cast<int>(partial.size()) > dim)
        throw std::invalid_argument("complete_basis: more vectors than dimensions");
    std::vector<CVector> accepted;
    accepted.reserve(static_cast<std::size_t>(dim));
    for (const auto& k : partial) {
        if (k.dim() != dim) throw std::invalid_argument("complete_basis: dimension mismatch");
        for (const auto& a : accepted) {
            if (std::abs(a.dot(k.amplitudes())) > kNormTol)
                throw std::invalid_argument("complete_basis: input vectors not orthonormal");
        }
        accepted.push_back(k.amplitudes());
    }
    std::vector<CVector> canonical;
    canonical.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        CVector e = CVector::Zero(dim);
        e(i) = Complex(1.0, 0.0);
        canonical.push_back(std::move(e));
    }
    gram_schmidt_extend(accepted, canonical, dim, 1e-6);
    if (static_cast<int>(accepted.size()) != dim)
        throw std::invalid_argument("complete_basis: failed to complete basis");
    ProjectiveContext ctx;
    ctx.dim = dim;
    ctx.label = label;
    for (auto& v : accepted) ctx.effects.push_back(Effect::rank1(Ket(std::move(v))));
    return ctx;
}

Ket random_ket(int dim, Rng& rng) {
    if (dim < 2) throw std::invalid_argument("random_ket: dim must be >= 2");
    CVector v(dim);
    for (int i = 0; i < dim; ++i) {
        double re = rng.next_gaussian();
        double im = rng.next_gaussian();
        v(i) = Complex(re, im);
    }
    double n = v.norm();
    if (n == 0.0) {
        v(0) = Complex(1.0, 0.0);
        n = 1.0;
    }
    return Ket(v / n);
}

ProjectiveContext random_context_sharing(const Ket& first_ray, Rng& rng, const std::string& label) {
    const int dim = first_ray.dim();
    std::vector<CVector> accepted{first_ray.amplitudes()};
    std::vector<CVector> candidates;
    // Haar-random directions; Gram-Schmidt confines them to the complement.
    for (int i = 0; i < 2 * dim + 4 && static_cast<int>(accepted.size()) < dim; ++i) {
        candidates.push_back(random_ket(dim, rng).amplitudes());
    }
    gram_schmidt_extend(accepted, candidates, dim, 1e-6);
    if (static_cast<int>(accepted.size()) != dim)
        throw std::runtime_error("random_context_sharing: completion failed");
    ProjectiveContext ctx;
    ctx.dim = dim;
    ctx.label = label;
    for (auto& v : accepted) ctx.effects.push_back(Effect::rank1(Ket(std::move(v))));
    return ctx;
}

ProjectiveContext random_context(int dim, Rng& rng, const std::string& label) {
    return random_context_sharing(random_ket(dim, rng), rng, label);
}

std::array<double, 3> bloch_vector(const Ket& ket) {
    if (ket.dim() != 2) throw std::invalid_argument("bloch_vector: requires dim 2");
    Complex a = ket.amplitudes()(0);
    Complex b = ket.amplitudes()(1);
    Complex cross = std::conj(a) * b;
    return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(a) - std::norm(b)};
}

Ket ket_from_bloch(const std::array<double, 3>& u) {
    double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    if (std::abs(norm - 1.0) > 1e-6) throw std::invalid_argument("ket_from_bloch: vector not unit length");
    double theta = std::acos(std::clamp(u[2] / norm, -1.0, 1.0));
    double phi = std::atan2(u[1], u[0]);
    CVector v(2);
    v(0) = Complex(std::cos(theta / 2.0), 0.0);
    v(1) = std::polar(std::sin(theta / 2.0), phi);
    return Ket(v / v.norm());
}

nlohmann::ordered_json to_json(const Ket& k) {
    std::vector<double> re, im;
    re.reserve(static_cast<std::size_t>(k.dim()));
    im.reserve(static_cast<std::size_t>(k.dim()));
    for (int i = 0; i < k.dim(); ++i) {
        re.push_back(k.amplitudes()(i).real());
        im.push_back(k.amplitudes()(i).imag());
    }
    return nlohmann::ordered_json{{"dim", k.dim()}, {"re", re}, {"im", im}};
}

Ket ket_from_json(const nlohmann::json& j) {
    int dim = j.at("dim").get<int>();
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.at("im").get<std::vector<double>>();
    if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim)
        throw std::invalid_argument("ket_from_json: length mismatch");
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(re[static_cast<std::size_t>(i)], im[static_cast<std::size_t>(i)]);
    return Ket(std::move(v));
}

nlohmann::ordered_json to_json(const Effect& e) {
    if (e.rank1_ray()) return nlohmann::ordered_json{{"ray", to_json(*e.rank1_ray())}};
    std::vector<std::vector<double>> re, im;
    for (int r = 0; r < e.dim(); ++r) {
        std::vector<double> rowr, rowi;
        for (int c = 0; c < e.dim(); ++c) {
            rowr.push_back(e.matrix()(r, c).real());
            rowi.push_back(e.matrix()(r, c).imag());
        }
        re.push_back(std::move(rowr));
        im.push_back(std::move(rowi));
    }
    return nlohmann::ordered_json{{"matrix", nlohmann::ordered_json{{"re", re}, {"im", im}}}};
}

Effect effect_from_json(const nlohmann::json& j) {
    if (j.contains("ray")) return Effect::rank1(ket_from_json(j.at("ray")));
    const auto& m = j.at("matrix");
    auto re = m.at("re").get<std::vector<std::vector<double>>>();
    auto im = m.at("im").get<std::vector<std::vector<double>>>();
    int d = static_cast<int>(re.size());
    CMatrix mat(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            mat(r, c) = Complex(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                                im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    return Effect::from_matrix(std::move(mat));
}

nlohmann::ordered_json to_json(const ProjectiveContext& c) {
    nlohmann::ordered_json rays = nlohmann::ordered_json::array();
    for (const auto& e : c.effects) {
        if (!e.rank1_ray()) throw std::invalid_argument("to_json(context): effect missing rank-1 ray");
        rays.push_back(to_json(*e.rank1_ray()));
    }
    return nlohmann::ordered_json{{"label", c.label}, {"rays", rays}};
}

ProjectiveContext context_from_json(const nlohmann::json& j) {
    ProjectiveContext ctx;
    ctx.label = j.at("label").get<std::string>();
    for (const auto& r : j.at("rays")) {
        Ket k = ket_from_json(r);
        ctx.dim = k.dim();
        ctx.effects.push_back(Effect::rank1(std::move(k)));
    }
    return ctx;
}

}  // namespace ontoscope
