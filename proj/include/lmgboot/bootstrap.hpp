#pragma once

// Operator bootstrap: Gram matrix and structure-constant slices of a finite
// operator algebra, the linear constraint system for one symmetry sector,
// and its solution by nullspace projection plus a small eigenproblem.

#include "spin_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lmgboot {

class SingularGram : public std::runtime_error {
    public:
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double gamma = 1.0;
    double hx    = 1.0;
    double hz    = 1.0;
};

struct Tolerances {
    double null_space  = 1e-9; // relative SVD cut on the constraint matrix
    double residual    = 1e-7; // accept/reject on ‖Av − Ev‖ and ‖Kv‖
    double degeneracy  = 1e-8; // energy clustering, relative to spectral width
    double imag_energy = 1e-8; // |Im E| > imag_energy (1 + |Re E|) is rejected
    double gram_rank   = 1e-10;
    // Monomials are normalized before forming B for L above this size.
    // Unscaled B already has condition ~1e11 at L = 8.
    int rescale_above = 0;
};

// h_α (or p_α) of an operator written in the basis.
struct OperatorExpansion {
    std::map<int, cplx> coefficients;

    OperatorExpansion &add(int index, cplx value) {
        if(value != cplx(0.0)) coefficients[index] += value;
        return *this;
    }
    [[nodiscard]] bool empty() const { return coefficients.empty(); }
};

// H = −(1/L)[(1+γ)/2 J_x² + (1−γ)/2 J_y²] + 1/4 − h_x J_x − h_z J_z
inline OperatorExpansion lmg_hamiltonian(const MonomialBasis &basis, const ModelParams &p) {
    const double      L = basis.system_size();
    OperatorExpansion h;
    h.add(basis.index({0, 0, 0}), 0.25);
    h.add(basis.index({1, 0, 0}), -p.hx);
    h.add(basis.index({0, 0, 1}), -p.hz);
    if(basis.system_size() >= 2) {
        h.add(basis.index({2, 0, 0}), -(1.0 + p.gamma) / (2.0 * L));
        h.add(basis.index({0, 2, 0}), -(1.0 - p.gamma) / (2.0 * L));
    } else {
        // J_x² = J_y² = 1/4 at L = 1; fold them into the identity.
        h.add(basis.index({0, 0, 0}), -(1.0 + p.gamma) / 8.0 - (1.0 - p.gamma) / 8.0);
    }
    return h;
}

// J² = J_x² + J_y² + J_z²
inline OperatorExpansion casimir_expansion(const MonomialBasis &basis) {
    OperatorExpansion p;
    if(basis.system_size() >= 2) {
        p.add(basis.index({2, 0, 0}), 1.0);
        p.add(basis.index({0, 2, 0}), 1.0);
        p.add(basis.index({0, 0, 2}), 1.0);
    } else {
        p.add(basis.index({0, 0, 0}), 0.75);
    }
    return p;
}

// A finite set of operators realized as weighted dense blocks: every
// operator is ⊕_b X_b with block b appearing `weight_b` times in the full
// Hilbert space. Column α of `columns` holds the column-major entries of
// all blocks of operator α, concatenated.
class BlockAlgebra {
    public:
    BlockAlgebra(std::vector<int> dims, std::vector<double> weights, int n_ops)
        : dims_(std::move(dims)), weights_(std::move(weights)) {
        if(dims_.size() != weights_.size()) throw std::invalid_argument("block dims and weights differ in length");
        Eigen::Index off = 0;
        for(int d : dims_) {
            offsets_.push_back(off);
            off += static_cast<Eigen::Index>(d) * d;
        }
        columns_ = Matrix::Zero(off, n_ops);
    }

    [[nodiscard]] int                 size() const { return static_cast<int>(columns_.cols()); }
    [[nodiscard]] std::size_t         block_count() const { return dims_.size(); }
    [[nodiscard]] int                 block_dim(std::size_t b) const { return dims_[b]; }
    [[nodiscard]] double              block_weight(std::size_t b) const { return weights_[b]; }
    [[nodiscard]] Eigen::Index        flat_size() const { return columns_.rows(); }
    [[nodiscard]] const Matrix       &columns() const { return columns_; }

    void set_block(int op, std::size_t b, const Matrix &X) {
        if(X.rows() != dims_[b] || X.cols() != dims_[b]) throw std::invalid_argument("block has the wrong dimension");
        block(op, b) = X;
    }

    [[nodiscard]] Eigen::Map<Matrix> block(int op, std::size_t b) {
        return {columns_.col(op).data() + offsets_[b], dims_[b], dims_[b]};
    }
    [[nodiscard]] Eigen::Map<const Matrix> block(int op, std::size_t b) const {
        return {columns_.col(op).data() + offsets_[b], dims_[b], dims_[b]};
    }

    void scale_operator(int op, double factor) { columns_.col(op) *= factor; }

    // Σ_b w_b tr(X_b†X_b) for operator op.
    [[nodiscard]] double frobenius_sq(int op) const {
        double s = 0.0;
        for(std::size_t b = 0; b < dims_.size(); ++b) s += weights_[b] * block(op, b).squaredNorm();
        return s;
    }

    // Matrix T with T_{αδ} = tr(Y_α O_δ), where `lhs` holds Y_α as columns in
    // the same block layout.
    [[nodiscard]] Matrix trace_pairing(const Matrix &lhs) const {
        Matrix weighted_t(lhs.rows(), lhs.cols());
        for(Eigen::Index a = 0; a < lhs.cols(); ++a)
            for(std::size_t b = 0; b < dims_.size(); ++b) {
                const int                n = dims_[b];
                Eigen::Map<const Matrix> y(lhs.col(a).data() + offsets_[b], n, n);
                Eigen::Map<Matrix>       t(weighted_t.col(a).data() + offsets_[b], n, n);
                t = weights_[b] * y.transpose();
            }
        // tr(Y O) = Σ_ij Y_ij O_ji = vec(Yᵀ) · vec(O)
        return weighted_t.transpose() * columns_;
    }

    // Columns holding O_β O_α (left) or O_α O_β (right) for every α.
    [[nodiscard]] Matrix products_with(int beta, bool beta_on_left) const {
        Matrix out(columns_.rows(), columns_.cols());
        for(Eigen::Index a = 0; a < columns_.cols(); ++a)
            for(std::size_t b = 0; b < dims_.size(); ++b) {
                const int          n = dims_[b];
                Eigen::Map<Matrix> y(out.col(a).data() + offsets_[b], n, n);
                if(beta_on_left)
                    y.noalias() = block(beta, b) * block(static_cast<int>(a), b);
                else
                    y.noalias() = block(static_cast<int>(a), b) * block(beta, b);
            }
        return out;
    }

    private:
    std::vector<int>          dims_;
    std::vector<double>       weights_;
    std::vector<Eigen::Index> offsets_;
    Matrix                    columns_;
};

// The monomial basis of size L realized on every spin-l sector.
inline BlockAlgebra lmg_algebra(const MonomialBasis &basis) {
    const SpinRepresentation rep(basis.system_size());
    std::vector<int>         dims;
    std::vector<double>      weights;
    for(const auto &s : rep.sectors()) {
        dims.push_back(s.dim);
        weights.push_back(static_cast<double>(s.multiplicity));
    }
    BlockAlgebra alg(dims, weights, basis.size());
    for(int op = 0; op < basis.size(); ++op)
        for(std::size_t b = 0; b < rep.sectors().size(); ++b) alg.set_block(op, b, rep.powers(b).monomial(basis[op]));
    return alg;
}

// {J_z^α, α = 0..L} on the J_z eigenvalues m with their binomial multiplicities.
inline BlockAlgebra toy_algebra(int L) {
    if(L < 1 || L > max_system_size) throw std::invalid_argument("toy model needs 1 <= L <= " + std::to_string(max_system_size));
    std::vector<int>    dims(static_cast<std::size_t>(L) + 1, 1);
    std::vector<double> weights;
    for(int k = 0; k <= L; ++k) weights.push_back(static_cast<double>(detail::binomial(L, k)));
    BlockAlgebra alg(dims, weights, L + 1);
    for(int k = 0; k <= L; ++k) {
        const double m = 0.5 * L - k;
        for(int alpha = 0; alpha <= L; ++alpha) alg.block(alpha, static_cast<std::size_t>(k))(0, 0) = std::pow(m, alpha);
    }
    return alg;
}

struct GramMatrix {
    Matrix                                  matrix;
    Eigen::ColPivHouseholderQR<Matrix>      factorization;
    double                                  condition_estimate = 0.0;

    [[nodiscard]] Matrix solve(const Matrix &rhs) const { return factorization.solve(rhs); }
};

enum class Side { left, right };

// Row α holds g with O_β O_α = Σ_γ row_γ O_γ (left) or O_α O_β (right).
struct MultiplicationSlice {
    Side   side  = Side::left;
    int    fixed = 0;
    Matrix matrix;
};

struct SectorConstraints {
    Matrix K; // E-independent rows
    Matrix A; // A_{αγ} = Σ_β h_β g_{βαγ}
    Eigen::Index hamiltonian_rows = 0;
};

enum class Diagnostic { identity_component_vanishes, residual_too_large, complex_energy, wrong_state_count, non_square_cluster };

inline std::string to_string(Diagnostic d) {
    switch(d) {
        case Diagnostic::identity_component_vanishes: return "IdentityComponentVanishes";
        case Diagnostic::residual_too_large: return "ResidualTooLarge";
        case Diagnostic::complex_energy: return "ComplexEnergy";
        case Diagnostic::wrong_state_count: return "WrongStateCount";
        case Diagnostic::non_square_cluster: return "NonSquareCluster";
    }
    return "Unknown";
}

struct BootstrapSolution {
    double              energy = 0.0;
    std::optional<Spin> sector;
    Vector              expectations; // v_α = <O_α>, identity component 1
    double              residual_commutator = 0.0;
    double              residual_eigen      = 0.0;
    double              residual_symmetry   = 0.0;
    int                 cluster       = 0; // index of the energy cluster inside the sector
    int                 cluster_size  = 1; // number of states sharing this energy
    [[nodiscard]] bool  degenerate() const { return cluster_size > 1; }
};

struct DiagnosticEvent {
    Diagnostic kind;
    double     energy = 0.0;
    double     value  = 0.0;
};

struct SectorResult {
    std::vector<BootstrapSolution> solutions;
    std::vector<DiagnosticEvent>   diagnostics;
    Eigen::Index                   null_dimension = 0;
    Eigen::Index                   constraint_rank = 0;

    [[nodiscard]] bool has(Diagnostic d) const {
        return std::any_of(diagnostics.begin(), diagnostics.end(), [d](const auto &e) { return e.kind == d; });
    }
};

// Owns the (optionally rescaled) algebra, its Gram matrix and the lazily
// built multiplication slices. Expansions passed in and expectation values
// returned are always in the caller's unscaled basis.
class BootstrapEngine {
    public:
    BootstrapEngine(BlockAlgebra algebra, bool rescale, Tolerances tol = {})
        : algebra_(std::move(algebra)), tol_(tol), scale_(RealVec::Ones(algebra_.size())) {
        if(rescale)
            for(int a = 0; a < algebra_.size(); ++a) {
                scale_[a] = std::sqrt(algebra_.frobenius_sq(a));
                if(scale_[a] == 0.0) throw SingularGram("basis operator " + std::to_string(a) + " vanishes");
                algebra_.scale_operator(a, 1.0 / scale_[a]);
            }
        build_gram();
    }

    [[nodiscard]] int                 size() const { return algebra_.size(); }
    [[nodiscard]] const GramMatrix   &gram() const { return gram_; }
    [[nodiscard]] const Tolerances   &tolerances() const { return tol_; }
    [[nodiscard]] const RealVec      &scale() const { return scale_; }
    [[nodiscard]] const BlockAlgebra &algebra() const { return algebra_; }
    void                              set_tolerances(const Tolerances &t) { tol_ = t; }

    // Slice in the internal (rescaled) basis.
    const MultiplicationSlice &slice(int beta, Side side) {
        if(beta < 0 || beta >= size()) throw std::out_of_range("slice index out of range");
        const auto key = std::make_pair(beta, side == Side::left);
        if(auto it = slices_.find(key); it != slices_.end()) return it->second;
        const Matrix products = algebra_.products_with(beta, side == Side::left);
        const Matrix c        = algebra_.trace_pairing(products);
        // g = c B⁻¹ and B is symmetric, so gᵀ = B⁻¹ cᵀ.
        Matrix g = gram_.solve(c.transpose()).transpose();
        return slices_.emplace(key, MultiplicationSlice{side, beta, std::move(g)}).first->second;
    }

    // Slice with coefficients in the unscaled basis.
    [[nodiscard]] Matrix unscaled_slice(int beta, Side side) {
        const Matrix &g = slice(beta, side).matrix;
        // O_α = s_α Õ_α  ⇒  g_{αγ} = s_β s_α g̃_{αγ} / s_γ
        Matrix out = g;
        for(Eigen::Index a = 0; a < g.rows(); ++a)
            for(Eigen::Index c = 0; c < g.cols(); ++c) out(a, c) *= scale_[beta] * scale_[a] / scale_[c];
        return out;
    }

    // ‖Σ_l d_l ‖O_β O_α − Σ_γ g_γ O_γ‖_F²‖^{1/2} / ‖O_β O_α‖, internal basis.
    [[nodiscard]] double reconstruction_residual(int beta, Side side, int alpha) {
        const Matrix &g        = slice(beta, side).matrix;
        const Matrix  products = algebra_.products_with(beta, side == Side::left);
        const Vector  target   = products.col(alpha);
        const Vector  approx   = algebra_.columns() * g.row(alpha).transpose();
        double        num = 0.0, den = 0.0;
        for(std::size_t b = 0, off = 0; b < algebra_.block_count(); ++b) {
            const auto n = static_cast<std::size_t>(algebra_.block_dim(b)) * static_cast<std::size_t>(algebra_.block_dim(b));
            const auto seg_t = target.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(n));
            const auto seg_a = approx.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(n));
            num += algebra_.block_weight(b) * (seg_t - seg_a).squaredNorm();
            den += algebra_.block_weight(b) * seg_t.squaredNorm();
            off += n;
        }
        return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
    }

    // Build slices for every index in the supports of h and p. Needed before
    // sharing the engine across threads.
    void prepare(const OperatorExpansion &h, const OperatorExpansion *p = nullptr) {
        for(const auto &[beta, _] : h.coefficients) {
            slice(beta, Side::left);
            slice(beta, Side::right);
        }
        if(p)
            for(const auto &[beta, _] : p->coefficients) {
                slice(beta, Side::left);
                slice(beta, Side::right);
            }
    }

    // Rows: Hamiltonian commutators, then (when p is given) symmetry
    // commutators and symmetry eigenvalue rows with eigenvalue P.
    [[nodiscard]] SectorConstraints assemble(const OperatorExpansion &h, const OperatorExpansion *p, double P) {
        const Eigen::Index n = size();
        SectorConstraints  out;
        out.A          = Matrix::Zero(n, n);
        Matrix comm_h  = Matrix::Zero(n, n);
        for(const auto &[beta, coef] : h.coefficients) {
            const cplx   c  = coef * scale_[beta];
            const Matrix &gl = slice(beta, Side::left).matrix;
            const Matrix &gr = slice(beta, Side::right).matrix;
            out.A += c * gl;
            comm_h += c * (gl - gr);
        }
        out.hamiltonian_rows = n;
        if(!p) {
            out.K = std::move(comm_h);
            return out;
        }
        Matrix comm_p = Matrix::Zero(n, n);
        Matrix eig_p  = -P * Matrix::Identity(n, n);
        for(const auto &[beta, coef] : p->coefficients) {
            const cplx    c  = coef * scale_[beta];
            const Matrix &gl = slice(beta, Side::left).matrix;
            const Matrix &gr = slice(beta, Side::right).matrix;
            comm_p += c * (gl - gr);
            eig_p += c * gl;
        }
        out.K.resize(3 * n, n);
        out.K << comm_h, comm_p, eig_p;
        return out;
    }

    // All (E, v) satisfying the constraints; `expected` is the certified
    // state count for the sector (2l+1 for LMG).
    [[nodiscard]] SectorResult solve(const OperatorExpansion &h, const OperatorExpansion *p, double P, std::optional<Spin> sector,
                                     std::optional<int> expected) {
        const SectorConstraints sys = assemble(h, p, P);
        const Eigen::Index      n   = size();
        SectorResult            result;

        // Orthonormal nullspace of K.
        Eigen::BDCSVD<Matrix> svd(sys.K, Eigen::ComputeFullV);
        const RealVec        &sv     = svd.singularValues();
        const double          scale  = std::max(sv.size() > 0 ? sv[0] : 0.0, sys.A.norm() / std::sqrt(static_cast<double>(n)));
        const double          cut    = tol_.null_space * std::max(scale, 1e-300);
        Eigen::Index          rank   = 0;
        while(rank < sv.size() && sv[rank] > cut) ++rank;
        const Matrix V           = svd.matrixV().rightCols(n - rank);
        result.constraint_rank   = rank;
        result.null_dimension    = V.cols();
        if(V.cols() == 0) {
            if(expected && *expected != 0) result.diagnostics.push_back({Diagnostic::wrong_state_count, 0.0, 0.0});
            return result;
        }

        const Matrix M = V.adjoint() * sys.A * V;
        Eigen::ComplexEigenSolver<Matrix> es(M, false);
        std::vector<cplx>                 evals;
        for(Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const cplx e = es.eigenvalues()[i];
            if(std::abs(e.imag()) > tol_.imag_energy * (1.0 + std::abs(e.real()))) {
                result.diagnostics.push_back({Diagnostic::complex_energy, e.real(), e.imag()});
                continue;
            }
            evals.push_back(e);
        }
        std::sort(evals.begin(), evals.end(), [](cplx a, cplx b) { return a.real() < b.real(); });

        const double width = evals.empty() ? 0.0 : evals.back().real() - evals.front().real();
        const double gap   = tol_.degeneracy * std::max(width, 1.0);
        std::vector<std::vector<cplx>> clusters;
        for(const cplx &e : evals) {
            if(clusters.empty() || e.real() - clusters.back().back().real() > gap) clusters.emplace_back();
            clusters.back().push_back(e);
        }

        int          cluster_id    = 0;
        for(const auto &cl : clusters) {
            const auto c       = static_cast<int>(cl.size());
            const int  root    = static_cast<int>(std::lround(std::sqrt(static_cast<double>(c))));
            const bool squared = root * root == c;
            if(c > 1 && !squared) {
                // Not an exact degeneracy: resolve each eigenvalue on its own.
                result.diagnostics.push_back({Diagnostic::non_square_cluster, mean_real(cl), static_cast<double>(c)});
                for(const cplx &e : cl) accept(result, sys, V, M, {e}, gram_inverse_, sector, cluster_id++);
                continue;
            }
            accept(result, sys, V, M, cl, gram_inverse_, sector, cluster_id++);
        }

        std::stable_sort(result.solutions.begin(), result.solutions.end(),
                         [](const auto &a, const auto &b) { return a.energy < b.energy; });
        if(expected && static_cast<int>(result.solutions.size()) != *expected)
            result.diagnostics.push_back({Diagnostic::wrong_state_count, 0.0, static_cast<double>(result.solutions.size())});
        return result;
    }

    private:
    static double mean_real(const std::vector<cplx> &cl) {
        double s = 0.0;
        for(const auto &e : cl) s += e.real();
        return s / static_cast<double>(cl.size());
    }

    void build_gram() {
        gram_.matrix = algebra_.trace_pairing(algebra_.columns());
        Eigen::BDCSVD<Matrix> svd(gram_.matrix);
        const RealVec        &sv = svd.singularValues();
        const double          smax = sv.size() ? sv[0] : 0.0;
        const double          smin = sv.size() ? sv[sv.size() - 1] : 0.0;
        gram_.condition_estimate   = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        if(!(smin > tol_.gram_rank * smax))
            throw SingularGram("Gram matrix is rank deficient (condition estimate " + std::to_string(gram_.condition_estimate) +
                               "); choose a different operator set");
        gram_.factorization.compute(gram_.matrix);
        gram_inverse_ = gram_.factorization.inverse();
    }

    // Turn one energy cluster into accepted solutions. For a cluster of size
    // n², the eigenspace holds functionals tr(X ρ) with X ranging over n×n
    // matrices; the representative returned is the unique one with X ∝ I,
    // found as the Riesz representer of v ↦ v_0 under tr(ρρ') = vᵀB⁻¹v'.
    void accept(SectorResult &result, const SectorConstraints &sys, const Matrix &V, const Matrix &M, const std::vector<cplx> &cl,
                const Matrix &Binv, std::optional<Spin> sector, int cluster_id) const {
        const auto   c  = static_cast<Eigen::Index>(cl.size());
        const double E  = mean_real(cl);
        const auto   nM = M.rows();

        Eigen::BDCSVD<Matrix> shifted(M - cplx(E) * Matrix::Identity(nM, nM), Eigen::ComputeFullV);
        const Matrix          W = V * shifted.matrixV().rightCols(c);

        Vector v;
        if(c == 1) {
            v = W.col(0);
        } else {
            const Matrix G = W.transpose() * Binv * W;
            const Vector e = W.row(0).transpose();
            v              = W * G.colPivHouseholderQr().solve(e);
        }
        if(std::abs(v[0]) < 1e-10 * v.norm()) {
            result.diagnostics.push_back({Diagnostic::identity_component_vanishes, E, std::abs(v[0])});
            return;
        }
        v /= v[0];

        const double        norm = v.norm();
        const Eigen::Index  nh   = sys.hamiltonian_rows;
        const Vector        Kv   = sys.K * v;
        BootstrapSolution   s;
        s.energy              = E;
        s.sector              = sector;
        s.residual_commutator = Kv.head(nh).norm() / norm;
        s.residual_symmetry   = Kv.size() > nh ? Kv.tail(Kv.size() - nh).norm() / norm : 0.0;
        s.residual_eigen      = (sys.A * v - E * v).norm() / norm;
        const double worst    = std::max({s.residual_commutator, s.residual_symmetry, s.residual_eigen});
        if(worst > tol_.residual) {
            result.diagnostics.push_back({Diagnostic::residual_too_large, E, worst});
            return;
        }
        // Back to the unscaled basis.
        Vector unscaled = v;
        for(Eigen::Index a = 0; a < v.size(); ++a) unscaled[a] = v[a] * scale_[a];
        unscaled /= unscaled[0];
        s.expectations = std::move(unscaled);

        const int copies = c == 1 ? 1 : static_cast<int>(std::lround(std::sqrt(static_cast<double>(c))));
        s.cluster        = cluster_id;
        s.cluster_size   = copies;
        for(int k = 0; k < copies; ++k) result.solutions.push_back(s);
    }

    BlockAlgebra                                       algebra_;
    Tolerances                                         tol_;
    RealVec                                            scale_;
    GramMatrix                                         gram_;
    Matrix                                             gram_inverse_;
    std::map<std::pair<int, bool>, MultiplicationSlice> slices_;
};

// Unscaled B_{αβ} = tr(O_α O_β) over the monomial basis.
inline GramMatrix gram_matrix(const MonomialBasis &basis, double rank_tol = 1e-10) {
    const BlockAlgebra alg = lmg_algebra(basis);
    GramMatrix         g;
    g.matrix = alg.trace_pairing(alg.columns());
    Eigen::BDCSVD<Matrix> svd(g.matrix);
    const RealVec        &sv   = svd.singularValues();
    const double          smin = sv[sv.size() - 1];
    g.condition_estimate       = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    if(!(smin > rank_tol * sv[0]))
        throw SingularGram("Gram matrix is rank deficient (condition estimate " + std::to_string(g.condition_estimate) + ")");
    g.factorization.compute(g.matrix);
    return g;
}

// LMG bootstrap for one system size: basis, engine and J² expansion are
// built once and reused across parameters and sectors.
class LmgBootstrap {
    public:
    explicit LmgBootstrap(int L, Tolerances tol = {})
        : basis_(L), engine_(lmg_algebra(basis_), L > tol.rescale_above, tol), casimir_(casimir_expansion(basis_)) {}

    [[nodiscard]] const MonomialBasis &basis() const { return basis_; }
    [[nodiscard]] BootstrapEngine     &engine() { return engine_; }
    [[nodiscard]] int                  system_size() const { return basis_.system_size(); }

    [[nodiscard]] OperatorExpansion hamiltonian(const ModelParams &p) const { return lmg_hamiltonian(basis_, p); }

    // Build every slice a solve can touch, so later solves only read.
    void prepare() {
        engine_.prepare(hamiltonian({0.3, 0.7, 1.1}), &casimir_);
    }

    [[nodiscard]] SectorConstraints constraints(const ModelParams &p, Spin l) {
        check_admissible(system_size(), l);
        return engine_.assemble(hamiltonian(p), &casimir_, l.casimir());
    }

    [[nodiscard]] SectorResult solve_sector(const ModelParams &p, Spin l) {
        check_admissible(system_size(), l);
        return engine_.solve(hamiltonian(p), &casimir_, l.casimir(), l, l.dim());
    }

    [[nodiscard]] std::vector<SectorResult> solve_all(const ModelParams &p) {
        std::vector<SectorResult> out;
        for(const auto &s : sectors(system_size())) out.push_back(solve_sector(p, s.l));
        return out;
    }

    private:
    MonomialBasis     basis_;
    BootstrapEngine   engine_;
    OperatorExpansion casimir_;
};

inline SectorResult solve_sector(int L, const ModelParams &p, Spin l, Tolerances tol = {}) {
    LmgBootstrap b(L, tol);
    return b.solve_sector(p, l);
}

// H = J_z over the basis {J_z^α}, α = 0..L. No symmetry rows are used.
class ToyBootstrap {
    public:
    explicit ToyBootstrap(int L, Tolerances tol = {}) : L_(L), engine_(toy_algebra(L), L > tol.rescale_above, tol) {}

    [[nodiscard]] BootstrapEngine &engine() { return engine_; }

    [[nodiscard]] OperatorExpansion hamiltonian() const {
        OperatorExpansion h;
        h.add(1, 1.0);
        return h;
    }

    [[nodiscard]] SectorResult solve() { return engine_.solve(hamiltonian(), nullptr, 0.0, std::nullopt, L_ + 1); }

    private:
    int             L_;
    BootstrapEngine engine_;
};

inline SectorResult solve_toy_model(int L, Tolerances tol = {}) { return ToyBootstrap(L, tol).solve(); }

} // namespace lmgboot
