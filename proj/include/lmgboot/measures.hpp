#pragma once

// Entanglement quantities from collective first and second moments:
// two-qubit concurrence, one-vs-rest tangle and entropy, residual tangle,
// and quantum Fisher information with k-producibility bounds.

#include "bootstrap.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace lmgboot {

using Matrix3c = Eigen::Matrix3cd;
using Matrix4c = Eigen::Matrix4cd;
using Vec3     = Eigen::Vector3d;

class HermiticityViolated : public std::runtime_error {
    public:
    using std::runtime_error::runtime_error;
};

// <J_i> and <J_i J_j> (operator order i then j) of one state.
struct MomentSet {
    Vec3                first  = Vec3::Zero();
    Matrix3c            second = Matrix3c::Zero();
    int                 L      = 1;
    std::optional<Spin> sector;
    double              hermiticity_residual = 0.0;
};

namespace detail {

// For L = 1 the degree-two monomials are not in the basis:
// J_i J_j = δ_ij/4 + (i/2) ε_ijk J_k.
inline Matrix3c spin_half_second(const Eigen::Vector3cd &first) {
    Matrix3c s = Matrix3c::Identity() * 0.25;
    const cplx i2(0.0, 0.5);
    s(0, 1) = i2 * first[2];
    s(1, 0) = -i2 * first[2];
    s(1, 2) = i2 * first[0];
    s(2, 1) = -i2 * first[0];
    s(2, 0) = i2 * first[1];
    s(0, 2) = -i2 * first[1];
    return s;
}

} // namespace detail

inline double hermiticity_residual(const Eigen::Vector3cd &first, const Matrix3c &second, std::optional<Spin> sector) {
    double r = first.imag().cwiseAbs().maxCoeff();
    for(int i = 0; i < 3; ++i) {
        r = std::max(r, std::abs(second(i, i).imag()));
        for(int j = 0; j < 3; ++j) r = std::max(r, std::abs(second(i, j) - std::conj(second(j, i))));
    }
    if(sector) r = std::max(r, std::abs(second.trace().real() - sector->casimir()));
    return r;
}

// Builds a MomentSet and checks hermiticity within `limit`.
inline MomentSet make_moments(const Eigen::Vector3cd &first, const Matrix3c &second, int L, std::optional<Spin> sector,
                              double limit = 1e-4) {
    MomentSet m;
    m.L                    = L;
    m.sector               = sector;
    m.hermiticity_residual = hermiticity_residual(first, second, sector);
    if(m.hermiticity_residual > limit)
        throw HermiticityViolated("moment set violates hermiticity by " + std::to_string(m.hermiticity_residual));
    m.first  = first.real();
    m.second = second;
    return m;
}

inline MomentSet moments_from_solution(const BootstrapSolution &s, const MonomialBasis &basis, double limit = 1e-4) {
    const Vector     &v = s.expectations;
    if(v.size() != basis.size()) throw std::invalid_argument("solution does not belong to this basis");
    Eigen::Vector3cd first(v[basis.index({1, 0, 0})], v[basis.index({0, 1, 0})], v[basis.index({0, 0, 1})]);
    Matrix3c         second;
    if(basis.system_size() == 1) {
        second = detail::spin_half_second(first);
    } else {
        second(0, 0) = v[basis.index({2, 0, 0})];
        second(1, 1) = v[basis.index({0, 2, 0})];
        second(2, 2) = v[basis.index({0, 0, 2})];
        second(0, 1) = v[basis.index({1, 1, 0})];
        second(0, 2) = v[basis.index({1, 0, 1})];
        second(1, 2) = v[basis.index({0, 1, 1})];
        // J_j J_i = (J_i J_j)†
        second(1, 0) = std::conj(second(0, 1));
        second(2, 0) = std::conj(second(0, 2));
        second(2, 1) = std::conj(second(1, 2));
    }
    return make_moments(first, second, basis.system_size(), s.sector, limit);
}

// {1, σx, σy, σz}
inline const std::array<Eigen::Matrix2cd, 4> &pauli() {
    static const std::array<Eigen::Matrix2cd, 4> p = [] {
        std::array<Eigen::Matrix2cd, 4> out;
        out[0] << 1, 0, 0, 1;
        out[1] << 0, 1, 1, 0;
        out[2] << 0, cplx(0, -1), cplx(0, 1), 0;
        out[3] << 1, 0, 0, -1;
        return out;
    }();
    return p;
}

inline Matrix4c kron(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    Matrix4c k;
    for(int i = 0; i < 2; ++i)
        for(int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

struct TwoQubitDensity {
    Matrix4c f   = Matrix4c::Zero(); // ρ = Σ f_{αβ} σ^α ⊗ σ^β
    Matrix4c rho = Matrix4c::Zero();
    double   min_eigenvalue      = 0.0;
    double   hermiticity_error   = 0.0;
    bool     assumed_symmetric   = false;

    [[nodiscard]] bool non_physical(double tol = 1e-8) const { return min_eigenvalue < -tol; }
};

inline TwoQubitDensity density_from_matrix(const Matrix4c &rho) {
    TwoQubitDensity d;
    d.rho = rho;
    for(int a = 0; a < 4; ++a)
        for(int b = 0; b < 4; ++b) d.f(a, b) = 0.25 * (rho * kron(pauli()[a], pauli()[b])).trace();
    const Matrix4c herm = 0.5 * (rho + rho.adjoint());
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    d.min_eigenvalue    = Eigen::SelfAdjointEigenSolver<Matrix4c>(herm, Eigen::EigenvaluesOnly).eigenvalues()[0];
    return d;
}

// Two-site reduced density matrix of a permutation-symmetric state.
inline TwoQubitDensity two_qubit_rdm(const MomentSet &m) {
    if(m.L < 2) throw std::invalid_argument("two-qubit density matrix needs L >= 2");
    const double   L  = m.L;
    const Vec3    &j  = m.first;
    const Matrix3c &jj = m.second;
    const cplx     i2(0.0, 0.5);
    const double   n2 = L * (L - 1.0);

    Matrix4c f = Matrix4c::Zero();
    f(0, 0)    = 0.25;
    for(int k = 0; k < 3; ++k) {
        f(0, k + 1) = f(k + 1, 0) = j[k] / (2.0 * L);
        f(k + 1, k + 1)           = (jj(k, k).real() / L - 0.25) / (L - 1.0);
    }
    f(1, 2) = f(2, 1) = (jj(0, 1) - i2 * j[2]) / n2;
    f(1, 3) = f(3, 1) = (jj(0, 2) + i2 * j[1]) / n2;
    f(2, 3) = f(3, 2) = (jj(1, 2) - i2 * j[0]) / n2;

    Matrix4c rho = Matrix4c::Zero();
    for(int a = 0; a < 4; ++a)
        for(int b = 0; b < 4; ++b) rho += f(a, b) * kron(pauli()[a], pauli()[b]);

    TwoQubitDensity d   = density_from_matrix(rho);
    d.f                 = f;
    d.assumed_symmetric = m.sector && m.sector->twice < m.L;
    return d;
}

struct ConcurrenceResult {
    double value          = 0.0;
    bool   non_physical   = false; // ρ has an eigenvalue below −1e-6
    double min_eigenvalue = 0.0;
};

// Square roots of the eigenvalues of ρ (σy⊗σy) ρ* (σy⊗σy), largest first.
// For ρ = B B† these are the singular values of Bᵀ(σy⊗σy)B, which keeps
// zero roots at zero instead of at sqrt(roundoff). Non-PSD ρ goes through
// ρρ̃ directly.
inline std::array<double, 4> spin_flip_roots(const Matrix4c &rho) {
    const Matrix4c        yy = kron(pauli()[2], pauli()[2]);
    std::array<double, 4> lam{};
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (rho + rho.adjoint()));
    const auto                             &mu  = es.eigenvalues();
    const double                            cut = 1e-13 * std::max(mu.cwiseAbs().maxCoeff(), 1e-300);
    if(mu[0] >= -cut) {
        Matrix4c B = es.eigenvectors();
        for(int i = 0; i < 4; ++i) B.col(i) *= mu[i] > cut ? std::sqrt(mu[i]) : 0.0;
        const Matrix4c                   T = B.transpose() * yy * B;
        Eigen::JacobiSVD<Matrix4c>       svd(T);
        for(int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = svd.singularValues()[i];
    } else {
        const Matrix4c                      tilde = yy * rho.conjugate() * yy;
        Eigen::ComplexEigenSolver<Matrix4c> ces(rho * tilde, false);
        for(int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = std::sqrt(std::max(ces.eigenvalues()[i].real(), 0.0));
    }
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return lam;
}

inline ConcurrenceResult concurrence(const TwoQubitDensity &d) {
    const auto        lam = spin_flip_roots(d.rho);
    ConcurrenceResult r;
    r.value          = std::max(lam[0] - lam[1] - lam[2] - lam[3], 0.0);
    r.min_eigenvalue = d.min_eigenvalue;
    r.non_physical   = d.min_eigenvalue < -1e-6;
    return r;
}

inline ConcurrenceResult concurrence(const Matrix4c &rho) { return concurrence(density_from_matrix(rho)); }

// One qubit against the rest: τ = 1 − (4/L²)|<J>|², clamped to [0, 1].
inline double tangle(const MomentSet &m) {
    const double L = m.L;
    return std::clamp(1.0 - 4.0 / (L * L) * m.first.squaredNorm(), 0.0, 1.0);
}

// Von Neumann entropy (natural log) of a qubit with tangle τ.
inline double entropy_from_tangle(double tau) {
    if(tau < -1e-9 || tau > 1.0 + 1e-9) throw std::invalid_argument("tangle outside [0, 1]: " + std::to_string(tau));
    tau            = std::clamp(tau, 0.0, 1.0);
    const double r = std::sqrt(1.0 - tau);
    auto         h = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
    return h(0.5 * (1.0 + r)) + h(0.5 * (1.0 - r));
}

struct ResidualTangle {
    double value        = 0.0;
    bool   ckw_violated = false; // Δτ < −1e-6
};

// Δτ = τ − (L−1) C²
inline ResidualTangle residual_tangle(double tau, double C, int L) {
    ResidualTangle r;
    r.value        = tau - (L - 1.0) * C * C;
    r.ckw_violated = r.value < -1e-6;
    return r;
}

struct ProducibilityBounds {
    double f_max = 0.0;
    double f_sum = 0.0;
};

// Largest F_max and F_sum reachable by k-producible states of L qubits.
inline ProducibilityBounds producibility_bounds(int L, int k) {
    if(L < 1 || k < 1 || k > L) throw std::invalid_argument("producibility bound needs 1 <= k <= L");
    const long n    = L / k;
    const long rest = L - n * k;
    ProducibilityBounds b;
    b.f_max = static_cast<double>(n * k * k + rest * rest);
    if(k == 1)
        b.f_sum = 2.0 * L;
    else if(rest == 1)
        b.f_sum = static_cast<double>(n * k * (k + 2) + 2);
    else
        b.f_sum = static_cast<double>(n * k * (k + 2) + rest * (rest + 2));
    return b;
}

struct QfiReport {
    double f_x = 0.0, f_y = 0.0, f_z = 0.0;
    double f_sum = 0.0;
    double f_max = 0.0;
    Vec3   direction = Vec3::UnitZ();
    int    depth     = 1;
};

// Relative slack for "F exceeds the k-producible bound".
inline constexpr double bound_slack = 1e-9;

inline int entanglement_depth(double f_max, double f_sum, int L) {
    int depth = 1;
    for(int k = 1; k <= L - 1; ++k) {
        const auto b = producibility_bounds(L, k);
        if(f_max > b.f_max * (1.0 + bound_slack) + bound_slack || f_sum > b.f_sum * (1.0 + bound_slack) + bound_slack) depth = k + 1;
    }
    return depth;
}

// Pure-state QFI of collective spin components. F_max is the exact maximum
// over directions n, i.e. 4 × the top eigenvalue of the covariance matrix.
inline QfiReport qfi(const MomentSet &m) {
    Eigen::Matrix3d cov;
    for(int i = 0; i < 3; ++i)
        for(int j = 0; j < 3; ++j) cov(i, j) = 0.5 * (m.second(i, j).real() + m.second(j, i).real()) - m.first[i] * m.first[j];
    QfiReport r;
    r.f_x   = 4.0 * cov(0, 0);
    r.f_y   = 4.0 * cov(1, 1);
    r.f_z   = 4.0 * cov(2, 2);
    r.f_sum = r.f_x + r.f_y + r.f_z;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    r.f_max     = 4.0 * es.eigenvalues()[2];
    r.direction = es.eigenvectors().col(2);
    if(r.direction[2] < 0.0) r.direction = -r.direction;
    r.depth = entanglement_depth(r.f_max, r.f_sum, m.L);
    return r;
}

struct MeasureReport {
    std::optional<ConcurrenceResult> concurrence; // absent for L < 2
    bool                             assumed_symmetric = false;
    double                           tangle            = 0.0;
    std::optional<ResidualTangle>    residual;
    double                           entropy = 0.0;
    QfiReport                        qfi;
};

inline MeasureReport measure_all(const MomentSet &m) {
    MeasureReport r;
    r.tangle  = tangle(m);
    r.entropy = entropy_from_tangle(r.tangle);
    r.qfi     = qfi(m);
    if(m.L >= 2) {
        const auto rho      = two_qubit_rdm(m);
        r.assumed_symmetric = rho.assumed_symmetric;
        r.concurrence       = concurrence(rho);
        r.residual          = residual_tangle(r.tangle, r.concurrence->value, m.L);
    }
    return r;
}

} // namespace lmgboot
