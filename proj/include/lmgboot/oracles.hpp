#pragma once

// Exact reference solvers: per-sector diagonalization of H^(l), dense
// diagonalization in the 2^L product basis with J² labels, and the closed
// form of the H = J_z toy model.

#include "measures.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lmgboot {

class TooLarge : public std::runtime_error {
    public:
    using std::runtime_error::runtime_error;
};

// H^(l) = −(1/L)[(1+γ)/2 J_x² + (1−γ)/2 J_y²] + 1/4 − h_x J_x − h_z J_z
inline Matrix sector_hamiltonian(int L, const ModelParams &p, Spin l) {
    check_admissible(L, l);
    const auto   j  = spin_matrices(l);
    const double iL = 1.0 / L;
    return -iL * (0.5 * (1.0 + p.gamma) * j.x * j.x + 0.5 * (1.0 - p.gamma) * j.y * j.y) +
           0.25 * Matrix::Identity(l.dim(), l.dim()) - p.hx * j.x - p.hz * j.z;
}

struct SectorSpectrum {
    Spin          l;
    RealVec       energies;     // ascending
    Matrix        eigenvectors; // columns, in the |l, m> basis with m = l..−l
    std::uint64_t degeneracy_in_full_space = 1;
    int           L                        = 1;

    [[nodiscard]] int size() const { return static_cast<int>(energies.size()); }

    // Collective moments of eigenvector k.
    [[nodiscard]] MomentSet moments(int k) const {
        const Vector psi = eigenvectors.col(k);
        return moments_of(psi * psi.adjoint());
    }

    // Moments averaged over the exactly degenerate cluster containing k.
    [[nodiscard]] MomentSet cluster_moments(int k, double tol = 1e-8) const {
        const auto [lo, hi] = cluster_range(k, tol);
        Matrix rho          = Matrix::Zero(l.dim(), l.dim());
        for(int i = lo; i < hi; ++i) rho += eigenvectors.col(i) * eigenvectors.col(i).adjoint();
        return moments_of(rho / static_cast<double>(hi - lo));
    }

    // [first, last) of the states whose energy is within tol·max(width, 1)
    // of a neighbour chain through k.
    [[nodiscard]] std::pair<int, int> cluster_range(int k, double tol = 1e-8) const {
        const double width = energies.size() ? energies[energies.size() - 1] - energies[0] : 0.0;
        const double gap   = tol * std::max(width, 1.0);
        int          lo = k, hi = k + 1;
        while(lo > 0 && energies[lo] - energies[lo - 1] <= gap) --lo;
        while(hi < size() && energies[hi] - energies[hi - 1] <= gap) ++hi;
        return {lo, hi};
    }

    private:
    [[nodiscard]] MomentSet moments_of(const Matrix &rho) const {
        const auto                           j = spin_matrices(l);
        const std::array<const Matrix *, 3> ops{&j.x, &j.y, &j.z};
        Eigen::Vector3cd                     first;
        Matrix3c                             second;
        for(int a = 0; a < 3; ++a) {
            first[a] = (rho * *ops[static_cast<std::size_t>(a)]).trace();
            for(int b = 0; b < 3; ++b)
                second(a, b) = (rho * *ops[static_cast<std::size_t>(a)] * *ops[static_cast<std::size_t>(b)]).trace();
        }
        return make_moments(first, second, L, l);
    }
};

inline SectorSpectrum angular_momentum_solve(int L, const ModelParams &p, Spin l) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sector_hamiltonian(L, p, l));
    return {l, es.eigenvalues(), es.eigenvectors(), multiplicity(L, l), L};
}

inline std::vector<SectorSpectrum> angular_momentum_spectrum(int L, const ModelParams &p) {
    std::vector<SectorSpectrum> out;
    for(const auto &s : sectors(L)) out.push_back(angular_momentum_solve(L, p, s.l));
    return out;
}

// ---------------------------------------------------------------------------
// Product basis: bit (L−1−j) of the index is site j (0-based), bit value 0
// means spin up (σ_z = +1). Site 0 is the leftmost tensor factor.

namespace ed {

inline constexpr int default_cap = 12;

inline std::uint64_t site_bit(int L, int site) { return std::uint64_t{1} << (L - 1 - site); }

inline double sz_sign(std::uint64_t state, std::uint64_t bit) { return (state & bit) ? -1.0 : 1.0; }

using SparseReal = Eigen::SparseMatrix<double>;

// Pairwise form of the LMG Hamiltonian; real symmetric in this basis.
inline SparseReal hamiltonian(int L, const ModelParams &p) {
    const std::uint64_t dim = std::uint64_t{1} << L;
    std::vector<Eigen::Triplet<double>> t;
    const double cx = (1.0 + p.gamma) / (4.0 * L);
    const double cy = (1.0 - p.gamma) / (4.0 * L);
    for(std::uint64_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for(int j = 0; j < L; ++j) {
            const auto bj = site_bit(L, j);
            diag += -0.5 * p.hz * sz_sign(s, bj);
            if(p.hx != 0.0) t.emplace_back(static_cast<int>(s ^ bj), static_cast<int>(s), -0.5 * p.hx);
            for(int k = j + 1; k < L; ++k) {
                const auto bk = site_bit(L, k);
                // σyσy on |ab> gives −1 for equal spins, +1 for opposite.
                const double yy  = sz_sign(s, bj) == sz_sign(s, bk) ? -1.0 : 1.0;
                const double amp = -(cx + cy * yy);
                if(amp != 0.0) t.emplace_back(static_cast<int>(s ^ bj ^ bk), static_cast<int>(s), amp);
            }
        }
        if(diag != 0.0) t.emplace_back(static_cast<int>(s), static_cast<int>(s), diag);
    }
    SparseReal H(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    H.setFromTriplets(t.begin(), t.end());
    return H;
}

// J² = 3L/4 + (1/2) Σ_{j<k} (σxσx + σyσy + σzσz)
inline SparseReal casimir(int L) {
    const std::uint64_t dim = std::uint64_t{1} << L;
    std::vector<Eigen::Triplet<double>> t;
    for(std::uint64_t s = 0; s < dim; ++s) {
        double diag = 0.75 * L;
        for(int j = 0; j < L; ++j)
            for(int k = j + 1; k < L; ++k) {
                const auto bj = site_bit(L, j), bk = site_bit(L, k);
                const bool same = sz_sign(s, bj) == sz_sign(s, bk);
                diag += same ? 0.5 : -0.5;
                // σxσx + σyσy swaps opposite spins with amplitude 2.
                if(!same) t.emplace_back(static_cast<int>(s ^ bj ^ bk), static_cast<int>(s), 1.0);
            }
        t.emplace_back(static_cast<int>(s), static_cast<int>(s), diag);
    }
    SparseReal J2(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    J2.setFromTriplets(t.begin(), t.end());
    return J2;
}

// Applies J_axis (0 = x, 1 = y, 2 = z) to an amplitude vector.
inline Vector apply_collective(int L, int axis, const Vector &psi) {
    Vector out = Vector::Zero(psi.size());
    for(Eigen::Index s = 0; s < psi.size(); ++s) {
        const cplx a = psi[s];
        if(a == cplx(0.0)) continue;
        const auto us = static_cast<std::uint64_t>(s);
        for(int j = 0; j < L; ++j) {
            const auto bj = site_bit(L, j);
            const auto fl = static_cast<Eigen::Index>(us ^ bj);
            switch(axis) {
                case 0: out[fl] += 0.5 * a; break;
                // σy|↑> = i|↓>, σy|↓> = −i|↑>
                case 1: out[fl] += 0.5 * cplx(0.0, sz_sign(us, bj)) * a; break;
                default: out[s] += 0.5 * sz_sign(us, bj) * a; break;
            }
        }
    }
    return out;
}

inline MomentSet collective_moments(int L, const Vector &psi, std::optional<Spin> sector) {
    std::array<Vector, 3> jpsi;
    for(int a = 0; a < 3; ++a) jpsi[static_cast<std::size_t>(a)] = apply_collective(L, a, psi);
    Eigen::Vector3cd first;
    Matrix3c         second;
    for(int a = 0; a < 3; ++a) {
        first[a] = psi.dot(jpsi[static_cast<std::size_t>(a)]);
        // <J_a J_b> = <J_a ψ | J_b ψ> for Hermitian J_a
        for(int b = 0; b < 3; ++b) second(a, b) = jpsi[static_cast<std::size_t>(a)].dot(jpsi[static_cast<std::size_t>(b)]);
    }
    return make_moments(first, second, L, sector);
}

// Exact reduced density matrix on sites (j1, j2), j1 as the left factor.
inline Matrix4c two_site_rdm(int L, const Vector &psi, int j1, int j2) {
    if(j1 == j2 || j1 < 0 || j2 < 0 || j1 >= L || j2 >= L) throw std::invalid_argument("invalid site pair");
    const auto b1 = site_bit(L, j1), b2 = site_bit(L, j2);
    Matrix4c   rho = Matrix4c::Zero();
    for(Eigen::Index s = 0; s < psi.size(); ++s) {
        const auto us = static_cast<std::uint64_t>(s);
        if(us & (b1 | b2)) continue; // enumerate each environment once
        std::array<cplx, 4> amp;
        for(int q = 0; q < 4; ++q) {
            std::uint64_t idx = us;
            if(q & 2) idx |= b1;
            if(q & 1) idx |= b2;
            amp[static_cast<std::size_t>(q)] = psi[static_cast<Eigen::Index>(idx)];
        }
        for(int q = 0; q < 4; ++q)
            for(int r = 0; r < 4; ++r) rho(q, r) += amp[static_cast<std::size_t>(q)] * std::conj(amp[static_cast<std::size_t>(r)]);
    }
    return rho;
}

inline Eigen::Matrix2cd one_site_rdm(int L, const Vector &psi, int j) {
    const auto       b   = site_bit(L, j);
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for(Eigen::Index s = 0; s < psi.size(); ++s) {
        const auto us = static_cast<std::uint64_t>(s);
        if(us & b) continue;
        const cplx up = psi[s], dn = psi[static_cast<Eigen::Index>(us | b)];
        rho(0, 0) += up * std::conj(up);
        rho(0, 1) += up * std::conj(dn);
        rho(1, 0) += dn * std::conj(up);
        rho(1, 1) += dn * std::conj(dn);
    }
    return rho;
}

// |L/2, m> as the normalized sum of all configurations with L/2 + m up spins.
inline Vector dicke_state(int L, double m) {
    const double up_d = 0.5 * L + m;
    const int    up   = static_cast<int>(std::lround(up_d));
    if(std::abs(up_d - up) > 1e-9 || up < 0 || up > L) throw std::invalid_argument("m is not admissible for this L");
    const std::uint64_t dim = std::uint64_t{1} << L;
    Vector              psi = Vector::Zero(static_cast<Eigen::Index>(dim));
    for(std::uint64_t s = 0; s < dim; ++s)
        if(L - std::popcount(s) == up) psi[static_cast<Eigen::Index>(s)] = 1.0;
    return psi.normalized();
}

// Amplitudes after exchanging sites j and k.
inline Vector swap_sites(int L, const Vector &psi, int j, int k) {
    const auto bj = site_bit(L, j), bk = site_bit(L, k);
    Vector     out(psi.size());
    for(Eigen::Index s = 0; s < psi.size(); ++s) {
        auto       us  = static_cast<std::uint64_t>(s);
        const bool vj  = us & bj, vk = us & bk;
        if(vj != vk) us ^= (bj | bk);
        out[static_cast<Eigen::Index>(us)] = psi[s];
    }
    return out;
}

} // namespace ed

struct EdState {
    double energy = 0.0;
    Vector amplitudes;
    Spin   casimir_l;
    bool   degenerate = false; // shares its (E, l) with other states
};

// Default site pairs (1,2), (1, 1+⌊L/4⌋), (1, 1+⌊L/2⌋), 0-based.
inline std::vector<std::pair<int, int>> default_site_pairs(int L) {
    std::vector<std::pair<int, int>> out;
    for(int k : {1, L / 4, L / 2}) {
        const std::pair<int, int> p{0, std::max(k, 1)};
        if(p.second < L && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

// J² is resolved first (inside each S_z block), then H within each J² eigenspace.
inline std::vector<EdState> dense_ed(int L, const ModelParams &p, int cap = ed::default_cap) {
    if(L < 1) throw std::invalid_argument("dense ED needs L >= 1");
    if(L > cap) throw TooLarge("dense ED is capped at L=" + std::to_string(cap) + ", got L=" + std::to_string(L));
    const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << L);
    const auto H   = ed::hamiltonian(L, p);
    const auto J2  = ed::casimir(L);

    // Columns of J² eigenvectors grouped by 2l.
    std::vector<std::vector<Eigen::VectorXd>> by_sector(static_cast<std::size_t>(L) + 1);
    for(int up = 0; up <= L; ++up) {
        std::vector<Eigen::Index> idx;
        for(Eigen::Index s = 0; s < dim; ++s)
            if(L - std::popcount(static_cast<std::uint64_t>(s)) == up) idx.push_back(s);
        const auto      n = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd block(n, n);
        for(Eigen::Index a = 0; a < n; ++a)
            for(Eigen::Index b = 0; b < n; ++b) block(a, b) = J2.coeff(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        for(Eigen::Index c = 0; c < n; ++c) {
            const double lval  = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * es.eigenvalues()[c]));
            const int    twice = static_cast<int>(std::lround(2.0 * lval));
            Eigen::VectorXd v  = Eigen::VectorXd::Zero(dim);
            for(Eigen::Index a = 0; a < n; ++a) v[idx[static_cast<std::size_t>(a)]] = es.eigenvectors()(a, c);
            by_sector[static_cast<std::size_t>(twice)].push_back(std::move(v));
        }
    }

    std::vector<EdState> out;
    for(int twice = L % 2; twice <= L; twice += 2) {
        const auto     &cols = by_sector[static_cast<std::size_t>(twice)];
        const auto      n    = static_cast<Eigen::Index>(cols.size());
        Eigen::MatrixXd V(dim, n);
        for(Eigen::Index c = 0; c < n; ++c) V.col(c) = cols[static_cast<std::size_t>(c)];
        const Eigen::MatrixXd HV = H * V;
        Eigen::MatrixXd       Hl = V.transpose() * HV;
        Hl                       = 0.5 * (Hl + Hl.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hl);
        const Eigen::MatrixXd                          states = V * es.eigenvectors();
        const double width = n ? es.eigenvalues()[n - 1] - es.eigenvalues()[0] : 0.0;
        const double gap   = 1e-8 * std::max(width, 1.0);
        for(Eigen::Index c = 0; c < n; ++c) {
            EdState st;
            st.energy     = es.eigenvalues()[c];
            st.amplitudes = states.col(c).cast<cplx>();
            st.casimir_l  = Spin(twice);
            st.degenerate = (c > 0 && es.eigenvalues()[c] - es.eigenvalues()[c - 1] <= gap) ||
                            (c + 1 < n && es.eigenvalues()[c + 1] - es.eigenvalues()[c] <= gap);
            out.push_back(std::move(st));
        }
    }
    return out;
}

inline double casimir_expectation(int L, const Vector &psi) {
    const auto m = ed::collective_moments(L, psi, std::nullopt);
    return m.second.trace().real();
}

inline std::vector<double> site_resolved_concurrences(int L, const EdState &state, const std::vector<std::pair<int, int>> &pairs) {
    std::vector<double> out;
    for(const auto &[a, b] : pairs) out.push_back(concurrence(ed::two_site_rdm(L, state.amplitudes, a, b)).value);
    return out;
}

inline std::vector<double> site_resolved_concurrences(int L, const EdState &state) {
    return site_resolved_concurrences(L, state, default_site_pairs(L));
}

struct ToyState {
    double              energy = 0.0;
    std::vector<double> expectations; // <J_z^α> = m^α, α = 0..L
};

inline std::vector<ToyState> toy_exact(int L) {
    if(L < 1) throw std::invalid_argument("toy model needs L >= 1");
    std::vector<ToyState> out;
    for(int k = L; k >= 0; --k) {
        ToyState s;
        s.energy = 0.5 * L - k;
        for(int a = 0; a <= L; ++a) s.expectations.push_back(std::pow(s.energy, a));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace lmgboot
