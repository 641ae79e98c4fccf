#pragma once

// Spin-l representations of su(2), the monomial operator basis
// J_x^a J_y^b J_z^c and Hilbert-space traces evaluated sector by sector.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmgboot {

using cplx     = std::complex<double>;
using Matrix   = Eigen::MatrixXcd;
using Vector   = Eigen::VectorXcd;
using RealVec  = Eigen::VectorXd;

// Half-integer spin label stored as the integer 2l.
struct Spin {
    int twice = 0;

    constexpr Spin() = default;
    constexpr explicit Spin(int twice_l) : twice(twice_l) {}

    static Spin from_double(double l) {
        const double t = 2.0 * l;
        const double r = std::round(t);
        if(l < 0.0 || std::abs(t - r) > 1e-9)
            throw std::invalid_argument("spin label must be a non-negative half-integer, got " + std::to_string(l));
        return Spin(static_cast<int>(r));
    }

    [[nodiscard]] constexpr double value() const { return 0.5 * twice; }
    [[nodiscard]] constexpr int    dim() const { return twice + 1; }
    [[nodiscard]] constexpr double casimir() const { return value() * (value() + 1.0); }

    // "1", "3/2", ...
    [[nodiscard]] std::string str() const {
        return twice % 2 == 0 ? std::to_string(twice / 2) : std::to_string(twice) + "/2";
    }

    constexpr auto operator<=>(const Spin &) const = default;
};

namespace detail {

// C(n, k) in exact 64-bit arithmetic; each intermediate is itself a binomial.
inline std::uint64_t binomial(int n, int k) {
    if(k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for(int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

} // namespace detail

// Largest L for which the multiplicities fit comfortably in 64 bits.
inline constexpr int max_system_size = 60;

inline void check_admissible(int L, Spin l) {
    if(L < 1 || L > max_system_size)
        throw std::invalid_argument("system size L must lie in [1, " + std::to_string(max_system_size) + "], got " + std::to_string(L));
    if(l.twice < 0 || l.twice > L)
        throw std::invalid_argument("sector l=" + l.str() + " exceeds L/2 for L=" + std::to_string(L));
    if((l.twice - L) % 2 != 0)
        throw std::invalid_argument("sector l=" + l.str() + " has the wrong parity for L=" + std::to_string(L));
}

// Number of copies d_l of the spin-l irrep inside (spin-1/2)^{⊗L}.
inline std::uint64_t multiplicity(int L, Spin l) {
    check_admissible(L, l);
    // d_l = (2l+1)/(L+1) * C(L+1, L/2 + l + 1); the division is exact.
    const int  k    = (L + l.twice) / 2 + 1;
    const auto prod = static_cast<unsigned __int128>(detail::binomial(L + 1, k)) * static_cast<unsigned>(l.dim());
    return static_cast<std::uint64_t>(prod / static_cast<unsigned>(L + 1));
}

struct SpinSector {
    Spin          l;
    int           dim          = 1;
    std::uint64_t multiplicity = 1;
};

// Admissible sectors l_min, l_min + 1, ..., L/2 in ascending order.
inline std::vector<SpinSector> sectors(int L) {
    if(L < 1 || L > max_system_size) throw std::invalid_argument("system size L out of range: " + std::to_string(L));
    std::vector<SpinSector> out;
    for(int t = L % 2; t <= L; t += 2) {
        Spin l(t);
        out.push_back({l, l.dim(), multiplicity(L, l)});
    }
    return out;
}

struct SpinMatrices {
    Matrix x, y, z;
};

// Spin-l generators in the J_z eigenbasis, ordered m = l, l-1, ..., -l.
inline SpinMatrices spin_matrices(Spin l) {
    if(l.twice < 0) throw std::invalid_argument("negative spin label");
    const int    n = l.dim();
    const double s = l.value();
    Matrix       jp = Matrix::Zero(n, n); // raising operator
    Matrix       jz = Matrix::Zero(n, n);
    for(int i = 0; i < n; ++i) {
        const double m = s - i;
        jz(i, i)       = m;
        if(i > 0) jp(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    const Matrix jm = jp.adjoint();
    return {0.5 * (jp + jm), cplx(0.0, -0.5) * (jp - jm), jz};
}

inline SpinMatrices spin_matrices(double l) { return spin_matrices(Spin::from_double(l)); }

struct Monomial {
    int a = 0, b = 0, c = 0;

    [[nodiscard]] constexpr int degree() const { return a + b + c; }
    constexpr auto operator<=>(const Monomial &) const = default;
};

// Monomials J_x^a J_y^b J_z^c with a + b + c <= L, graded lexicographic in
// (a+b+c, a, b) with larger exponents of J_x first inside a degree.
class MonomialBasis {
    public:
    explicit MonomialBasis(int L) : L_(L) {
        if(L < 1) throw std::invalid_argument("monomial basis needs L >= 1");
        for(int d = 0; d <= L; ++d)
            for(int a = d; a >= 0; --a)
                for(int b = d - a; b >= 0; --b) {
                    Monomial m{a, b, d - a - b};
                    index_.emplace(m, static_cast<int>(entries_.size()));
                    entries_.push_back(m);
                }
    }

    [[nodiscard]] int                          system_size() const { return L_; }
    [[nodiscard]] int                          size() const { return static_cast<int>(entries_.size()); }
    [[nodiscard]] const Monomial              &operator[](int i) const { return entries_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] const std::vector<Monomial> &entries() const { return entries_; }
    [[nodiscard]] bool                         contains(const Monomial &m) const { return index_.contains(m); }

    [[nodiscard]] int index(const Monomial &m) const {
        auto it = index_.find(m);
        if(it == index_.end())
            throw std::out_of_range("monomial (" + std::to_string(m.a) + "," + std::to_string(m.b) + "," + std::to_string(m.c) +
                                    ") not in basis for L=" + std::to_string(L_));
        return it->second;
    }

    static constexpr long expected_size(long L) { return (L + 1) * (L + 2) * (L + 3) / 6; }

    private:
    int                         L_;
    std::vector<Monomial>       entries_;
    std::map<Monomial, int>     index_;
};

// Cached powers J_i^k of one sector's generators, k = 0..max_power.
class SectorPowers {
    public:
    SectorPowers(SpinSector sector, int max_power) : sector_(sector) {
        const auto gens = spin_matrices(sector.l);
        const int  n    = sector.dim;
        for(int axis = 0; axis < 3; ++axis) {
            const Matrix &g = axis == 0 ? gens.x : axis == 1 ? gens.y : gens.z;
            auto         &p = powers_[static_cast<std::size_t>(axis)];
            p.reserve(static_cast<std::size_t>(max_power) + 1);
            p.push_back(Matrix::Identity(n, n));
            for(int k = 1; k <= max_power; ++k) p.push_back(p.back() * g);
        }
    }

    [[nodiscard]] const SpinSector &sector() const { return sector_; }
    [[nodiscard]] int               max_power() const { return static_cast<int>(powers_[0].size()) - 1; }

    // (J_x)^a (J_y)^b (J_z)^c, multiplied left to right.
    [[nodiscard]] Matrix monomial(const Monomial &m) const {
        if(m.a > max_power() || m.b > max_power() || m.c > max_power()) throw std::out_of_range("monomial power exceeds cache");
        const Matrix &px = powers_[0][static_cast<std::size_t>(m.a)];
        const Matrix &py = powers_[1][static_cast<std::size_t>(m.b)];
        const Matrix &pz = powers_[2][static_cast<std::size_t>(m.c)];
        if(m.a == 0 && m.b == 0) return pz;
        if(m.a == 0) return py * pz;
        if(m.b == 0 && m.c == 0) return px;
        if(m.c == 0) return px * py;
        if(m.b == 0) return px * pz;
        return px * (py * pz);
    }

    private:
    SpinSector                          sector_;
    std::array<std::vector<Matrix>, 3> powers_;
};

inline Matrix monomial_block(const Monomial &m, const SpinSector &sector) {
    return SectorPowers(sector, std::max({m.a, m.b, m.c})).monomial(m);
}

// Collective-spin operator as one dense block per sector.
struct BlockOperator {
    std::vector<SpinSector> sectors;
    std::vector<Matrix>     blocks;

    // Σ_l d_l tr(block_l)
    [[nodiscard]] cplx trace() const {
        cplx t = 0.0;
        for(std::size_t s = 0; s < blocks.size(); ++s) t += static_cast<double>(sectors[s].multiplicity) * blocks[s].trace();
        return t;
    }
};

// All monomials of a basis realized in every sector of the same L, built
// once and shared by trace evaluations.
class SpinRepresentation {
    public:
    explicit SpinRepresentation(int L) : L_(L), sectors_(lmgboot::sectors(L)) {
        for(const auto &s : sectors_) powers_.emplace_back(s, L);
    }

    [[nodiscard]] int                            system_size() const { return L_; }
    [[nodiscard]] const std::vector<SpinSector> &sectors() const { return sectors_; }
    [[nodiscard]] const SectorPowers            &powers(std::size_t s) const { return powers_.at(s); }

    [[nodiscard]] BlockOperator operator_of(const Monomial &m) const {
        BlockOperator op{sectors_, {}};
        for(const auto &p : powers_) op.blocks.push_back(p.monomial(m));
        return op;
    }

    // Full 2^L-dimensional trace of the ordered product of 0-3 monomials.
    [[nodiscard]] cplx weighted_trace(const std::vector<Monomial> &ops) const {
        if(ops.size() > 3) throw std::invalid_argument("weighted_trace takes at most three monomials");
        for(const auto &m : ops)
            if(m.a < 0 || m.b < 0 || m.c < 0 || m.degree() > L_) throw std::invalid_argument("monomial not valid for this L");
        cplx total = 0.0;
        for(const auto &p : powers_) {
            const int n = p.sector().dim;
            Matrix    prod = Matrix::Identity(n, n);
            for(const auto &m : ops) prod = prod * p.monomial(m);
            total += static_cast<double>(p.sector().multiplicity) * prod.trace();
        }
        return total;
    }

    private:
    int                       L_;
    std::vector<SpinSector>   sectors_;
    std::vector<SectorPowers> powers_;
};

inline cplx weighted_trace(const std::vector<Monomial> &ops, int L) { return SpinRepresentation(L).weighted_trace(ops); }

} // namespace lmgboot
