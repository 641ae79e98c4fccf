#include "lmgboot/measures.hpp"
#include "lmgboot/oracles.hpp"
#include "oracle_support.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace lmgboot;

namespace {

// Moments of a pure state given in the |l, m> basis of one sector.
MomentSet sector_state_moments(int L, Spin l, const Vector &psi) {
    const auto                          j = spin_matrices(l);
    const std::array<const Matrix *, 3> ops{&j.x, &j.y, &j.z};
    Eigen::Vector3cd                    first;
    Matrix3c                            second;
    for(int a = 0; a < 3; ++a) {
        first[a] = psi.dot(*ops[static_cast<std::size_t>(a)] * psi);
        for(int b = 0; b < 3; ++b) second(a, b) = psi.dot(*ops[static_cast<std::size_t>(a)] * (*ops[static_cast<std::size_t>(b)] * psi));
    }
    return make_moments(first, second, L, l);
}

MomentSet polarized(int L) {
    MomentSet m;
    m.L        = L;
    m.sector   = Spin(L);
    m.first    = Vec3(0, 0, 0.5 * L);
    m.second   = Matrix3c::Zero();
    m.second(0, 0) = m.second(1, 1) = 0.25 * L;
    m.second(2, 2) = 0.25 * L * L;
    m.second(0, 1) = cplx(0, 0.5 * 0.5 * L);
    m.second(1, 0) = cplx(0, -0.5 * 0.5 * L);
    return m;
}

MomentSet ghz_like(int L) {
    MomentSet m;
    m.L            = L;
    m.sector       = Spin(L);
    m.second(0, 0) = m.second(1, 1) = 0.25 * L;
    m.second(2, 2) = 0.25 * L * L;
    return m;
}

// ⟨L=2, l=1⟩ states at γ = h_x = h_z = 1 from the exact 4×4 Hamiltonian.
struct TwoSpinReference {
    double E, C, tau, fx, fy, fz, fmax;
};

constexpr std::array<TwoSpinReference, 3> two_spin_reference{{
    {-1.56309903426365, 0.06147660867046995, 0.00377937341362156, 0.740319562727255, 1.8770467826590607, 1.3977511482681724,
     2.12295321734094},
    {-0.0075690235640352, 0.9395553672822954, 0.88276428818897, 1.9291252200278444, 3.87911073456459, 1.722821198163442,
     3.87911073456459},
    {1.32066805782768, 0.12192124138817399, 0.0148647891016349, 1.2178791609068698, 2.2438424827763463, 0.5977375127233171,
     2.24384248277635},
}};

std::vector<MomentSet> two_spin_bootstrap_moments() {
    LmgBootstrap boot(2);
    const auto   r = boot.solve_sector({1, 1, 1}, Spin(2));
    std::vector<MomentSet> out;
    for(const auto &s : r.solutions) out.push_back(moments_from_solution(s, boot.basis()));
    return out;
}

} // namespace

TEST(Moments, TwoSpinGroundStateFirstMoments) {
    const auto m = two_spin_bootstrap_moments();
    ASSERT_EQ(m.size(), 3u);
    EXPECT_NEAR(m[0].first[0], 0.8084, 1e-3);
    EXPECT_NEAR(m[0].first[1], 0.0, 1e-9);
    EXPECT_NEAR(m[0].first[2], 0.5854, 1e-3);
    for(const auto &s : m)
        for(int i = 0; i < 3; ++i)
            for(int j = 0; j < 3; ++j) EXPECT_LT(std::abs(s.second(i, j) - std::conj(s.second(j, i))), 1e-6);
}

TEST(Moments, SingletIsAllZero) {
    LmgBootstrap boot(2);
    const auto   r = boot.solve_sector({1, 1, 1}, Spin(0));
    const auto   m = moments_from_solution(r.solutions.at(0), boot.basis());
    EXPECT_LT(m.first.norm(), 1e-9);
    EXPECT_LT(m.second.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Moments, RejectsNonHermitianInput) {
    Eigen::Vector3cd first(cplx(0.1, 0.5), 0, 0);
    EXPECT_THROW(make_moments(first, Matrix3c::Zero(), 2, std::nullopt), HermiticityViolated);
    Matrix3c second = Matrix3c::Identity();
    EXPECT_THROW(make_moments(Eigen::Vector3cd::Zero(), second, 2, Spin(2)), HermiticityViolated); // Casimir 3 ≠ 2
}

TEST(TwoQubitRdm, PolarizedIsUpUp) {
    const auto d    = two_qubit_rdm(polarized(6));
    Matrix4c   want = Matrix4c::Zero();
    want(0, 0)      = 1.0;
    EXPECT_LT((d.rho - want).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_FALSE(d.assumed_symmetric);
}

TEST(TwoQubitRdm, MaximallyMixedMoments) {
    MomentSet m;
    m.L      = 6;
    m.second = Matrix3c::Identity() * 1.5;
    const auto d = two_qubit_rdm(m);
    EXPECT_LT((d.rho - Matrix4c::Identity() / 4.0).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(concurrence(d).value, 0.0, 1e-12);
}

TEST(TwoQubitRdm, StructureOnBootstrapStates) {
    const auto m = two_spin_bootstrap_moments();
    const auto d = two_qubit_rdm(m[1]);
    EXPECT_NEAR(d.f(1, 1).real(), 0.0222, 1e-3);
    for(const auto &s : m) {
        const auto r = two_qubit_rdm(s);
        EXPECT_NEAR(std::abs(r.f(0, 0) - 0.25), 0.0, 1e-12);
        EXPECT_LT((r.f - r.f.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(std::abs(r.rho.trace() - 1.0), 0.0, 1e-10);
        EXPECT_LT(r.hermiticity_error, 1e-10);
    }
    MomentSet one;
    one.L = 1;
    EXPECT_THROW(two_qubit_rdm(one), std::invalid_argument);
}

TEST(TwoQubitRdm, LowerSectorIsFlagged) {
    MomentSet m;
    m.L      = 4;
    m.sector = Spin(2);
    m.second = Matrix3c::Identity() * (2.0 / 3.0);
    EXPECT_TRUE(two_qubit_rdm(m).assumed_symmetric);
}

TEST(Concurrence, BellAndMixed) {
    Eigen::Vector4cd bell(0, 1, 1, 0);
    bell /= std::sqrt(2.0);
    EXPECT_NEAR(concurrence(Matrix4c(bell * bell.adjoint())).value, 1.0, 1e-10);
    EXPECT_NEAR(concurrence(Matrix4c(Matrix4c::Identity() / 4.0)).value, 0.0, 1e-12);
}

TEST(Concurrence, MatchesSquareRootDefinition) {
    std::mt19937 rng(2024);
    for(int trial = 0; trial < 200; ++trial) {
        const Matrix   rho = oracle::random_density(4, 4, rng);
        const Matrix4c r4  = rho;
        EXPECT_NEAR(concurrence(r4).value, oracle::concurrence_via_r(rho), 1e-8) << trial;
    }
}

TEST(Concurrence, PureStatesMatchOverlapFormula) {
    std::mt19937   rng(31);
    const Matrix4c yy = kron(pauli()[2], pauli()[2]);
    for(int trial = 0; trial < 200; ++trial) {
        const Eigen::Vector4cd psi = oracle::random_state(4, rng);
        // C = |<ψ|σy⊗σy|ψ*>|
        const double want = std::abs(psi.dot(yy * psi.conjugate()));
        EXPECT_NEAR(concurrence(Matrix4c(psi * psi.adjoint())).value, want, 1e-12) << trial;
    }
}

TEST(Concurrence, NonPhysicalInputIsFlagged) {
    Matrix4c rho = Matrix4c::Identity() / 4.0;
    rho(0, 0) += 0.3;
    rho(3, 3) -= 0.3;
    const auto r = concurrence(rho);
    EXPECT_TRUE(r.non_physical);
    EXPECT_LT(r.min_eigenvalue, -1e-6);
}

TEST(Measures, TwoSpinStatesMatchExactReference) {
    const auto m = two_spin_bootstrap_moments();
    for(std::size_t k = 0; k < 3; ++k) {
        const auto &ref = two_spin_reference[k];
        const auto  rep = measure_all(m[k]);
        EXPECT_NEAR(rep.concurrence->value, ref.C, 1e-9);
        EXPECT_NEAR(rep.tangle, ref.tau, 1e-9);
        EXPECT_NEAR(rep.qfi.f_x, ref.fx, 1e-9);
        EXPECT_NEAR(rep.qfi.f_y, ref.fy, 1e-9);
        EXPECT_NEAR(rep.qfi.f_z, ref.fz, 1e-9);
        EXPECT_NEAR(rep.qfi.f_max, ref.fmax, 1e-9);
        // Two qubits in a pure state: τ = C².
        EXPECT_NEAR(rep.residual->value, 0.0, 1e-9);
    }
    EXPECT_NEAR(measure_all(m[0]).tangle, 0.0038, 1e-4);
}

TEST(Tangle, Examples) {
    EXPECT_NEAR(tangle(polarized(8)), 0.0, 1e-14);
    EXPECT_NEAR(tangle(ghz_like(8)), 1.0, 1e-14);
}

TEST(Entropy, Examples) {
    EXPECT_NEAR(entropy_from_tangle(0.0), 0.0, 1e-14);
    EXPECT_NEAR(entropy_from_tangle(1.0), std::numbers::ln2, 1e-14);
    EXPECT_NEAR(entropy_from_tangle(0.75), -0.75 * std::log(0.75) - 0.25 * std::log(0.25), 1e-14);
    EXPECT_NEAR(entropy_from_tangle(0.75), 0.5623, 1e-4);
    EXPECT_THROW(entropy_from_tangle(1.1), std::invalid_argument);
    EXPECT_THROW(entropy_from_tangle(-0.1), std::invalid_argument);
}

TEST(Entropy, ConsistentWithOneQubitDensity) {
    std::mt19937 rng(9);
    const auto   s = oracle::pauli();
    for(int trial = 0; trial < 100; ++trial) {
        const Matrix rho = oracle::random_density(2, 2, rng);
        MomentSet    m;
        m.L = 1;
        for(int a = 0; a < 3; ++a) m.first[a] = 0.5 * (rho * s[static_cast<std::size_t>(a)]).trace().real();
        const double tau_det = 4.0 * rho.determinant().real();
        EXPECT_NEAR(tangle(m), tau_det, 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        double                                S = 0.0;
        for(int i = 0; i < 2; ++i) S -= es.eigenvalues()[i] * std::log(es.eigenvalues()[i]);
        EXPECT_NEAR(entropy_from_tangle(tau_det), S, 1e-10);
    }
}

TEST(ResidualTangle, Examples) {
    EXPECT_NEAR(residual_tangle(0.0, 0.0, 5).value, 0.0, 1e-15);
    EXPECT_NEAR(residual_tangle(1.0, 0.0, 5).value, 1.0, 1e-15);
    EXPECT_TRUE(residual_tangle(0.1, 0.5, 3).ckw_violated);
}

TEST(ResidualTangle, ThreeQubitWState) {
    const int    L = 3;
    const Vector w = ed::dicke_state(L, 0.5);
    const auto   m = ed::collective_moments(L, w, Spin(3));
    EXPECT_NEAR(std::abs(m.first[2]), 0.5, 1e-12);
    const double c12 = concurrence(ed::two_site_rdm(L, w, 0, 1)).value;
    EXPECT_NEAR(c12, 2.0 / 3.0, 1e-10);
    const auto rep = measure_all(m);
    EXPECT_NEAR(rep.concurrence->value, 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(rep.tangle, 8.0 / 9.0, 1e-12);
    EXPECT_NEAR(rep.residual->value, 0.0, 1e-10);
}

TEST(Qfi, PolarizedAndGhz) {
    for(int L : {2, 5, 8}) {
        const auto p = qfi(polarized(L));
        EXPECT_NEAR(p.f_z, 0.0, 1e-12);
        EXPECT_NEAR(p.f_x, L, 1e-12);
        EXPECT_NEAR(p.f_y, L, 1e-12);
        EXPECT_NEAR(p.f_max, L, 1e-12);
        EXPECT_NEAR(p.f_sum, 2.0 * L, 1e-12);
        EXPECT_EQ(p.depth, 1);

        const auto g = qfi(ghz_like(L));
        EXPECT_NEAR(g.f_max, static_cast<double>(L) * L, 1e-12);
        EXPECT_EQ(g.depth, L);
        EXPECT_GT(g.f_max, producibility_bounds(L, L - 1).f_max);
    }
}

TEST(Producibility, Examples) {
    EXPECT_EQ(producibility_bounds(4, 1).f_max, 4.0);
    EXPECT_EQ(producibility_bounds(4, 1).f_sum, 8.0);
    EXPECT_EQ(producibility_bounds(4, 2).f_max, 8.0);
    EXPECT_EQ(producibility_bounds(4, 2).f_sum, 16.0);
    EXPECT_EQ(producibility_bounds(5, 2).f_max, 9.0);
    EXPECT_EQ(producibility_bounds(5, 2).f_sum, 18.0);
    EXPECT_EQ(producibility_bounds(6, 5).f_max, 26.0);
    EXPECT_THROW(producibility_bounds(4, 0), std::invalid_argument);
    EXPECT_THROW(producibility_bounds(4, 5), std::invalid_argument);
}

TEST(Producibility, MonotoneInK) {
    for(int L = 2; L <= 24; ++L)
        for(int k = 1; k < L; ++k) {
            const auto a = producibility_bounds(L, k), b = producibility_bounds(L, k + 1);
            EXPECT_LE(a.f_max, b.f_max) << L << ' ' << k;
            EXPECT_LE(a.f_sum, b.f_sum) << L << ' ' << k;
        }
}

TEST(Qfi, MaxBeatsEveryDirection) {
    std::mt19937 rng(17);
    for(int trial = 0; trial < 50; ++trial) {
        const int    L   = 2 + trial % 7;
        const Spin   l(trial % 2 == 0 ? L : L - 2);
        const Vector psi = oracle::random_state(l.dim(), rng);
        const auto   m   = sector_state_moments(L, l, psi);
        const auto   r   = qfi(m);
        Eigen::Matrix3d cov;
        for(int i = 0; i < 3; ++i)
            for(int j = 0; j < 3; ++j) cov(i, j) = 0.5 * (m.second(i, j) + m.second(j, i)).real() - m.first[i] * m.first[j];
        double best = 0.0;
        for(int it = 0; it < 360; ++it)
            for(int ip = 0; ip < 180; ++ip) {
                const double theta = std::numbers::pi * (it + 0.5) / 360.0;
                const double phi   = 2.0 * std::numbers::pi * ip / 180.0;
                const Eigen::Vector3d n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
                best = std::max(best, 4.0 * n.dot(cov * n));
            }
        EXPECT_LE(best, r.f_max + 1e-6) << trial;
        EXPECT_GE(r.f_max, std::max({r.f_x, r.f_y, r.f_z}) - 1e-9);
        EXPECT_NEAR(r.f_sum, r.f_x + r.f_y + r.f_z, 1e-9);
        EXPECT_LE(r.f_max, static_cast<double>(L) * L + 1e-6);
    }
}
