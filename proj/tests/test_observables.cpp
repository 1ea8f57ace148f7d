#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qsv/observables.hpp"
#include "test_support.hpp"

using namespace qsv;
using qsv::test::mild_params;
using qsv::test::reference_params;

namespace {

Matrix random_unitary2(std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    Matrix a(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
    const Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < 2; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
    return q;
}

Matrix kron2(const Matrix& a, const Matrix& b) {
    Matrix out(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    return out;
}

Vector bell_psi(double sign) {
    Vector v = Vector::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = sign / std::sqrt(2.0);
    return v;
}

Matrix pure(const Vector& v) { return v * v.adjoint(); }

}  // namespace

TEST_CASE("occupation probabilities") {
    const DeviceParams p = reference_params();
    const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
    Matrix rho = Matrix::Zero(12, 12);
    rho(basis.index_of("b1"), basis.index_of("b1")) = 1.0;
    auto occ = occupation_probabilities(rho, basis);
    CHECK(occ.at("b1") == doctest::Approx(1.0));
    double sum = 0.0;
    for (auto& [label, prob] : occ) sum += prob;
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("reduced ancilla state: canonical cases and linearity") {
    const DeviceParams p = reference_params();
    const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
    const int n = basis.dim();

    // |a1> -> the ancilla singlet
    Matrix rho_a1 = Matrix::Zero(n, n);
    rho_a1(basis.index_of("a1"), basis.index_of("a1")) = 1.0;
    const Matrix red_a1 = reduced_ancilla_state(rho_a1, basis);
    CHECK((red_a1 - pure(bell_psi(-1.0))).cwiseAbs().maxCoeff() < 1e-12);

    // |b1> -> (1/3)|psi+><psi+| + (2/3)|uu><uu|
    Matrix rho_b1 = Matrix::Zero(n, n);
    rho_b1(basis.index_of("b1"), basis.index_of("b1")) = 1.0;
    const Matrix red_b1 = reduced_ancilla_state(rho_b1, basis);
    Matrix expect = pure(bell_psi(1.0)) / 3.0;
    expect(0, 0) += 2.0 / 3.0;
    CHECK((red_b1 - expect).cwiseAbs().maxCoeff() < 1e-12);

    // maximally mixed system -> maximally mixed ancillae
    const Matrix red_mix =
        reduced_ancilla_state(Matrix::Identity(n, n) / double(n), basis);
    CHECK((red_mix - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-12);

    // partial trace is linear over convex mixtures
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Matrix r1 = qsv::test::random_block_density(basis.blocks, n, rng);
        const Matrix r2 = qsv::test::random_block_density(basis.blocks, n, rng);
        const double w = uni(rng);
        const Matrix lhs = reduced_ancilla_state(w * r1 + (1 - w) * r2, basis);
        const Matrix rhs = w * reduced_ancilla_state(r1, basis) +
                           (1 - w) * reduced_ancilla_state(r2, basis);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("concurrence: canonical values") {
    CHECK(concurrence(pure(bell_psi(1.0))) == doctest::Approx(1.0));
    CHECK(concurrence(pure(bell_psi(-1.0))) == doctest::Approx(1.0));
    Matrix uu = Matrix::Zero(4, 4);
    uu(0, 0) = 1.0;
    CHECK(concurrence(uu) == doctest::Approx(0.0));
    // the b1 reduced state: eigenvalue 1/9 of rho rho~ gives C = 1/3
    Matrix mix = pure(bell_psi(1.0)) / 3.0;
    mix(0, 0) += 2.0 / 3.0;
    CHECK(concurrence(mix) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("concurrence: local unitary invariance and separable zeros") {
    std::mt19937 rng(67);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // local unitaries leave the concurrence unchanged (100 draws)
    Matrix rho = pure(bell_psi(1.0)) / 3.0;
    rho(0, 0) += 2.0 / 3.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix u = kron2(random_unitary2(rng), random_unitary2(rng));
        const double c = concurrence(u * rho * u.adjoint());
        CHECK(std::abs(c - 1.0 / 3.0) < 1e-10);
    }

    // random separable mixtures have zero concurrence after the clamp
    for (int trial = 0; trial < 100; ++trial) {
        Matrix sep = Matrix::Zero(4, 4);
        const int terms = 1 + int(uni(rng) * 4);
        double wsum = 0.0;
        for (int k = 0; k < terms; ++k) {
            Vector a(2), b(2);
            for (int i = 0; i < 2; ++i) {
                a(i) = Complex(gauss(rng), gauss(rng));
                b(i) = Complex(gauss(rng), gauss(rng));
            }
            a.normalize();
            b.normalize();
            const double w = uni(rng) + 0.1;
            wsum += w;
            Vector prod(4);
            for (int i = 0; i < 4; ++i) prod(i) = a(i / 2) * b(i % 2);
            sep += w * pure(prod);
        }
        sep /= wsum;
        CHECK(concurrence(sep) < 1e-10);
    }
}

TEST_CASE("currents: equilibrium zero and steady-state conservation") {
    SUBCASE("equilibrium") {
        DeviceParams p = mild_params(0.0, 2e-2);
        const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
        const auto jumps = jump_operators(p, basis);
        const auto gen = build_block_generator(total_hamiltonian(p, basis), jumps,
                                               basis.blocks);
        const auto ss = steady_state(gen);
        CHECK(std::abs(current(ss.rho, jumps, Contact::L)) < 1e-12);
        CHECK(std::abs(current(ss.rho, jumps, Contact::R)) < 1e-12);
    }
    SUBCASE("biased transport: I_L = -I_R") {
        for (double v : {7.0, 30.0, 50.0}) {
            const DeviceParams p = reference_params(v);
            const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
            const auto jumps = jump_operators(p, basis);
            const auto gen = build_block_generator(total_hamiltonian(p, basis), jumps,
                                                   basis.blocks);
            const auto ss = steady_state(gen);
            const double il = current(ss.rho, jumps, Contact::L);
            const double ir = current(ss.rho, jumps, Contact::R);
            CHECK(std::abs(il + ir) < 1e-9 * p.gamma_ref());
        }
    }
    SUBCASE("spin blockade suppresses the plateau current") {
        const DeviceParams p = reference_params(50.0);
        const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
        const auto jumps = jump_operators(p, basis);
        const auto gen = build_block_generator(total_hamiltonian(p, basis), jumps,
                                               basis.blocks);
        const auto ss = steady_state(gen);
        CHECK(std::abs(current(ss.rho, jumps, Contact::L)) < 1e-3 * p.gamma_ref());
    }
}

TEST_CASE("total spin z expectation") {
    const DeviceParams p = reference_params();
    const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
    const int n = basis.dim();
    auto pure_state = [&](const std::string& label) {
        Matrix rho = Matrix::Zero(n, n);
        rho(basis.index_of(label), basis.index_of(label)) = 1.0;
        return rho;
    };
    CHECK(total_sz(pure_state("b1"), basis) == doctest::Approx(0.5));
    CHECK(total_sz(pure_state("b2"), basis) == doctest::Approx(-0.5));
    CHECK(total_sz(pure_state("c2"), basis) == doctest::Approx(1.5));
    CHECK(total_sz(pure_state("c1"), basis) == doctest::Approx(-1.5));
    CHECK(total_sz(pure_state("a1"), basis) == doctest::Approx(-0.5));
}

TEST_CASE("dot post-selection") {
    const DeviceParams p = reference_params();
    const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
    const int n = basis.dim();

    Matrix rho_b1 = Matrix::Zero(n, n);
    rho_b1(basis.index_of("b1"), basis.index_of("b1")) = 1.0;

    const auto up = postselect_dot(rho_b1, basis, DotOutcome::Up);
    CHECK(up.probability == doctest::Approx(1.0 / 3.0));
    CHECK(bell_psi_plus_fidelity(up.conditional_ancilla) == doctest::Approx(1.0));

    const auto down = postselect_dot(rho_b1, basis, DotOutcome::Down);
    CHECK(down.probability == doctest::Approx(2.0 / 3.0));
    CHECK(std::abs(down.conditional_ancilla(0, 0) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(concurrence(down.conditional_ancilla) < 1e-12);

    // empty dot: no spin outcome at all
    Matrix rho_01 = Matrix::Zero(n, n);
    rho_01(0, 0) = 1.0;
    CHECK(postselect_dot(rho_01, basis, DotOutcome::Up).probability ==
          doctest::Approx(0.0));
    CHECK(postselect_dot(rho_01, basis, DotOutcome::Down).probability ==
          doctest::Approx(0.0));
    CHECK(postselect_dot(rho_01, basis, DotOutcome::Empty).probability ==
          doctest::Approx(1.0));

    // outcome probabilities always sum to one (random block states)
    std::mt19937 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix rho = qsv::test::random_block_density(basis.blocks, n, rng);
        double sum = 0.0;
        for (auto o : {DotOutcome::Up, DotOutcome::Down, DotOutcome::Empty,
                       DotOutcome::Double})
            sum += postselect_dot(rho, basis, o).probability;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("steady-state report is self-consistent") {
    const DeviceParams p = reference_params(50.0);
    const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
    const auto jumps = jump_operators(p, basis);
    const auto gen = build_block_generator(total_hamiltonian(p, basis), jumps, basis.blocks);
    const auto ss = steady_state(gen);
    const SteadyStateReport rep = make_report(ss.rho, basis, jumps, spectral_gap(gen),
                                              ss.multiplicity);
    double occ_sum = 0.0;
    for (auto& [label, prob] : rep.occupations) occ_sum += prob;
    CHECK(occ_sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.concurrence == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
    CHECK(rep.p_up + rep.p_down + rep.p_empty + rep.p_double ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(rep.current_l + rep.current_r) < 1e-9 * p.gamma_ref());
    CHECK(rep.sz_total == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rep.multiplicity == 2);
}
