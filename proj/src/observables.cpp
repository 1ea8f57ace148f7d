#include "qsv/observables.hpp"

#include <algorithm>
#include <cmath>

namespace qsv {

namespace {

int dot_dim(UMode mode) { return mode == UMode::Infinite ? 3 : 4; }

// Projector onto one dot sector, lifted to the full product space and
// transformed to the eigenbasis.
Matrix dot_sector_projector(const EigenBasis& basis, int dot_index) {
    const int n = basis.dim();
    Matrix p = Matrix::Zero(n, n);
    if (dot_index >= dot_dim(basis.mode)) return p;  // sector truncated away
    Matrix prod = Matrix::Zero(n, n);
    for (int a = 0; a < 4; ++a) prod(4 * dot_index + a, 4 * dot_index + a) = 1.0;
    const Matrix q = basis.transform();
    return q.adjoint() * prod * q;
}

}  // namespace

std::map<std::string, double> occupation_probabilities(const Matrix& rho_ss,
                                                       const EigenBasis& basis) {
    std::map<std::string, double> occ;
    for (int k = 0; k < basis.dim(); ++k)
        occ[basis.states[k].label] = std::real(rho_ss(k, k));
    return occ;
}

Matrix reduced_ancilla_state(const Matrix& rho, const EigenBasis& basis) {
    const Matrix q = basis.transform();
    const Matrix rho_prod = q * rho * q.adjoint();
    Matrix out = Matrix::Zero(4, 4);
    for (int d = 0; d < dot_dim(basis.mode); ++d)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out(a, b) += rho_prod(4 * d + a, 4 * d + b);
    return out;
}

double concurrence(const Matrix& rho_ab) {
    Matrix sysy = Matrix::Zero(4, 4);
    sysy(0, 3) = -1.0;
    sysy(1, 2) = 1.0;
    sysy(2, 1) = 1.0;
    sysy(3, 0) = -1.0;
    // Hermitian form sqrt(rho) * rho~ * sqrt(rho): same spectrum as rho*rho~
    // but solvable with the backward-stable self-adjoint path.
    Eigen::SelfAdjointEigenSolver<Matrix> es_rho(rho_ab);
    const Matrix sqrt_rho = es_rho.eigenvectors() *
                            es_rho.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                            es_rho.eigenvectors().adjoint();
    const Matrix rho_tilde = sysy * rho_ab.conjugate() * sysy;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sqrt_rho * rho_tilde * sqrt_rho);
    // Zeros of the spectrum come back as O(eps) noise relative to |rho|^2;
    // the square root would blow that up to ~1e-8, so clamp them first.
    const double state_scale = std::norm(rho_ab.trace());
    const double floor =
        1e-13 * std::max({es.eigenvalues().maxCoeff(), state_scale, 0.0});
    std::array<double, 4> lam{};
    for (int k = 0; k < 4; ++k) {
        const double ev = es.eigenvalues()(k);
        lam[k] = ev > floor ? std::sqrt(ev) : 0.0;
    }
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double current(const Matrix& rho_ss, const JumpOperatorSet& jumps, Contact contact) {
    double in_flux = 0.0, out_flux = 0.0;
    for (const JumpOperator& op : jumps.operators) {
        if (op.contact != contact || op.rate_weight == 0.0) continue;
        const double flux =
            op.rate_weight * std::real((op.matrix * rho_ss * op.matrix.adjoint()).trace());
        (op.direction == Direction::In ? in_flux : out_flux) += flux;
    }
    return -(in_flux - out_flux);
}

double total_sz(const Matrix& rho_ss, const EigenBasis& basis) {
    const Matrix q = basis.transform();
    const Matrix sz = q.adjoint() * total_sz_operator(basis.mode) * q;
    return std::real((sz * rho_ss).trace());
}

PostselectResult postselect_dot(const Matrix& rho_ss, const EigenBasis& basis,
                                DotOutcome outcome) {
    int dot_index = 0;
    switch (outcome) {
        case DotOutcome::Empty: dot_index = 0; break;
        case DotOutcome::Up: dot_index = 1; break;
        case DotOutcome::Down: dot_index = 2; break;
        case DotOutcome::Double: dot_index = 3; break;
    }
    const Matrix p = dot_sector_projector(basis, dot_index);
    const Matrix projected = p * rho_ss * p;
    PostselectResult res;
    res.probability = std::real(projected.trace());
    if (res.probability > 1e-14) {
        res.conditional_ancilla = reduced_ancilla_state(projected / res.probability, basis);
    } else {
        res.probability = std::max(res.probability, 0.0);
        res.conditional_ancilla = Matrix::Zero(4, 4);
    }
    return res;
}

double bell_psi_plus_fidelity(const Matrix& rho_ab) {
    Vector psi = Vector::Zero(4);
    psi(1) = psi(2) = 1.0 / std::sqrt(2.0);
    return std::real(psi.dot(rho_ab * psi));
}

SteadyStateReport make_report(const Matrix& rho_ss, const EigenBasis& basis,
                              const JumpOperatorSet& jumps, double gap, int multiplicity) {
    SteadyStateReport rep;
    rep.rho_ss = rho_ss;
    rep.occupations = occupation_probabilities(rho_ss, basis);
    rep.concurrence = concurrence(reduced_ancilla_state(rho_ss, basis));
    rep.current_l = current(rho_ss, jumps, Contact::L);
    rep.current_r = current(rho_ss, jumps, Contact::R);
    const double gref = jumps.gamma_ref > 0.0 ? jumps.gamma_ref : 1.0;
    rep.current_l_gamma = rep.current_l / gref;
    rep.current_r_gamma = rep.current_r / gref;
    rep.sz_total = total_sz(rho_ss, basis);
    rep.spectral_gap = gap;
    rep.multiplicity = multiplicity;
    const auto up = postselect_dot(rho_ss, basis, DotOutcome::Up);
    rep.p_up = up.probability;
    rep.p_down = postselect_dot(rho_ss, basis, DotOutcome::Down).probability;
    rep.p_empty = postselect_dot(rho_ss, basis, DotOutcome::Empty).probability;
    rep.p_double = postselect_dot(rho_ss, basis, DotOutcome::Double).probability;
    rep.conditional_ancilla_up = up.conditional_ancilla;
    rep.conditional_fidelity_to_bell =
        up.probability > 0.0 ? bell_psi_plus_fidelity(up.conditional_ancilla) : 0.0;
    return rep;
}

}  // namespace qsv
