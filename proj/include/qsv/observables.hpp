// Physical outputs of a steady state: occupations, ancilla concurrence,
// terminal currents, spin expectation and dot post-selection.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "qsv/liouville.hpp"

namespace qsv {

// Diagonal of rho in the eigenbasis, keyed by state label.
std::map<std::string, double> occupation_probabilities(const Matrix& rho_ss,
                                                       const EigenBasis& basis);

// Partial trace over the dot, returned in the ancilla product basis
// {uu, ud, du, dd}.  rho is given in the eigenbasis.
Matrix reduced_ancilla_state(const Matrix& rho, const EigenBasis& basis);

// Wootters concurrence of a two-qubit state.
double concurrence(const Matrix& rho_ab);

// Terminal current at one contact from the steady-state jump fluxes, in units
// of e * kT_ref/hbar:  I = -(in-flux - out-flux) summed over that contact's
// channels.  At steady state I_L = -I_R.
double current(const Matrix& rho_ss, const JumpOperatorSet& jumps, Contact contact);

// <S^z_D + S^z_1 + S^z_2> in units of hbar.
double total_sz(const Matrix& rho_ss, const EigenBasis& basis);

enum class DotOutcome { Up, Down, Empty, Double };

struct PostselectResult {
    double probability = 0.0;
    Matrix conditional_ancilla;  // 4x4; zero matrix when probability is 0
};

// Ideal projective measurement of the dot spin.  Outcome probabilities over
// {up, down, empty, double} sum to one.
PostselectResult postselect_dot(const Matrix& rho_ss, const EigenBasis& basis,
                                DotOutcome outcome);

// Fidelity <psi+|rho|psi+> of a 4x4 ancilla state with the Bell state
// (|ud> + |du>)/sqrt(2).
double bell_psi_plus_fidelity(const Matrix& rho_ab);

struct SteadyStateReport {
    Matrix rho_ss;
    std::map<std::string, double> occupations;
    double concurrence = 0.0;
    double current_l = 0.0;  // e*kT_ref/hbar units
    double current_r = 0.0;
    double current_l_gamma = 0.0;  // normalized by gamma_ref
    double current_r_gamma = 0.0;
    double sz_total = 0.0;
    double spectral_gap = 0.0;
    int multiplicity = 1;
    double p_up = 0.0;
    double p_down = 0.0;
    double p_empty = 0.0;
    double p_double = 0.0;
    Matrix conditional_ancilla_up;
    double conditional_fidelity_to_bell = 0.0;
};

SteadyStateReport make_report(const Matrix& rho_ss, const EigenBasis& basis,
                              const JumpOperatorSet& jumps, double gap, int multiplicity);

}  // namespace qsv
