// Sequential-tunneling machinery: Fermi factors, allowed transitions,
// energy-resolved jump operators and the virtual-precession Hamiltonian.
#pragma once

#include <array>
#include <vector>

#include "qsv/model.hpp"
#include "qsv/params.hpp"

namespace qsv {

enum class Direction : int { In = 0, Out = 1 };
inline const char* to_string(Direction d) { return d == Direction::In ? "in" : "out"; }

double fermi(double e, double mu, double t);

// One allowed particle-addition process |from> -> |to| with N_to = N_from + 1.
// amplitude = <to| d~+_{contact,spin} |from>; the removal process is its
// conjugate.
struct Transition {
    int from_index = 0;
    int to_index = 0;
    double delta_e = 0.0;  // E_to - E_from
    Contact contact = Contact::L;
    Spin spin_channel = Spin::Up;
    Complex amplitude{};
};

struct TransitionTable {
    std::vector<Transition> transitions;
    int dark_count = 0;  // |DeltaN| = 1 pairs with amplitude below threshold
};

TransitionTable transition_table(const EigenBasis& basis,
                                 const std::array<ContactSpec, 2>& contacts);

// Jump operator between one ordered pair of degenerate manifolds, in the
// eigenbasis.  In-operators add an electron (weight gamma * f), out-operators
// remove one (weight gamma * (1 - f)), both evaluated at the manifold energy
// difference delta_e.
struct JumpOperator {
    Matrix matrix;
    double rate_weight = 0.0;
    Contact contact = Contact::L;
    Spin spin_channel = Spin::Up;
    Direction direction = Direction::In;
    double delta_e = 0.0;
    int block_lower = 0;  // manifold indices into BlockPartition
    int block_upper = 0;
};

struct JumpOperatorSet {
    std::vector<JumpOperator> operators;
    int dark_count = 0;
    double gamma_ref = 0.0;
};

JumpOperatorSet jump_operators(const DeviceParams& p, const EigenBasis& basis);

// Principal-value kernel of the virtual-precession Hamiltonian for a flat
// band of half-width w:
//   p(delta) = P Int_{-w}^{w} dE (1 - 2 f_alpha(E)) / (delta - E)
// evaluated in closed form via the digamma function,
//   p = 2 Re psi(1/2 + i (delta - mu)/(2 pi T)) + 2 ln(2 pi T)
//       - ln(w - delta) - ln(w + delta),
// exact up to exp(-(w - |mu|)/T) tail corrections.
double pv_integral(double delta, const ContactSpec& c, double w, double t_ref_k);

// Re psi(1/2 + i y) for the kernel above; exposed for tests.
double re_digamma_half_plus_iy(double y);

// Virtual-precession (Lamb-shift) Hamiltonian in the eigenbasis; Hermitian and
// block-diagonal with respect to the degenerate-manifold partition.
Matrix lamb_shift(const DeviceParams& p, const EigenBasis& basis);

// Diagonal eigenenergies plus the Lamb shift, in the eigenbasis.
Matrix total_hamiltonian(const DeviceParams& p, const EigenBasis& basis);

}  // namespace qsv
