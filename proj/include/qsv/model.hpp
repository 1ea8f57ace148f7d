// System Hilbert space: product basis, Hamiltonian, eigenbasis and operators.
//
// Product basis ordering: index = 4*D + A with dot occupation
// D in {0:empty, 1:up, 2:down, 3:doubly occupied} and ancilla pair
// A in {0:uu, 1:ud, 2:du, 3:dd}.  The infinite-U mode truncates D = 3,
// leaving 12 states with the same index formula.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qsv/common.hpp"
#include "qsv/params.hpp"

namespace qsv {

enum class UMode { Finite, Infinite };

inline UMode u_mode_of(const DeviceParams& p) {
    return p.infinite_u() ? UMode::Infinite : UMode::Finite;
}
inline int dim_of(UMode m) { return m == UMode::Infinite ? 12 : 16; }

std::vector<std::string> build_product_basis(UMode mode);

// H = eps*n_dot + U*n_up*n_down + (2J)*S_D.(S_1+S_2), in the product basis.
// The exchange carries an internal factor of two so that the one-electron
// multiplets land at {eps, eps-2J, eps+J}.
Matrix build_hamiltonian(const DeviceParams& p);

struct EigenState {
    std::string label;   // 01..04, a1, a2, b1, b2, c1..c4, 21..24
    int n_electrons = 0;
    double energy = 0.0;
    Vector amplitudes;   // in the product basis
};

// Degenerate manifolds in canonical order: 0-manifold, a, b, c [, 2-manifold].
struct BlockPartition {
    std::vector<std::vector<int>> groups;

    int block_of(int state_index) const;
    bool same_block(int i, int j) const { return block_of(i) == block_of(j); }
};

struct EigenBasis {
    UMode mode = UMode::Infinite;
    std::vector<EigenState> states;
    BlockPartition blocks;

    int dim() const { return static_cast<int>(states.size()); }
    // Columns are eigenvectors in the product basis, canonical order.
    Matrix transform() const;
    double block_energy(int block) const { return states[blocks.groups[block][0]].energy; }
    int block_electrons(int block) const { return states[blocks.groups[block][0]].n_electrons; }
    int index_of(const std::string& label) const;
};

// Diagonalizes H, resolves the degenerate manifolds into the canonical
// S^2/S_z gauge and labels the states.  Throws DegeneracyResolutionFailure
// if the manifold dimensions are not {4,2,2,4[,4]}.
EigenBasis diagonalize_system(const Matrix& h);

// Dot annihilation operators (d_up, d_down) acting as identity on the ancillae.
std::pair<Matrix, Matrix> dot_operators(UMode mode);

// SU(2) spinor rotation into a contact basis tilted by (theta, phi):
//   d_up'   =  C d_up + S d_down,      C = cos(theta/2) e^{+i phi/2}
//   d_down' = -S* d_up + C* d_down,    S = sin(theta/2) e^{-i phi/2}
std::pair<Matrix, Matrix> rotate_to_contact_basis(const Matrix& d_up, const Matrix& d_down,
                                                  double theta, double phi);

struct SpinOps {
    Matrix x, y, z;
};

SpinOps dot_spin_operators(UMode mode);
SpinOps ancilla_spin_operators(UMode mode, int which);  // which = 1 or 2
Matrix number_operator(UMode mode);                     // dot electron count
Matrix total_sz_operator(UMode mode);                   // S^z_D + S^z_1 + S^z_2
Matrix ancilla_swap_operator(UMode mode);               // exchanges the two ancillae

// The canonical eigenstates in the product basis (used for gauge fixing and
// as the reference in tests); returned in canonical label order.
std::vector<EigenState> reference_eigenstates(const DeviceParams& p);

}  // namespace qsv
