// Vectorized dynamics: the dense Liouvillian superoperator, its spectrum,
// steady states and time evolution.
//
// Vectorization stacks columns, so A rho B -> (B^T kron A) |rho>.
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qsv/transport.hpp"

namespace qsv {

Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v);

struct Liouvillian {
    Matrix matrix;  // n^2 x n^2
    std::shared_ptr<const EigenBasis> basis;
    DeviceParams params;
    int n = 0;  // Hilbert-space dimension
};

Liouvillian build_liouvillian(const Matrix& h_total, const JumpOperatorSet& jumps,
                              std::shared_ptr<const EigenBasis> basis,
                              const DeviceParams& params);

// Right-hand side of the block master equation evaluated directly on an
// N x N density matrix.  rho must be block-diagonal with respect to the
// partition; coherences outside the degenerate manifolds above tol raise
// BlockViolation.
Matrix apply_generator_direct(const Matrix& rho, const Matrix& h_total,
                              const JumpOperatorSet& jumps, const BlockPartition& blocks,
                              double block_tol = 1e-9);

struct SpectrumReport {
    Vector eigenvalues;  // sorted by real part, descending
    Matrix right_eigenvectors;
    std::optional<Matrix> left_eigenvectors;
    double spectral_gap = 0.0;
    double scale = 0.0;         // max |lambda|
    bool conjugate_paired = false;
    int zero_count = 0;
};

SpectrumReport spectrum(const Liouvillian& liou, bool with_left = false);

struct SteadyStateResult {
    Matrix rho;                       // canonical physical steady state
    int multiplicity = 1;             // dimension of the null space
    std::vector<Matrix> basis_states; // physical basis when multiplicity > 1
    double residual = 0.0;            // |L vec(rho)| / sigma_max
};

// Null space by SVD (threshold 1e-10 relative to the largest singular value).
// With a degenerate null space the reported state is the one reached from the
// polarized reset state |0,uu>, obtained with the biorthogonal zero-sector
// projector, and a positivity-enforced basis is returned alongside.
SteadyStateResult steady_state(const Liouvillian& liou);

// Generator restricted to the degenerate-block coordinates (the invariant
// subspace that carries every physical steady state).  Much smaller and
// better conditioned than the full superoperator; used by sweeps.
struct BlockGenerator {
    Matrix g;                                  // m x m, m = sum of block dims^2
    std::vector<std::pair<int, int>> coords;   // coordinate -> (row, col)
    std::vector<int> coord_index;              // n*n lookup, -1 off-block
    int n = 0;

    Vector restrict_vec(const Matrix& rho) const;
    Matrix expand(const Vector& v) const;
};

BlockGenerator build_block_generator(const Matrix& h_total, const JumpOperatorSet& jumps,
                                     const BlockPartition& blocks);

SteadyStateResult steady_state(const BlockGenerator& gen);

// -max{Re lambda : Re lambda < -tol*scale} of the restricted generator.
double spectral_gap(const BlockGenerator& gen);

enum class EvolveMethod { RungeKutta4, Spectral };

// Fixed-step RK4 (default) or exact action through the spectral decomposition.
// RK4 raises StepSizeTooLarge when the trace drifts by more than 1e-6.
Matrix evolve(const Matrix& rho0, const Liouvillian& liou, double t_final, double dt,
              EvolveMethod method = EvolveMethod::RungeKutta4);

// Reusable exact propagator e^{L t}; diagonalizes once.
class Propagator {
  public:
    explicit Propagator(const Liouvillian& liou);
    Matrix apply(const Matrix& rho0, double t) const;

  private:
    Vector eigenvalues_;
    Matrix v_;
    Eigen::PartialPivLU<Matrix> v_lu_;
    double scale_ = 0.0;
    int n_ = 0;
};

// Exact action of the block-restricted generator on the block part of rho0.
// For t well past the off-block coherence lifetimes (a few 1/gamma) this
// equals e^{L t} rho0, and its small well-conditioned eigenproblem resolves
// the slow relaxation modes far better than the dense superoperator.
class BlockPropagator {
  public:
    explicit BlockPropagator(const BlockGenerator& gen);
    Matrix apply(const Matrix& rho0, double t) const;

  private:
    BlockGenerator gen_;
    Vector eigenvalues_;
    Matrix v_;
    Eigen::PartialPivLU<Matrix> v_lu_;
    double scale_ = 0.0;
};

}  // namespace qsv
