#include "qsv/liouville.hpp"

#include <algorithm>
#include <cmath>

namespace qsv {

namespace {

constexpr double kNullTol = 1e-10;   // relative to sigma_max / scale
constexpr double kNegEigTol = 1e-8;  // most negative admissible rho eigenvalue

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Physicality projection shared by both solvers: hermitize, fail loudly on
// genuinely negative eigenvalues, clip roundoff-level ones, renormalize.
Matrix enforce_physical(Matrix rho) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-14) throw NoSteadyState("steady-state candidate has zero trace");
    rho /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const RealVector ev = es.eigenvalues();
    if (ev.minCoeff() < -kNegEigTol)
        throw NoSteadyState("steady-state candidate has eigenvalue " +
                            std::to_string(ev.minCoeff()) + " below -1e-8");
    RealVector clipped = ev.cwiseMax(0.0);
    Matrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    return out / out.trace();
}

// Common null-space extraction + canonical-state selection.  The svd must be
// of the generator whose coordinates `dim` refers to.
struct NullSpace {
    Matrix right;  // columns span ker(G)
    Matrix left;   // columns span ker(G^+)
    double sigma_max = 0.0;
};

template <typename SvdType>
NullSpace null_space_from_svd(const SvdType& svd, int dim) {
    const RealVector sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    std::vector<int> null_cols;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) <= kNullTol * smax) null_cols.push_back(k);
    if (null_cols.empty()) throw NoSteadyState("no singular value below tolerance");
    NullSpace ns;
    ns.sigma_max = smax;
    ns.right.resize(dim, static_cast<int>(null_cols.size()));
    ns.left.resize(dim, static_cast<int>(null_cols.size()));
    for (size_t j = 0; j < null_cols.size(); ++j) {
        ns.right.col(j) = svd.matrixV().col(null_cols[j]);
        ns.left.col(j) = svd.matrixU().col(null_cols[j]);
    }
    return ns;
}

// lim_{t->inf} e^{Gt} v0 = X (Y^+ X)^{-1} Y^+ v0 for the zero sector (X, Y).
Vector zero_sector_projection(const NullSpace& ns, const Vector& v0) {
    const Matrix gram = ns.left.adjoint() * ns.right;
    return ns.right * gram.partialPivLu().solve(ns.left.adjoint() * v0);
}

}  // namespace

Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix devectorize(const Vector& v) {
    const int n = static_cast<int>(std::lround(std::sqrt(double(v.size()))));
    if (n * n != v.size()) throw std::invalid_argument("devectorize: length is not a square");
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

Liouvillian build_liouvillian(const Matrix& h_total, const JumpOperatorSet& jumps,
                              std::shared_ptr<const EigenBasis> basis,
                              const DeviceParams& params) {
    const int n = static_cast<int>(h_total.rows());
    const Matrix id = Matrix::Identity(n, n);
    Matrix l = -I * (kron(id, h_total) - kron(h_total.transpose(), id));
    for (const JumpOperator& op : jumps.operators) {
        if (op.rate_weight == 0.0) continue;
        const Matrix& o = op.matrix;
        const Matrix oo = o.adjoint() * o;
        l += op.rate_weight *
             (kron(o.conjugate(), o) - 0.5 * kron(id, oo) - 0.5 * kron(oo.transpose(), id));
    }
    return {std::move(l), std::move(basis), params, n};
}

Matrix apply_generator_direct(const Matrix& rho, const Matrix& h_total,
                              const JumpOperatorSet& jumps, const BlockPartition& blocks,
                              double block_tol) {
    const int n = static_cast<int>(rho.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!blocks.same_block(i, j) && std::abs(rho(i, j)) > block_tol)
                throw BlockViolation("rho carries coherence outside the degenerate blocks at (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");

    Matrix out = -I * (h_total * rho - rho * h_total);
    for (const JumpOperator& op : jumps.operators) {
        if (op.rate_weight == 0.0) continue;
        const Matrix& o = op.matrix;
        const Matrix oo = o.adjoint() * o;
        out += op.rate_weight * (o * rho * o.adjoint() - 0.5 * (oo * rho + rho * oo));
    }
    return out;
}

SpectrumReport spectrum(const Liouvillian& liou, bool with_left) {
    Eigen::ComplexEigenSolver<Matrix> es(liou.matrix);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("Liouvillian eigendecomposition failed");

    const int m = static_cast<int>(liou.matrix.rows());
    std::vector<int> order(m);
    for (int k = 0; k < m; ++k) order[k] = k;
    const Vector ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return ev(a).real() != ev(b).real() ? ev(a).real() > ev(b).real()
                                            : ev(a).imag() > ev(b).imag();
    });

    SpectrumReport rep;
    rep.eigenvalues.resize(m);
    rep.right_eigenvectors.resize(m, m);
    for (int k = 0; k < m; ++k) {
        rep.eigenvalues(k) = ev(order[k]);
        rep.right_eigenvectors.col(k) = es.eigenvectors().col(order[k]);
    }
    rep.scale = rep.eigenvalues.cwiseAbs().maxCoeff();

    const double tol = kNullTol * std::max(rep.scale, 1e-300);
    rep.zero_count = 0;
    double slowest = 0.0;
    for (int k = 0; k < m; ++k) {
        const double re = rep.eigenvalues(k).real();
        if (std::abs(rep.eigenvalues(k)) <= tol) ++rep.zero_count;
        if (re < -tol && (slowest == 0.0 || re > slowest)) slowest = re;
    }
    rep.spectral_gap = -slowest;

    // beta symmetry: every eigenvalue must have a conjugate partner.
    std::vector<bool> used(m, false);
    rep.conjugate_paired = true;
    for (int k = 0; k < m && rep.conjugate_paired; ++k) {
        if (used[k] || std::abs(rep.eigenvalues(k).imag()) <= tol) continue;
        bool found = false;
        for (int l = 0; l < m; ++l) {
            if (used[l] || l == k) continue;
            if (std::abs(rep.eigenvalues(l) - std::conj(rep.eigenvalues(k))) <=
                100 * tol + 1e-12 * rep.scale) {
                used[k] = used[l] = true;
                found = true;
                break;
            }
        }
        if (!found) rep.conjugate_paired = false;
    }

    if (with_left) {
        // Rows of V^{-1} are the left eigenvectors (biorthogonal set).
        rep.left_eigenvectors = rep.right_eigenvectors.inverse().adjoint();
    }
    return rep;
}

namespace {

// Shared steady-state logic for full and restricted generators: `to_vec`
// embeds a density matrix into generator coordinates, `from_vec` inverts it.
template <typename ToVec, typename FromVec>
SteadyStateResult steady_state_impl(const Matrix& gen, int n, ToVec&& to_vec,
                                    FromVec&& from_vec) {
    Eigen::BDCSVD<Matrix> svd(gen, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const NullSpace ns = null_space_from_svd(svd, static_cast<int>(gen.rows()));
    const int mult = static_cast<int>(ns.right.cols());

    SteadyStateResult res;
    res.multiplicity = mult;

    // Canonical preparation: dot empty, both ancillae polarized up.
    Matrix reset = Matrix::Zero(n, n);
    reset(0, 0) = 1.0;
    Vector rho_vec = zero_sector_projection(ns, to_vec(reset));
    res.rho = enforce_physical(from_vec(rho_vec));
    res.residual = (gen * to_vec(res.rho)).norm() / std::max(ns.sigma_max, 1e-300);

    if (mult > 1) {
        // Physical basis: project a spread of physical preparations and keep
        // the independent ones.
        std::vector<Matrix> feed;
        for (int k = 0; k < n; ++k) {
            Matrix m = Matrix::Zero(n, n);
            m(k, k) = 1.0;
            feed.push_back(std::move(m));
        }
        Matrix mixed = Matrix::Identity(n, n);
        feed.push_back(mixed / double(n));
        std::vector<Vector> kept;
        for (const Matrix& m : feed) {
            Vector v = zero_sector_projection(ns, to_vec(m));
            if (v.norm() < 1e-12) continue;
            Vector r = v;
            for (const Vector& k2 : kept) r -= k2.dot(r) * k2;
            if (r.norm() > 1e-8 * v.norm()) {
                try {
                    res.basis_states.push_back(enforce_physical(from_vec(v)));
                } catch (const NoSteadyState&) {
                    continue;  // preparation with no weight in a physical direction
                }
                kept.push_back(r.normalized());
            }
            if (static_cast<int>(kept.size()) == mult) break;
        }
    } else {
        res.basis_states.push_back(res.rho);
    }
    return res;
}

}  // namespace

SteadyStateResult steady_state(const Liouvillian& liou) {
    const int n = liou.n;
    return steady_state_impl(
        liou.matrix, n, [](const Matrix& rho) { return vectorize(rho); },
        [](const Vector& v) { return devectorize(v); });
}

Vector BlockGenerator::restrict_vec(const Matrix& rho) const {
    Vector v(coords.size());
    for (size_t c = 0; c < coords.size(); ++c) v(c) = rho(coords[c].first, coords[c].second);
    return v;
}

Matrix BlockGenerator::expand(const Vector& v) const {
    Matrix rho = Matrix::Zero(n, n);
    for (size_t c = 0; c < coords.size(); ++c) rho(coords[c].first, coords[c].second) = v(c);
    return rho;
}

BlockGenerator build_block_generator(const Matrix& h_total, const JumpOperatorSet& jumps,
                                     const BlockPartition& blocks) {
    BlockGenerator gen;
    gen.n = static_cast<int>(h_total.rows());
    gen.coord_index.assign(gen.n * gen.n, -1);
    for (const auto& group : blocks.groups)
        for (int i : group)
            for (int j : group) {
                gen.coord_index[i + gen.n * j] = static_cast<int>(gen.coords.size());
                gen.coords.emplace_back(i, j);
            }
    const int m = static_cast<int>(gen.coords.size());
    gen.g = Matrix::Zero(m, m);
    auto idx = [&](int i, int j) { return gen.coord_index[i + gen.n * j]; };

    // Coherent part: within a block the bare energy is constant, so only the
    // Lamb shift survives the commutator, but assembling the full H keeps the
    // restriction exactly equal to the dense superoperator's.
    for (const auto& group : blocks.groups) {
        for (int i : group)
            for (int j : group)
                for (int k : group) {
                    gen.g(idx(i, j), idx(k, j)) -= I * h_total(i, k);
                    gen.g(idx(j, i), idx(j, k)) += I * h_total(k, i);
                }
    }

    for (const JumpOperator& op : jumps.operators) {
        if (op.rate_weight == 0.0) continue;
        const bool in = op.direction == Direction::In;
        const auto& to_grp = blocks.groups[in ? op.block_upper : op.block_lower];
        const auto& from_grp = blocks.groups[in ? op.block_lower : op.block_upper];
        const Matrix& o = op.matrix;
        for (int i : to_grp)
            for (int j : to_grp)
                for (int k : from_grp)
                    for (int l : from_grp)
                        gen.g(idx(i, j), idx(k, l)) +=
                            op.rate_weight * o(i, k) * std::conj(o(j, l));
        const Matrix oo = o.adjoint() * o;
        for (int i : from_grp)
            for (int j : from_grp)
                for (int k : from_grp) {
                    gen.g(idx(i, j), idx(k, j)) -= 0.5 * op.rate_weight * oo(i, k);
                    gen.g(idx(j, i), idx(j, k)) -= 0.5 * op.rate_weight * oo(k, i);
                }
    }
    return gen;
}

SteadyStateResult steady_state(const BlockGenerator& gen) {
    return steady_state_impl(
        gen.g, gen.n, [&gen](const Matrix& rho) { return gen.restrict_vec(rho); },
        [&gen](const Vector& v) { return gen.expand(v); });
}

double spectral_gap(const BlockGenerator& gen) {
    Eigen::ComplexEigenSolver<Matrix> es(gen.g, false);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("block-generator eigendecomposition failed");
    const Vector ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    const double tol = kNullTol * std::max(scale, 1e-300);
    double slowest = 0.0;
    for (int k = 0; k < ev.size(); ++k) {
        const double re = ev(k).real();
        if (re < -tol && (slowest == 0.0 || re > slowest)) slowest = re;
    }
    return -slowest;
}

Matrix evolve(const Matrix& rho0, const Liouvillian& liou, double t_final, double dt,
              EvolveMethod method) {
    if (method == EvolveMethod::Spectral) return Propagator(liou).apply(rho0, t_final);

    if (dt <= 0.0) throw std::invalid_argument("evolve: dt must be positive");
    const long steps = std::lround(std::ceil(t_final / dt - 1e-12));
    Vector v = vectorize(rho0);
    const Matrix& l = liou.matrix;
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
        const double h = std::min(dt, t_final - t);
        const Vector k1 = l * v;
        const Vector k2 = l * (v + 0.5 * h * k1);
        const Vector k3 = l * (v + 0.5 * h * k2);
        const Vector k4 = l * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        if ((s & 0x1f) == 0x1f || s + 1 == steps) {
            const double nm = v.norm();
            if (!std::isfinite(nm) || nm > 100.0 * liou.n)
                throw StepSizeTooLarge("state norm exploded at t = " + std::to_string(t));
            const double drift = std::abs(devectorize(v).trace() - Complex(1.0, 0.0));
            if (drift > 1e-6)
                throw StepSizeTooLarge("trace drifted by " + std::to_string(drift) +
                                       " at t = " + std::to_string(t));
        }
    }
    return devectorize(v);
}

Propagator::Propagator(const Liouvillian& liou) : n_(liou.n) {
    Eigen::ComplexEigenSolver<Matrix> es(liou.matrix);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("propagator eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    v_ = es.eigenvectors();
    v_lu_.compute(v_);
    scale_ = eigenvalues_.cwiseAbs().maxCoeff();
}

Matrix Propagator::apply(const Matrix& rho0, double t) const {
    Vector c = v_lu_.solve(vectorize(rho0));
    // Freeze only directions that are zero to eigensolver accuracy; the
    // physical slow modes of this model sit many orders above that floor.
    const double freeze = 1e-13 * std::max(scale_, 1e-300);
    for (int k = 0; k < c.size(); ++k) {
        const Complex lam = eigenvalues_(k);
        if (std::abs(lam) <= freeze) continue;  // stationary direction
        // Clamp roundoff-positive real parts so long times stay bounded.
        const Complex clamped(std::min(lam.real(), 0.0), lam.imag());
        c(k) *= std::exp(clamped * t);
    }
    return devectorize(v_ * c);
}

BlockPropagator::BlockPropagator(const BlockGenerator& gen) : gen_(gen) {
    Eigen::ComplexEigenSolver<Matrix> es(gen.g);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("block-propagator eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    v_ = es.eigenvectors();
    v_lu_.compute(v_);
    scale_ = eigenvalues_.cwiseAbs().maxCoeff();
}

Matrix BlockPropagator::apply(const Matrix& rho0, double t) const {
    Vector c = v_lu_.solve(gen_.restrict_vec(rho0));
    const double freeze = kNullTol * std::max(scale_, 1e-300);
    for (int k = 0; k < c.size(); ++k) {
        const Complex lam = eigenvalues_(k);
        if (std::abs(lam) <= freeze) continue;
        const Complex clamped(std::min(lam.real(), 0.0), lam.imag());
        c(k) *= std::exp(clamped * t);
    }
    return gen_.expand(v_ * c);
}

}  // namespace qsv
