#include "qsv/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qsv {

namespace {

constexpr double kOrthoTol = 1e-12;
constexpr double kDegeneracyTol = 1e-9;  // relative to max(1,|E|)

int dot_dim(UMode mode) { return mode == UMode::Infinite ? 3 : 4; }

// 4x4 (or 3x3) dot-space annihilation operators with the |ud> = d+_up d+_down |0>
// sign convention.
Matrix dot_only_annihilator(UMode mode, Spin s) {
    const int dd = dot_dim(mode);
    Matrix m = Matrix::Zero(dd, dd);
    if (s == Spin::Up) {
        m(0, 1) = 1.0;                  // |up> -> |0>
        if (dd == 4) m(2, 3) = 1.0;     // |ud> -> |down>
    } else {
        m(0, 2) = 1.0;                  // |down> -> |0>
        if (dd == 4) m(1, 3) = -1.0;    // |ud> -> -|up>
    }
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix lift_dot(const Matrix& dot_op) {
    return kron(dot_op, Matrix::Identity(4, 4));
}

// Pauli/2 on one of the two ancilla spins, lifted to the full space.
Matrix lift_ancilla_pauli(UMode mode, int which, char axis) {
    Matrix s2 = Matrix::Zero(2, 2);
    switch (axis) {
        case 'x': s2 << 0, 0.5, 0.5, 0; break;
        case 'y': s2 << 0, Complex(0, -0.5), Complex(0, 0.5), 0; break;
        default:  s2 << 0.5, 0, 0, -0.5; break;
    }
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix anc = which == 1 ? kron(s2, id2) : kron(id2, s2);
    return kron(Matrix::Identity(dot_dim(mode), dot_dim(mode)), anc);
}

}  // namespace

std::vector<std::string> build_product_basis(UMode mode) {
    static const char* dot_names[4] = {"0", "up", "dn", "updn"};
    static const char* anc_names[4] = {"uu", "ud", "du", "dd"};
    std::vector<std::string> labels;
    labels.reserve(dim_of(mode));
    for (int d = 0; d < dot_dim(mode); ++d)
        for (int a = 0; a < 4; ++a)
            labels.push_back(std::string(dot_names[d]) + "," + anc_names[a]);
    return labels;
}

std::pair<Matrix, Matrix> dot_operators(UMode mode) {
    return {lift_dot(dot_only_annihilator(mode, Spin::Up)),
            lift_dot(dot_only_annihilator(mode, Spin::Down))};
}

std::pair<Matrix, Matrix> rotate_to_contact_basis(const Matrix& d_up, const Matrix& d_down,
                                                  double theta, double phi) {
    const Complex c = std::cos(theta / 2.0) * std::exp(I * (phi / 2.0));
    const Complex s = std::sin(theta / 2.0) * std::exp(-I * (phi / 2.0));
    return {c * d_up + s * d_down, -std::conj(s) * d_up + std::conj(c) * d_down};
}

SpinOps dot_spin_operators(UMode mode) {
    auto [du, dd] = dot_operators(mode);
    const Matrix nu = du.adjoint() * du;
    const Matrix nd = dd.adjoint() * dd;
    SpinOps s;
    s.z = 0.5 * (nu - nd);
    s.x = 0.5 * (du.adjoint() * dd + dd.adjoint() * du);
    s.y = 0.5 * I * (dd.adjoint() * du - du.adjoint() * dd);
    return s;
}

SpinOps ancilla_spin_operators(UMode mode, int which) {
    return {lift_ancilla_pauli(mode, which, 'x'), lift_ancilla_pauli(mode, which, 'y'),
            lift_ancilla_pauli(mode, which, 'z')};
}

Matrix number_operator(UMode mode) {
    const int dd = dot_dim(mode);
    Matrix n = Matrix::Zero(dd, dd);
    n(1, 1) = 1.0;
    n(2, 2) = 1.0;
    if (dd == 4) n(3, 3) = 2.0;
    return lift_dot(n);
}

Matrix total_sz_operator(UMode mode) {
    return dot_spin_operators(mode).z + ancilla_spin_operators(mode, 1).z +
           ancilla_spin_operators(mode, 2).z;
}

Matrix ancilla_swap_operator(UMode mode) {
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = 1.0;
    swap(1, 2) = 1.0;
    swap(2, 1) = 1.0;
    swap(3, 3) = 1.0;
    return kron(Matrix::Identity(dot_dim(mode), dot_dim(mode)), swap);
}

Matrix build_hamiltonian(const DeviceParams& p) {
    const UMode mode = u_mode_of(p);
    const int n = dim_of(mode);
    Matrix h = Matrix::Zero(n, n);

    h += p.epsilon * number_operator(mode);
    if (!p.infinite_u()) {
        auto [du, dd] = dot_operators(mode);
        h += *p.u_charging * (du.adjoint() * du * dd.adjoint() * dd);
    }

    // Exchange with the internal factor of two (see header note).
    const SpinOps sd = dot_spin_operators(mode);
    const SpinOps s1 = ancilla_spin_operators(mode, 1);
    const SpinOps s2 = ancilla_spin_operators(mode, 2);
    const double g = 2.0 * p.j_exchange;
    h += g * (sd.x * (s1.x + s2.x) + sd.y * (s1.y + s2.y) + sd.z * (s1.z + s2.z));
    return h;
}

int BlockPartition::block_of(int state_index) const {
    for (size_t g = 0; g < groups.size(); ++g)
        for (int k : groups[g])
            if (k == state_index) return static_cast<int>(g);
    return -1;
}

Matrix EigenBasis::transform() const {
    const int n = dim();
    Matrix q(n, n);
    for (int k = 0; k < n; ++k) q.col(k) = states[k].amplitudes;
    return q;
}

int EigenBasis::index_of(const std::string& label) const {
    for (int k = 0; k < dim(); ++k)
        if (states[k].label == label) return k;
    throw std::out_of_range("no eigenstate labeled " + label);
}

std::vector<EigenState> reference_eigenstates(const DeviceParams& p) {
    const UMode mode = u_mode_of(p);
    const int n = dim_of(mode);
    const double eps = p.epsilon;
    const double j = p.j_exchange;
    const double r13 = std::sqrt(1.0 / 3.0);
    const double r23 = std::sqrt(2.0 / 3.0);
    const double r12 = std::sqrt(0.5);

    auto basis_vec = [n](std::initializer_list<std::pair<int, double>> terms) {
        Vector v = Vector::Zero(n);
        for (auto& [idx, amp] : terms) v(idx) = amp;
        return v;
    };
    // product index = 4*D + A; D: 0 empty, 1 up, 2 down, 3 double; A: uu,ud,du,dd
    std::vector<EigenState> st;
    st.push_back({"01", 0, 0.0, basis_vec({{0, 1.0}})});
    st.push_back({"02", 0, 0.0, basis_vec({{1, 1.0}})});
    st.push_back({"03", 0, 0.0, basis_vec({{2, 1.0}})});
    st.push_back({"04", 0, 0.0, basis_vec({{3, 1.0}})});
    // |a> = |sigma> x |psi->
    st.push_back({"a1", 1, eps, basis_vec({{9, r12}, {10, -r12}})});
    st.push_back({"a2", 1, eps, basis_vec({{5, r12}, {6, -r12}})});
    // |b1> = sqrt(1/3)|up>|psi+> - sqrt(2/3)|down>|uu>, |b2> mirrored
    st.push_back({"b1", 1, eps - 2 * j, basis_vec({{5, r13 * r12}, {6, r13 * r12}, {8, -r23}})});
    st.push_back({"b2", 1, eps - 2 * j, basis_vec({{9, r13 * r12}, {10, r13 * r12}, {7, -r23}})});
    // spin-3/2 quadruplet
    st.push_back({"c1", 1, eps + j, basis_vec({{11, 1.0}})});
    st.push_back({"c2", 1, eps + j, basis_vec({{4, 1.0}})});
    st.push_back({"c3", 1, eps + j, basis_vec({{5, r23 * r12}, {6, r23 * r12}, {8, r13}})});
    st.push_back({"c4", 1, eps + j, basis_vec({{9, r23 * r12}, {10, r23 * r12}, {7, r13}})});
    if (mode == UMode::Finite) {
        const double e2 = 2 * eps + *p.u_charging;
        st.push_back({"21", 2, e2, basis_vec({{12, 1.0}})});
        st.push_back({"22", 2, e2, basis_vec({{13, 1.0}})});
        st.push_back({"23", 2, e2, basis_vec({{14, 1.0}})});
        st.push_back({"24", 2, e2, basis_vec({{15, 1.0}})});
    }
    return st;
}

EigenBasis diagonalize_system(const Matrix& h) {
    const int n = static_cast<int>(h.rows());
    if (n != 12 && n != 16) throw std::invalid_argument("unexpected Hamiltonian dimension");
    const UMode mode = n == 12 ? UMode::Infinite : UMode::Finite;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("Hermitian eigensolver failed");

    const Matrix nop = number_operator(mode);
    const RealVector evals = solver.eigenvalues();
    const Matrix evecs = solver.eigenvectors();

    // Group eigenvectors by (electron number, energy).
    struct Group {
        int n_el;
        double energy;
        std::vector<int> cols;
    };
    std::vector<Group> groups;
    for (int k = 0; k < n; ++k) {
        const Vector v = evecs.col(k);
        const double nval = std::real(v.dot(nop * v));
        const int n_el = static_cast<int>(std::lround(nval));
        if (std::abs(nval - n_el) > 1e-8)
            throw DegeneracyResolutionFailure("eigenvector without sharp electron number");
        const double e = evals(k);
        bool placed = false;
        for (auto& g : groups) {
            if (g.n_el == n_el &&
                std::abs(g.energy - e) < kDegeneracyTol * std::max(1.0, std::abs(g.energy))) {
                g.cols.push_back(k);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({n_el, e, {k}});
    }

    std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
        return a.n_el != b.n_el ? a.n_el < b.n_el : a.energy < b.energy;
    });

    std::vector<int> dims;
    for (const auto& g : groups) dims.push_back(static_cast<int>(g.cols.size()));
    // Sorted group order within N = 1 is {b, a, c} by energy, so the dims are
    // {4, 2, 2, 4 [,4]} either way.
    const std::vector<int> expected = mode == UMode::Infinite ? std::vector<int>{4, 2, 2, 4}
                                                              : std::vector<int>{4, 2, 2, 4, 4};
    if (dims != expected) {
        std::string msg = "manifold dimensions {";
        for (int d : dims) msg += std::to_string(d) + ",";
        msg += "} differ from the canonical {4,2,2,4" +
               std::string(mode == UMode::Finite ? ",4}" : "}");
        throw DegeneracyResolutionFailure(msg);
    }

    // Gauge fixing: the degenerate manifolds are resolved by replacing the
    // solver's arbitrary block bases with the canonical S^2/S_z eigenstates,
    // after checking that those span the same subspaces.
    DeviceParams ref;
    ref.epsilon = 1.0;  // placeholder, overwritten below
    // Recover (eps, J, U) from the grouped energies rather than trusting a caller.
    //   one-electron groups sorted by energy: {eps-2J, eps, eps+J}
    const double e_b = groups[1].energy, e_a = groups[2].energy, e_c = groups[3].energy;
    ref.j_exchange = (e_c - e_b) / 3.0;
    ref.epsilon = e_a;
    if (std::abs((e_a - e_b) - 2.0 * ref.j_exchange) > 1e-6 * std::max(1.0, std::abs(e_a)))
        throw DegeneracyResolutionFailure("one-electron splittings are not {E, E-2J, E+J}");
    if (mode == UMode::Finite)
        ref.u_charging = groups[4].energy - 2.0 * ref.epsilon;
    else
        ref.u_charging.reset();

    // The sorted group order is {0-manifold, b, a, c [,2]}; canonical label
    // order wants {0, a, b, c [,2]}.
    std::vector<EigenState> canonical = reference_eigenstates(ref);
    EigenBasis basis;
    basis.mode = mode;
    basis.states = canonical;

    const std::vector<std::vector<int>> canonical_groups =
        mode == UMode::Infinite
            ? std::vector<std::vector<int>>{{0, 1, 2, 3}, {4, 5}, {6, 7}, {8, 9, 10, 11}}
            : std::vector<std::vector<int>>{
                  {0, 1, 2, 3}, {4, 5}, {6, 7}, {8, 9, 10, 11}, {12, 13, 14, 15}};
    const std::vector<int> group_for_canonical =
        mode == UMode::Infinite ? std::vector<int>{0, 2, 1, 3} : std::vector<int>{0, 2, 1, 3, 4};

    for (size_t cg = 0; cg < canonical_groups.size(); ++cg) {
        const Group& g = groups[group_for_canonical[cg]];
        // Projector onto the solver's degenerate subspace.
        Matrix proj = Matrix::Zero(n, n);
        for (int col : g.cols) proj += evecs.col(col) * evecs.col(col).adjoint();
        for (int idx : canonical_groups[cg]) {
            const Vector& t = basis.states[idx].amplitudes;
            if ((proj * t - t).norm() > 1e-8)
                throw DegeneracyResolutionFailure("canonical state " + basis.states[idx].label +
                                                  " not contained in its degenerate manifold");
            basis.states[idx].energy = g.energy;
        }
    }

    basis.blocks.groups = canonical_groups;

    // Orthonormality guard on the final gauge.
    const Matrix q = basis.transform();
    if ((q.adjoint() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kOrthoTol)
        throw DegeneracyResolutionFailure("canonical eigenbasis lost orthonormality");
    return basis;
}

}  // namespace qsv
