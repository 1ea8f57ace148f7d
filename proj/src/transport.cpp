#include "qsv/transport.hpp"

#include <algorithm>
#include <cmath>

namespace qsv {

namespace {

constexpr double kDarkTol = 1e-12;

// Rotated annihilation operator for one contact channel, in the eigenbasis.
Matrix channel_operator(const EigenBasis& basis, const ContactSpec& c, Spin s) {
    auto [du, dd] = dot_operators(basis.mode);
    auto [ru, rd] = rotate_to_contact_basis(du, dd, c.theta, c.phi);
    const Matrix q = basis.transform();
    return q.adjoint() * (s == Spin::Up ? ru : rd) * q;
}

}  // namespace

double fermi(double e, double mu, double t) {
    const double x = (e - mu) / t;
    if (x >= 0.0) {
        const double ex = std::exp(-x);
        return ex / (1.0 + ex);
    }
    return 1.0 / (1.0 + std::exp(x));
}

TransitionTable transition_table(const EigenBasis& basis,
                                 const std::array<ContactSpec, 2>& contacts) {
    TransitionTable table;
    const int n = basis.dim();
    for (const ContactSpec& c : contacts) {
        for (Spin s : {Spin::Up, Spin::Down}) {
            const Matrix dtil = channel_operator(basis, c, s);
            const Matrix add = dtil.adjoint();  // <to| d~+ |from>
            for (int from = 0; from < n; ++from) {
                for (int to = 0; to < n; ++to) {
                    if (basis.states[to].n_electrons != basis.states[from].n_electrons + 1)
                        continue;
                    const Complex amp = add(to, from);
                    if (std::abs(amp) <= kDarkTol) {
                        ++table.dark_count;
                        continue;
                    }
                    table.transitions.push_back({from, to,
                                                 basis.states[to].energy -
                                                     basis.states[from].energy,
                                                 c.label, s, amp});
                }
            }
        }
    }
    return table;
}

JumpOperatorSet jump_operators(const DeviceParams& p, const EigenBasis& basis) {
    JumpOperatorSet set;
    set.gamma_ref = p.gamma_ref();
    const int nblocks = static_cast<int>(basis.blocks.groups.size());

    for (const ContactSpec& c : p.contacts) {
        const double t = p.t_internal(c);
        for (Spin s : {Spin::Up, Spin::Down}) {
            const Matrix dtil = channel_operator(basis, c, s);
            const Matrix add = dtil.adjoint();
            for (int lo = 0; lo < nblocks; ++lo) {
                for (int hi = 0; hi < nblocks; ++hi) {
                    if (basis.block_electrons(hi) != basis.block_electrons(lo) + 1) continue;
                    // Addition operator restricted to this ordered manifold pair.
                    Matrix a = Matrix::Zero(basis.dim(), basis.dim());
                    for (int i : basis.blocks.groups[hi])
                        for (int j : basis.blocks.groups[lo]) a(i, j) = add(i, j);
                    if (a.cwiseAbs().maxCoeff() <= kDarkTol) {
                        ++set.dark_count;
                        continue;
                    }
                    const double de = basis.block_energy(hi) - basis.block_energy(lo);
                    const double f = fermi(de, c.mu, t);
                    set.operators.push_back({a, c.gamma(s) * f, c.label, s, Direction::In, de,
                                             lo, hi});
                    set.operators.push_back({a.adjoint(), c.gamma(s) * (1.0 - f), c.label, s,
                                             Direction::Out, de, lo, hi});
                }
            }
        }
    }
    return set;
}

double re_digamma_half_plus_iy(double y) {
    // psi(z) for z = 1/2 + i y via the shift recurrence and the asymptotic
    // series; only the real part is needed (it is even in y).
    Complex z(0.5, std::abs(y));
    Complex acc(0.0, 0.0);
    while (std::abs(z) < 12.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    static const double bern[] = {1.0 / 6.0,   -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                  5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};
    const Complex inv2 = 1.0 / (z * z);
    Complex term = inv2;
    Complex series(0.0, 0.0);
    for (int k = 0; k < 7; ++k) {
        series += bern[k] / (2.0 * (k + 1)) * term;
        term *= inv2;
    }
    const Complex psi = acc + std::log(z) - 0.5 / z - series;
    return psi.real();
}

double pv_integral(double delta, const ContactSpec& c, double w, double t_ref_k) {
    if (std::abs(delta) >= w)
        throw CutoffTooSmall("pv_integral: |delta| >= bandwidth");
    if (std::abs(delta - c.mu) > 0.5 * w)
        throw CutoffTooSmall("pv_integral: |delta - mu| exceeds half the bandwidth");
    const double t = c.temperature_k / t_ref_k;
    if (w < 20.0 * t)
        throw CutoffTooSmall("pv_integral: bandwidth below 20 kT invalidates the flat-band form");
    const double y = (delta - c.mu) / (2.0 * M_PI * t);
    return 2.0 * re_digamma_half_plus_iy(y) + 2.0 * std::log(2.0 * M_PI * t) -
           std::log(w - delta) - std::log(w + delta);
}

Matrix lamb_shift(const DeviceParams& p, const EigenBasis& basis) {
    const int n = basis.dim();
    const int nblocks = static_cast<int>(basis.blocks.groups.size());
    Matrix h = Matrix::Zero(n, n);

    for (const ContactSpec& c : p.contacts) {
        for (Spin s : {Spin::Up, Spin::Down}) {
            const double g = c.gamma(s);
            if (g == 0.0) continue;
            const Matrix dtil = channel_operator(basis, c, s);
            const Matrix add = dtil.adjoint();
            for (int lo = 0; lo < nblocks; ++lo) {
                for (int hi = 0; hi < nblocks; ++hi) {
                    if (basis.block_electrons(hi) != basis.block_electrons(lo) + 1) continue;
                    Matrix a = Matrix::Zero(n, n);
                    for (int i : basis.blocks.groups[hi])
                        for (int j : basis.blocks.groups[lo]) a(i, j) = add(i, j);
                    if (a.cwiseAbs().maxCoeff() <= kDarkTol) continue;
                    const double de = basis.block_energy(hi) - basis.block_energy(lo);
                    const double kernel = pv_integral(de, c, p.bandwidth_w, p.t_ref_k);
                    // Upper-manifold term (virtual removal/re-addition) and
                    // lower-manifold term (virtual addition/removal) share the
                    // same kernel value.
                    h += (g / (4.0 * M_PI)) * kernel * (a * a.adjoint() + a.adjoint() * a);
                }
            }
        }
    }
    return h;
}

Matrix total_hamiltonian(const DeviceParams& p, const EigenBasis& basis) {
    const int n = basis.dim();
    Matrix h = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) h(k, k) = basis.states[k].energy;
    return h + lamb_shift(p, basis);
}

double DeviceParams::gamma_ref() const {
    double g = 0.0;
    for (const auto& c : contacts)
        g = std::max({g, c.gamma_up, c.gamma_down});
    return g;
}

void DeviceParams::validate() const {
    if (!(j_exchange > 0.0)) throw ConfigError("device.j_exchange must be > 0");
    if (!(bandwidth_w > 0.0)) throw ConfigError("device.bandwidth_w must be > 0");
    if (u_charging && *u_charging < 0.0) throw ConfigError("device.u_charging must be >= 0");
    if (!(t_ref_k > 0.0)) throw ConfigError("device.t_ref must be > 0");
    if (contacts[0].label != Contact::L || contacts[1].label != Contact::R)
        throw ConfigError("device.contacts must be the pair {L, R}");
    for (const auto& c : contacts) {
        const std::string who = std::string("device.contacts[") + to_string(c.label) + "]";
        if (!(c.temperature_k > 0.0)) throw ConfigError(who + ".temperature must be > 0");
        if (c.gamma_up < 0.0 || c.gamma_down < 0.0)
            throw ConfigError(who + ".gamma_up/gamma_down must be >= 0");
        if (c.gamma_up == 0.0 && c.gamma_down == 0.0)
            throw ConfigError(who + ".gamma_up and gamma_down cannot both be zero");
        if (!std::isfinite(c.theta) || !std::isfinite(c.phi))
            throw ConfigError(who + ".theta/phi must be finite");
    }
}

}  // namespace qsv
