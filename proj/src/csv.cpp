#include "qsv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace qsv {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

void write_param_snapshot(std::ostream& os, const DeviceParams& p) {
    os << "# epsilon_kT = " << format_double(p.epsilon) << "\n";
    os << "# u_charging_kT = "
       << (p.infinite_u() ? std::string("inf") : format_double(*p.u_charging)) << "\n";
    os << "# j_exchange_kT = " << format_double(p.j_exchange) << "\n";
    os << "# bandwidth_w_kT = " << format_double(p.bandwidth_w) << "\n";
    os << "# t_ref_K = " << format_double(p.t_ref_k) << "\n";
    for (const auto& c : p.contacts) {
        os << "# contact_" << to_string(c.label) << ": mu_kT = " << format_double(c.mu)
           << ", temperature_K = " << format_double(c.temperature_k)
           << ", gamma_up_kT = " << format_double(c.gamma_up)
           << ", gamma_down_kT = " << format_double(c.gamma_down)
           << ", theta = " << format_double(c.theta) << ", phi = " << format_double(c.phi)
           << "\n";
    }
}

void write_spectrum_csv(std::ostream& os, const DeviceParams& p, const SpectrumReport& rep) {
    write_param_snapshot(os, p);
    os << "index,re_lambda,im_lambda\n";
    for (int k = 0; k < rep.eigenvalues.size(); ++k)
        os << k << "," << format_double(rep.eigenvalues(k).real()) << ","
           << format_double(rep.eigenvalues(k).imag()) << "\n";
}

void write_steady_text(std::ostream& os, const DeviceParams& p,
                       const SteadyStateReport& rep) {
    write_param_snapshot(os, p);
    os << "concurrence = " << format_double(rep.concurrence) << "\n";
    os << "current_L_e_gamma = " << format_double(rep.current_l_gamma) << "\n";
    os << "current_R_e_gamma = " << format_double(rep.current_r_gamma) << "\n";
    os << "current_L_e_kT = " << format_double(rep.current_l) << "\n";
    os << "current_R_e_kT = " << format_double(rep.current_r) << "\n";
    os << "sz_total = " << format_double(rep.sz_total) << "\n";
    os << "spectral_gap = " << format_double(rep.spectral_gap) << "\n";
    os << "multiplicity = " << rep.multiplicity << "\n";
    os << "postselect_p_up = " << format_double(rep.p_up) << "\n";
    os << "postselect_p_down = " << format_double(rep.p_down) << "\n";
    os << "postselect_p_empty = " << format_double(rep.p_empty) << "\n";
    os << "postselect_p_double = " << format_double(rep.p_double) << "\n";
    os << "postselect_fidelity_to_bell = " << format_double(rep.conditional_fidelity_to_bell)
       << "\n";
    for (const auto& [label, prob] : rep.occupations)
        os << "occupation_" << label << " = " << format_double(prob) << "\n";
}

void write_rho_csv(std::ostream& os, const DeviceParams& p, const Matrix& rho,
                   const EigenBasis& basis) {
    write_param_snapshot(os, p);
    os << "row_label,col_label,re,im\n";
    for (int i = 0; i < rho.rows(); ++i)
        for (int j = 0; j < rho.cols(); ++j)
            os << basis.states[i].label << "," << basis.states[j].label << ","
               << format_double(rho(i, j).real()) << "," << format_double(rho(i, j).imag())
               << "\n";
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
    write_param_snapshot(os, grid.base);
    for (const Axis& a : grid.axes)
        os << "# axis: " << to_string(a.parameter) << " from " << format_double(a.start)
           << " to " << format_double(a.stop) << " points " << a.points << "\n";
    os << column_name(grid.axes[0].parameter);
    if (grid.axes.size() == 2) os << "," << column_name(grid.axes[1].parameter);
    os << ",concurrence,current_L,current_R,p_top1,label_top1,p_top2,label_top2,sz,gap,"
          "multiplicity\n";
    for (const PointSummary& s : grid.results) {
        os << format_double(s.x1);
        if (s.x2) os << "," << format_double(*s.x2);
        os << "," << format_double(s.concurrence) << "," << format_double(s.current_l) << ","
           << format_double(s.current_r) << "," << format_double(s.p_top1) << ","
           << s.label_top1 << "," << format_double(s.p_top2) << "," << s.label_top2 << ","
           << format_double(s.sz) << "," << format_double(s.gap) << "," << s.multiplicity
           << "\n";
        if (!s.error.empty()) os << "# error at " << format_double(s.x1) << ": " << s.error
                                 << "\n";
    }
}

void write_table1_csv(std::ostream& os, const DeviceParams& p) {
    write_param_snapshot(os, p);
    os << "label,n_electrons,energy";
    for (int k = 0; k < 16; ++k) os << ",amp" << k << "_re,amp" << k << "_im";
    os << "\n";

    const EigenBasis basis = diagonalize_system(build_hamiltonian(p));
    auto write_state = [&](const std::string& label, int n_el, double energy,
                           const Vector& amps_12_or_16) {
        os << label << "," << n_el << ","
           << (std::isinf(energy) ? std::string("inf") : format_double(energy));
        for (int k = 0; k < 16; ++k) {
            Complex a{0.0, 0.0};
            if (k < amps_12_or_16.size()) a = amps_12_or_16(k);
            os << "," << format_double(a.real()) << "," << format_double(a.imag());
        }
        os << "\n";
    };
    for (const EigenState& st : basis.states)
        write_state(st.label, st.n_electrons, st.energy, st.amplitudes);
    if (p.infinite_u()) {
        // The four doubly-occupied rows survive as labels with the truncated
        // sector pushed to infinite energy.
        for (int a = 0; a < 4; ++a) {
            Vector v = Vector::Zero(16);
            v(12 + a) = 1.0;
            write_state("2" + std::to_string(a + 1), 2,
                        std::numeric_limits<double>::infinity(), v);
        }
    }
}

void write_postselect_csv(std::ostream& os, const DeviceParams& p,
                          const SteadyStateReport& rep) {
    write_param_snapshot(os, p);
    os << "outcome,probability,fidelity_to_bell\n";
    os << "up," << format_double(rep.p_up) << ","
       << format_double(rep.conditional_fidelity_to_bell) << "\n";
    os << "down," << format_double(rep.p_down) << ",\n";
    os << "empty," << format_double(rep.p_empty) << ",\n";
    os << "double," << format_double(rep.p_double) << ",\n";
}

}  // namespace qsv
