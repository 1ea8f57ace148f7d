// Command-line front end: spectrum | steady | sweep | evolve | postselect | table1.
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qsv/csv.hpp"

namespace fs = std::filesystem;
using namespace qsv;

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);  // LF line endings everywhere
    if (!os) throw std::runtime_error("cannot open output file " + (dir / name).string());
    return os;
}

struct Solved {
    EigenBasis basis;
    JumpOperatorSet jumps;
    Matrix h_total;
    BlockGenerator gen;
    SteadyStateResult ss;
};

Solved solve(const DeviceParams& p) {
    Solved s;
    s.basis = diagonalize_system(build_hamiltonian(p));
    s.jumps = jump_operators(p, s.basis);
    s.h_total = total_hamiltonian(p, s.basis);
    s.gen = build_block_generator(s.h_total, s.jumps, s.basis.blocks);
    s.ss = steady_state(s.gen);
    return s;
}

DeviceParams with_v_app(DeviceParams p, const std::optional<double>& v) {
    if (v) p = apply_axis_value(p, SweepParameter::Voltage, *v);
    return p;
}

int run_spectrum(const RunConfig& cfg, const fs::path& out) {
    const DeviceParams& p = cfg.device;
    const auto basis = std::make_shared<EigenBasis>(diagonalize_system(build_hamiltonian(p)));
    const auto jumps = jump_operators(p, *basis);
    const Liouvillian liou =
        build_liouvillian(total_hamiltonian(p, *basis), jumps, basis, p);
    const SpectrumReport rep = spectrum(liou);
    auto os = open_out(out, "spectrum.csv");
    write_spectrum_csv(os, p, rep);
    return 0;
}

int run_steady(const RunConfig& cfg, const fs::path& out) {
    const DeviceParams p = with_v_app(cfg.device, cfg.steady_v_app);
    const Solved s = solve(p);
    const SteadyStateReport rep =
        make_report(s.ss.rho, s.basis, s.jumps, spectral_gap(s.gen), s.ss.multiplicity);
    auto os = open_out(out, "steady.txt");
    write_steady_text(os, p, rep);
    auto os2 = open_out(out, "rho_ss.csv");
    write_rho_csv(os2, p, rep.rho_ss, s.basis);
    return 0;
}

int run_sweep(const RunConfig& cfg, const fs::path& out) {
    if (cfg.sweep_axes.empty())
        throw ConfigError("the sweep command needs a 'sweep.axes' block");
    std::cerr << "sweeping " << cfg.sweep_axes[0].points *
                                    (cfg.sweep_axes.size() == 2 ? cfg.sweep_axes[1].points : 1)
              << " grid points\n";
    const SweepGrid grid = sweep(cfg.device, cfg.sweep_axes);
    auto os = open_out(out, "sweep.csv");
    write_sweep_csv(os, grid);
    size_t failures = 0;
    for (const auto& r : grid.results)
        if (!r.error.empty()) ++failures;
    if (failures) std::cerr << failures << " grid points failed\n";
    return 0;
}

int run_evolve(const RunConfig& cfg, const fs::path& out) {
    if (!cfg.evolve) throw ConfigError("the evolve command needs an 'evolve' block");
    const EvolveConfig& e = *cfg.evolve;
    const DeviceParams& p = cfg.device;
    const auto basis = std::make_shared<EigenBasis>(diagonalize_system(build_hamiltonian(p)));
    const auto jumps = jump_operators(p, *basis);
    const Liouvillian liou =
        build_liouvillian(total_hamiltonian(p, *basis), jumps, basis, p);
    const Matrix rho0 = build_initial_state(e, *basis);

    const double lnorm = liou.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    const bool use_rk4 =
        e.method == "rk4" || (e.method == "auto" && e.t_final * lnorm < 2e5);
    std::unique_ptr<Propagator> prop;
    if (!use_rk4) prop = std::make_unique<Propagator>(liou);
    const double dt = e.dt > 0.0 ? e.dt : 0.05 / lnorm;

    auto os = open_out(out, "evolve.csv");
    write_param_snapshot(os, p);
    os << "t";
    for (const auto& st : basis->states) os << ",p_" << st.label;
    os << ",concurrence\n";
    Matrix rho = rho0;
    double t_prev = 0.0;
    for (int k = 0; k < e.samples; ++k) {
        const double t = e.t_final * double(k) / double(e.samples - 1);
        if (k > 0) {
            if (use_rk4)
                rho = evolve(rho, liou, t - t_prev, dt);
            else
                rho = prop->apply(rho0, t);
        }
        t_prev = t;
        os << format_double(t);
        for (int i = 0; i < basis->dim(); ++i)
            os << "," << format_double(std::real(rho(i, i)));
        os << "," << format_double(concurrence(reduced_ancilla_state(rho, *basis))) << "\n";
    }
    return 0;
}

int run_postselect(const RunConfig& cfg, const fs::path& out) {
    const DeviceParams p = with_v_app(cfg.device, cfg.postselect_v_app);
    const Solved s = solve(p);
    const SteadyStateReport rep =
        make_report(s.ss.rho, s.basis, s.jumps, spectral_gap(s.gen), s.ss.multiplicity);
    auto os = open_out(out, "postselect.csv");
    write_postselect_csv(os, p, rep);
    return 0;
}

int run_table1(const RunConfig& cfg, const fs::path& out) {
    auto os = open_out(out, "table1.csv");
    write_table1_csv(os, cfg.device);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-dot spin-valve entanglement simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    for (const char* name :
         {"spectrum", "steady", "sweep", "evolve", "postselect", "table1"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        cfg = parse_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd == "spectrum") return run_spectrum(cfg, out_dir);
        if (cmd == "steady") return run_steady(cfg, out_dir);
        if (cmd == "sweep") return run_sweep(cfg, out_dir);
        if (cmd == "evolve") return run_evolve(cfg, out_dir);
        if (cmd == "postselect") return run_postselect(cfg, out_dir);
        if (cmd == "table1") return run_table1(cfg, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
