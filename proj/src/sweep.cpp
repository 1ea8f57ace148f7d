#include "qsv/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace qsv {

const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Voltage: return "V_app";
        case SweepParameter::DeltaT: return "delta_T";
        case SweepParameter::Epsilon: return "epsilon";
        default: return "J";
    }
}

const char* column_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::Voltage: return "v_over_vc";
        case SweepParameter::DeltaT: return "delta_t_K";
        case SweepParameter::Epsilon: return "epsilon_kT";
        default: return "j_kT";
    }
}

const char* to_string(Region r) {
    switch (r) {
        case Region::EmptyPolarized: return "empty_polarized";
        case Region::B1: return "b1";
        case Region::B2: return "b2";
        case Region::Mixed: return "mixed";
        default: return "other";
    }
}

double Axis::value_at(int k) const {
    return start + (stop - start) * double(k) / double(points - 1);
}

void Axis::validate() const {
    if (!(start < stop)) throw ConfigError("axis start must be below stop");
    if (points < 2) throw ConfigError("axis needs at least 2 points");
}

DeviceParams apply_axis_value(const DeviceParams& base, SweepParameter p, double value) {
    DeviceParams out = base;
    switch (p) {
        case SweepParameter::Voltage:
            // mu_L stays put; V in V_c equals mu_R in kT_ref units.
            out.contact(Contact::R).mu = out.contact(Contact::L).mu + value;
            break;
        case SweepParameter::DeltaT:
            out.contact(Contact::R).temperature_k =
                out.contact(Contact::L).temperature_k + value;
            break;
        case SweepParameter::Epsilon:
            out.epsilon = value;
            break;
        case SweepParameter::Exchange:
            out.j_exchange = value;
            break;
    }
    return out;
}

SteadyStateReport solve_point(const DeviceParams& p) {
    const auto basis = diagonalize_system(build_hamiltonian(p));
    const auto jumps = jump_operators(p, basis);
    const Matrix h_total = total_hamiltonian(p, basis);
    const BlockGenerator gen = build_block_generator(h_total, jumps, basis.blocks);
    const SteadyStateResult ss = steady_state(gen);
    return make_report(ss.rho, basis, jumps, spectral_gap(gen), ss.multiplicity);
}

Region region_classifier(const SteadyStateReport& report) {
    auto occ = [&](const std::string& label) {
        auto it = report.occupations.find(label);
        return it == report.occupations.end() ? 0.0 : it->second;
    };
    const double b1 = occ("b1"), b2 = occ("b2");
    const double empty = occ("01") + occ("02") + occ("03") + occ("04");
    if (b1 >= 0.9) return Region::B1;
    if (b2 >= 0.9) return Region::B2;
    if (b1 + b2 > 0.9) return Region::Mixed;
    if (empty > 0.9) return Region::EmptyPolarized;
    return Region::Other;
}

namespace {

PointSummary summarize(const SteadyStateReport& rep, double gamma_ref) {
    PointSummary s;
    s.concurrence = rep.concurrence;
    const double g = gamma_ref > 0.0 ? gamma_ref : 1.0;
    s.current_l = rep.current_l / g;
    s.current_r = rep.current_r / g;
    std::vector<std::pair<std::string, double>> occ(rep.occupations.begin(),
                                                    rep.occupations.end());
    std::sort(occ.begin(), occ.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    s.p_top1 = occ[0].second;
    s.label_top1 = occ[0].first;
    s.p_top2 = occ[1].second;
    s.label_top2 = occ[1].first;
    s.sz = rep.sz_total;
    s.gap = rep.spectral_gap;
    s.multiplicity = rep.multiplicity;
    s.region = region_classifier(rep);
    return s;
}

PointSummary nan_summary(const std::string& error) {
    PointSummary s;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.concurrence = s.current_l = s.current_r = s.p_top1 = s.p_top2 = s.sz = s.gap = nan;
    s.multiplicity = 0;
    s.label_top1 = s.label_top2 = "nan";
    s.error = error;
    return s;
}

}  // namespace

SweepGrid sweep(const DeviceParams& base, const std::vector<Axis>& axes, unsigned threads) {
    if (axes.empty() || axes.size() > 2) throw ConfigError("sweep takes 1 or 2 axes");
    for (const Axis& a : axes) a.validate();

    SweepGrid grid;
    grid.axes = axes;
    grid.base = base;
    const int n0 = axes[0].points;
    const int n1 = axes.size() == 2 ? axes[1].points : 1;
    grid.results.resize(static_cast<size_t>(n0) * n1);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    const int total = n0 * n1;

    auto worker = [&]() {
        for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
            const int i0 = k / n1;
            const int i1 = k % n1;
            const double x1 = axes[0].value_at(i0);
            PointSummary s;
            try {
                DeviceParams p = apply_axis_value(base, axes[0].parameter, x1);
                if (axes.size() == 2)
                    p = apply_axis_value(p, axes[1].parameter, axes[1].value_at(i1));
                const SteadyStateReport rep = solve_point(p);
                s = summarize(rep, p.gamma_ref());
            } catch (const std::exception& e) {
                s = nan_summary(e.what());
            }
            s.x1 = x1;
            if (axes.size() == 2) s.x2 = axes[1].value_at(i1);
            grid.results[k] = std::move(s);
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return grid;
}

double locate_boundary(const DeviceParams& base, double v_lo, double v_hi,
                       double resolution) {
    auto region_at = [&](double v) {
        return region_classifier(
            solve_point(apply_axis_value(base, SweepParameter::Voltage, v)));
    };
    Region lo = region_at(v_lo);
    Region hi = region_at(v_hi);
    if (lo == hi) throw std::invalid_argument("locate_boundary: same label at both ends");
    while (v_hi - v_lo > resolution) {
        const double mid = 0.5 * (v_lo + v_hi);
        if (region_at(mid) == lo)
            v_lo = mid;
        else
            v_hi = mid;
    }
    return 0.5 * (v_lo + v_hi);
}

}  // namespace qsv
