#include "qsv/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace qsv {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + where + it.key() + "'");
}

double num(const json& obj, const std::string& where, const std::string& key,
           std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + where + key + "'");
    }
    if (!obj[key].is_number())
        throw ConfigError("'" + where + key + "' must be a number");
    return obj[key].get<double>();
}

// Energy-like entries scale with the configured unit system.
double energy(const json& obj, const std::string& where, const std::string& key,
              double to_kt, std::optional<double> fallback = {}) {
    return num(obj, where, key, fallback) * (obj.contains(key) ? to_kt : 1.0);
}

ContactSpec parse_contact(const json& j, const std::string& where, Contact expected,
                          double to_kt) {
    reject_unknown(j, where,
                   {"label", "mu", "temperature", "gamma_up", "gamma_down", "theta", "phi"});
    ContactSpec c;
    if (!j.contains("label") || !j["label"].is_string())
        throw ConfigError("missing or non-string '" + where + "label'");
    const std::string label = j["label"].get<std::string>();
    if (label != "L" && label != "R")
        throw ConfigError("'" + where + "label' must be \"L\" or \"R\"");
    c.label = label == "L" ? Contact::L : Contact::R;
    if (c.label != expected)
        throw ConfigError("device.contacts must list L first, then R");
    c.mu = energy(j, where, "mu", to_kt, 0.0);
    c.temperature_k = num(j, where, "temperature");
    if (!(c.temperature_k > 0.0))
        throw ConfigError("'" + where + "temperature' must be > 0");
    c.gamma_up = energy(j, where, "gamma_up", to_kt, 0.0);
    c.gamma_down = energy(j, where, "gamma_down", to_kt, 0.0);
    c.theta = num(j, where, "theta", 0.0);
    c.phi = num(j, where, "phi", 0.0);
    return c;
}

Axis parse_axis(const json& j, const std::string& where) {
    reject_unknown(j, where, {"parameter", "start", "stop", "points"});
    Axis a;
    if (!j.contains("parameter") || !j["parameter"].is_string())
        throw ConfigError("missing or non-string '" + where + "parameter'");
    const std::string p = j["parameter"].get<std::string>();
    if (p == "V_app")
        a.parameter = SweepParameter::Voltage;
    else if (p == "delta_T")
        a.parameter = SweepParameter::DeltaT;
    else if (p == "epsilon")
        a.parameter = SweepParameter::Epsilon;
    else if (p == "J")
        a.parameter = SweepParameter::Exchange;
    else
        throw ConfigError("'" + where + "parameter' must be one of V_app|delta_T|epsilon|J");
    a.start = num(j, where, "start");
    a.stop = num(j, where, "stop");
    const double pts = num(j, where, "points");
    a.points = static_cast<int>(pts);
    if (a.points != pts || a.points < 2)
        throw ConfigError("'" + where + "points' must be an integer >= 2");
    if (!(a.start < a.stop)) throw ConfigError("'" + where + "start' must be below stop");
    return a;
}

RunConfig parse_json(const json& root) {
    reject_unknown(root, "",
                   {"units", "device", "spectrum", "steady", "sweep", "evolve", "postselect",
                    "table1"});

    if (!root.contains("device") || !root["device"].is_object())
        throw ConfigError("missing 'device' object");
    const json& dev = root["device"];
    reject_unknown(dev, "device.",
                   {"epsilon", "u_charging", "j_exchange", "bandwidth_w", "t_ref", "contacts"});

    RunConfig cfg;
    cfg.device.t_ref_k = num(dev, "device.", "t_ref", 10.0);
    if (!(cfg.device.t_ref_k > 0.0)) throw ConfigError("'device.t_ref' must be > 0");

    // Energies come in kT_ref by default, or in micro-eV when declared.
    double to_kt = 1.0;
    if (root.contains("units")) {
        const json& u = root["units"];
        reject_unknown(u, "units.", {"energy"});
        if (!u.contains("energy") || !u["energy"].is_string())
            throw ConfigError("'units.energy' must be \"kT_ref\" or \"ueV\"");
        const std::string s = u["energy"].get<std::string>();
        if (s == "ueV")
            to_kt = uev_to_kt(1.0, cfg.device.t_ref_k);
        else if (s != "kT_ref")
            throw ConfigError("'units.energy' must be \"kT_ref\" or \"ueV\"");
    }

    cfg.device.epsilon = energy(dev, "device.", "epsilon", to_kt);
    cfg.device.j_exchange = energy(dev, "device.", "j_exchange", to_kt);
    cfg.device.bandwidth_w = energy(dev, "device.", "bandwidth_w", to_kt, 1e4);
    if (dev.contains("u_charging")) {
        const json& u = dev["u_charging"];
        if (u.is_string()) {
            if (u.get<std::string>() != "inf")
                throw ConfigError("'device.u_charging' string form must be \"inf\"");
            cfg.device.u_charging.reset();
        } else if (u.is_number()) {
            cfg.device.u_charging = u.get<double>() * to_kt;
        } else {
            throw ConfigError("'device.u_charging' must be a number or \"inf\"");
        }
    }  // omitted -> infinite

    if (!dev.contains("contacts") || !dev["contacts"].is_array() ||
        dev["contacts"].size() != 2)
        throw ConfigError("'device.contacts' must be an array of exactly two entries");
    cfg.device.contacts[0] =
        parse_contact(dev["contacts"][0], "device.contacts[0].", Contact::L, to_kt);
    cfg.device.contacts[1] =
        parse_contact(dev["contacts"][1], "device.contacts[1].", Contact::R, to_kt);
    cfg.device.validate();

    if (root.contains("steady")) {
        reject_unknown(root["steady"], "steady.", {"v_app"});
        if (root["steady"].contains("v_app"))
            cfg.steady_v_app = num(root["steady"], "steady.", "v_app");
    }
    if (root.contains("postselect")) {
        reject_unknown(root["postselect"], "postselect.", {"v_app"});
        if (root["postselect"].contains("v_app"))
            cfg.postselect_v_app = num(root["postselect"], "postselect.", "v_app");
    }
    if (root.contains("spectrum")) reject_unknown(root["spectrum"], "spectrum.", {});
    if (root.contains("table1")) reject_unknown(root["table1"], "table1.", {});

    if (root.contains("sweep")) {
        reject_unknown(root["sweep"], "sweep.", {"axes"});
        if (!root["sweep"].contains("axes") || !root["sweep"]["axes"].is_array() ||
            root["sweep"]["axes"].empty() || root["sweep"]["axes"].size() > 2)
            throw ConfigError("'sweep.axes' must hold 1 or 2 axis objects");
        size_t k = 0;
        for (const json& a : root["sweep"]["axes"])
            cfg.sweep_axes.push_back(
                parse_axis(a, "sweep.axes[" + std::to_string(k++) + "]."));
    }

    if (root.contains("evolve")) {
        const json& ev = root["evolve"];
        reject_unknown(ev, "evolve.",
                       {"dot", "ancilla1", "ancilla2", "t_final", "dt", "method", "samples"});
        EvolveConfig e;
        auto token = [&](const char* key, const std::string& dflt,
                         const std::set<std::string>& ok) {
            if (!ev.contains(key)) return dflt;
            if (!ev[key].is_string())
                throw ConfigError(std::string("'evolve.") + key + "' must be a string");
            const std::string v = ev[key].get<std::string>();
            if (!ok.count(v))
                throw ConfigError(std::string("invalid value for 'evolve.") + key + "'");
            return v;
        };
        e.dot = token("dot", "empty", {"empty", "up", "down", "double", "mixed"});
        e.ancilla1 = token("ancilla1", "up", {"up", "down", "mixed"});
        e.ancilla2 = token("ancilla2", "up", {"up", "down", "mixed"});
        e.method = token("method", "auto", {"auto", "rk4", "spectral"});
        e.t_final = num(ev, "evolve.", "t_final");
        if (!(e.t_final > 0.0)) throw ConfigError("'evolve.t_final' must be > 0");
        e.dt = num(ev, "evolve.", "dt", 0.0);
        e.samples = static_cast<int>(num(ev, "evolve.", "samples", 200.0));
        if (e.samples < 2) throw ConfigError("'evolve.samples' must be >= 2");
        cfg.evolve = e;
    }
    return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    return parse_json(root);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

Matrix build_initial_state(const EvolveConfig& cfg, const EigenBasis& basis) {
    const int dd = basis.mode == UMode::Infinite ? 3 : 4;
    auto factor = [](const std::string& token, int dim, int idx_up, int idx_down) {
        Matrix m = Matrix::Zero(dim, dim);
        if (token == "mixed") {
            m(idx_up, idx_up) = 0.5;
            m(idx_down, idx_down) = 0.5;
        } else if (token == "up") {
            m(idx_up, idx_up) = 1.0;
        } else {
            m(idx_down, idx_down) = 1.0;
        }
        return m;
    };
    Matrix dot = Matrix::Zero(dd, dd);
    if (cfg.dot == "empty")
        dot(0, 0) = 1.0;
    else if (cfg.dot == "up")
        dot(1, 1) = 1.0;
    else if (cfg.dot == "down")
        dot(2, 2) = 1.0;
    else if (cfg.dot == "double") {
        if (dd < 4) throw ConfigError("'evolve.dot' = \"double\" requires finite u_charging");
        dot(3, 3) = 1.0;
    } else {
        for (int k = 0; k < dd; ++k) dot(k, k) = 1.0 / dd;
    }
    const Matrix a1 = factor(cfg.ancilla1, 2, 0, 1);
    const Matrix a2 = factor(cfg.ancilla2, 2, 0, 1);

    const int n = basis.dim();
    Matrix rho_prod = Matrix::Zero(n, n);
    for (int d1 = 0; d1 < dd; ++d1)
        for (int d2 = 0; d2 < dd; ++d2)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const Complex anc =
                        a1(a / 2, b / 2) * a2(a % 2, b % 2);
                    rho_prod(4 * d1 + a, 4 * d2 + b) = dot(d1, d2) * anc;
                }
    const Matrix q = basis.transform();
    return q.adjoint() * rho_prod * q;
}

}  // namespace qsv
