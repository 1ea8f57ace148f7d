// Run configuration: strict JSON schema -> DeviceParams + per-command blocks.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsv/sweep.hpp"

namespace qsv {

struct EvolveConfig {
    std::string dot = "empty";       // empty|up|down|double|mixed
    std::string ancilla1 = "up";     // up|down|mixed
    std::string ancilla2 = "up";
    double t_final = 0.0;            // hbar/kT_ref units
    double dt = 0.0;                 // 0 = choose from |L|
    std::string method = "auto";     // auto|rk4|spectral
    int samples = 200;               // trajectory rows written
};

struct RunConfig {
    DeviceParams device;
    std::optional<double> steady_v_app;      // overrides mu_R when present
    std::optional<double> postselect_v_app;
    std::vector<Axis> sweep_axes;
    std::optional<EvolveConfig> evolve;
};

// Parses and validates; throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Initial product state for the evolve command, in the eigenbasis.
Matrix build_initial_state(const EvolveConfig& cfg, const EigenBasis& basis);

}  // namespace qsv
