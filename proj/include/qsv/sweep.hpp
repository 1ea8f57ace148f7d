// Steady-state maps over 1-D and 2-D parameter grids.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsv/observables.hpp"

namespace qsv {

enum class SweepParameter { Voltage, DeltaT, Epsilon, Exchange };

const char* to_string(SweepParameter p);
const char* column_name(SweepParameter p);

struct Axis {
    SweepParameter parameter = SweepParameter::Voltage;
    double start = 0.0;  // V in V_c, delta T in kelvin, energies in kT_ref
    double stop = 0.0;
    int points = 2;

    double value_at(int k) const;
    void validate() const;
};

enum class Region { EmptyPolarized, B1, B2, Mixed, Other };
const char* to_string(Region r);

struct PointSummary {
    double x1 = 0.0;
    std::optional<double> x2{};
    double concurrence = 0.0;
    double current_l = 0.0;  // e*gamma_ref units in CSV output
    double current_r = 0.0;
    double p_top1 = 0.0;
    std::string label_top1;
    double p_top2 = 0.0;
    std::string label_top2;
    double sz = 0.0;
    double gap = 0.0;
    int multiplicity = 1;
    Region region = Region::Other;
    std::string error;  // empty on success; summaries are NaN otherwise
};

struct SweepGrid {
    std::vector<Axis> axes;  // 1 or 2
    DeviceParams base;
    std::vector<PointSummary> results;  // row-major, axis0 outer, axis1 inner
};

// Applies one axis value onto a parameter set.  Voltage moves mu_R with mu_L
// fixed; DeltaT moves T_R with T_L fixed; Epsilon and Exchange retune the dot.
DeviceParams apply_axis_value(const DeviceParams& base, SweepParameter p, double value);

// Full steady-state solve of a single parameter point.
SteadyStateReport solve_point(const DeviceParams& p);

// Grid evaluation; points are solved independently and in parallel.  Per-point
// failures are recorded in the grid instead of aborting it.
SweepGrid sweep(const DeviceParams& base, const std::vector<Axis>& axes,
                unsigned threads = 0);

// Dominant-occupation classifier with threshold 0.9.
Region region_classifier(const SteadyStateReport& report);

// Voltage at which the classifier label changes inside [v_lo, v_hi],
// located by bisection to the given resolution.
double locate_boundary(const DeviceParams& base, double v_lo, double v_hi,
                       double resolution = 0.05);

}  // namespace qsv
