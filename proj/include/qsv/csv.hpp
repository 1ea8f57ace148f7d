// Byte-stable CSV output: %.12e floats, comma separators, LF endings.
#pragma once

#include <ostream>
#include <string>

#include "qsv/config.hpp"

namespace qsv {

std::string format_double(double x);  // %.12e; nan/inf spelled out

// '#'-prefixed parameter snapshot making every output self-describing.
void write_param_snapshot(std::ostream& os, const DeviceParams& p);

void write_spectrum_csv(std::ostream& os, const DeviceParams& p, const SpectrumReport& rep);
void write_steady_text(std::ostream& os, const DeviceParams& p, const SteadyStateReport& rep);
void write_rho_csv(std::ostream& os, const DeviceParams& p, const Matrix& rho,
                   const EigenBasis& basis);
void write_sweep_csv(std::ostream& os, const SweepGrid& grid);
void write_table1_csv(std::ostream& os, const DeviceParams& p);
void write_postselect_csv(std::ostream& os, const DeviceParams& p,
                          const SteadyStateReport& rep);

}  // namespace qsv
