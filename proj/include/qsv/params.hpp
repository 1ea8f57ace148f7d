// Device parameters: dot, exchange coupling and the two contacts.
//
// Unit conventions (documented in the README):
//   hbar = k = 1, energies in units of kT_ref where T_ref is the reference
//   temperature in kelvin.  Voltages are quoted in V_c = kT_ref/e, so a bias
//   V simply sets mu_R = V in energy units.  Tunneling rates gamma are
//   energies as well (hbar*gamma); 1 ueV at T_ref = 10 K is about
//   1.16045e-3 kT_ref.  Time is measured in hbar/kT_ref.
#pragma once

#include <array>
#include <optional>
#include <string>

#include "qsv/common.hpp"

namespace qsv {

enum class Contact : int { L = 0, R = 1 };
enum class Spin : int { Up = 0, Down = 1 };

inline const char* to_string(Contact c) { return c == Contact::L ? "L" : "R"; }
inline const char* to_string(Spin s) { return s == Spin::Up ? "up" : "down"; }

struct ContactSpec {
    Contact label = Contact::L;
    double mu = 0.0;             // chemical potential, kT_ref units
    double temperature_k = 10.0; // kelvin
    double gamma_up = 0.0;       // rate for the contact-basis up channel, kT_ref units
    double gamma_down = 0.0;
    double theta = 0.0;          // polarization tilt from the dot z axis
    double phi = 0.0;            // azimuthal angle

    double gamma(Spin s) const { return s == Spin::Up ? gamma_up : gamma_down; }
    double gamma_total() const { return gamma_up + gamma_down; }
    double polarization() const {
        const double tot = gamma_total();
        return tot > 0.0 ? (gamma_up - gamma_down) / tot : 0.0;
    }
};

struct DeviceParams {
    double epsilon = 45.0;                // dot onsite energy, kT_ref units
    std::optional<double> u_charging{};   // nullopt = infinite-U truncation
    double j_exchange = 30.0;             // exchange coupling, kT_ref units
    double bandwidth_w = 1e4;             // flat-band cutoff for the PV kernel
    double t_ref_k = 10.0;                // kelvin; defines the energy unit
    std::array<ContactSpec, 2> contacts{};

    DeviceParams() {
        contacts[0].label = Contact::L;
        contacts[1].label = Contact::R;
    }

    bool infinite_u() const { return !u_charging.has_value(); }
    int dim() const { return infinite_u() ? 12 : 16; }

    const ContactSpec& contact(Contact c) const { return contacts[static_cast<int>(c)]; }
    ContactSpec& contact(Contact c) { return contacts[static_cast<int>(c)]; }

    // Contact temperature in internal energy units (kT_alpha / kT_ref).
    double t_internal(const ContactSpec& c) const { return c.temperature_k / t_ref_k; }

    // Largest single-channel rate; reported currents are normalized by it.
    double gamma_ref() const;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

}  // namespace qsv
