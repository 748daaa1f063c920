#pragma once

#include <cmath>
#include <numbers>

#include "qsup/errors.hpp"

// Unit conventions used throughout the numeric core:
//   wavelengths   um
//   wavevectors   rad/um
//   path lengths  um internally; public geometry fields keep the unit in the name
//   angles        degrees at API boundaries, radians inside tight loops
// Wavenumber (cm^-1) appears only at I/O boundaries.

namespace qsup {

inline constexpr double pi = std::numbers::pi;

// SI constants (CODATA 2018)
inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double vacuum_permittivity_F_m = 8.8541878128e-12;

inline constexpr double nm_to_um(double nm) { return nm * 1e-3; }
inline constexpr double um_to_nm(double um) { return um * 1e3; }
inline constexpr double mm_to_um(double mm) { return mm * 1e3; }

inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// cm^-1 -> um via lambda = 1e4 / nu.
inline double wavenumber_to_um(double nu_cm) {
    if (nu_cm <= 0.0) throw DomainError("wavenumber must be positive, got " + std::to_string(nu_cm));
    return 1e4 / nu_cm;
}

/// um -> cm^-1.
inline double um_to_wavenumber(double lambda_um) {
    if (lambda_um <= 0.0) throw DomainError("wavelength must be positive, got " + std::to_string(lambda_um));
    return 1e4 / lambda_um;
}

/// Energy conservation: 1/lambda_p = 1/lambda_s + 1/lambda_i (all um).
inline double idler_from_signal_um(double lambda_p_um, double lambda_s_um) {
    const double inv = 1.0 / lambda_p_um - 1.0 / lambda_s_um;
    if (inv <= 0.0)
        throw DomainError("no physical idler: signal wavelength must exceed the pump wavelength");
    return 1.0 / inv;
}

inline double signal_from_idler_um(double lambda_p_um, double lambda_i_um) {
    const double inv = 1.0 / lambda_p_um - 1.0 / lambda_i_um;
    if (inv <= 0.0)
        throw DomainError("no physical signal: idler wavelength must exceed the pump wavelength");
    return 1.0 / inv;
}

}  // namespace qsup
