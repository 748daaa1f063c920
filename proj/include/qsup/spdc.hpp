#pragma once

#include <cmath>

#include "qsup/dispersion.hpp"
#include "qsup/errors.hpp"
#include "qsup/units.hpp"

namespace qsup {

/// Pump laser parameters. Power and effective beam area scale only the
/// absolute intensity, never the fringe visibility.
struct PumpConfig {
    double lambda_p_nm = 660.0;
    double power_mw = 100.0;
    double s_eff_um2 = 1.0e4;

    void validate() const {
        if (lambda_p_nm <= 0.0 || power_mw <= 0.0 || s_eff_um2 <= 0.0)
            throw ConfigError("pump wavelength, power and effective area must all be positive");
    }
};

/// Unnormalized sinc with the removable singularity expanded near zero.
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// Idler wavelength in um from energy conservation 1/l_p = 1/l_s + 1/l_i.
inline double idler_wavelength(double lambda_p_nm, double lambda_s_nm) {
    if (lambda_s_nm <= lambda_p_nm)
        throw DomainError("no physical idler: lambda_s = " + std::to_string(lambda_s_nm) +
                          " nm must exceed lambda_p = " + std::to_string(lambda_p_nm) + " nm");
    return idler_from_signal_um(nm_to_um(lambda_p_nm), nm_to_um(lambda_s_nm));
}

/// Idler emission angle from transverse momentum conservation,
/// theta_i = arcsin((k_s / k_i) sin theta_s). Both k in rad/um.
inline double idler_angle(double k_s, double k_i, double theta_s_deg) {
    const double arg = (k_s / k_i) * std::sin(deg_to_rad(theta_s_deg));
    if (std::abs(arg) > 1.0)
        throw EvanescentError("no propagating idler: |k_s/k_i sin(theta_s)| = " +
                              std::to_string(std::abs(arg)) + " > 1");
    return rad_to_deg(std::asin(arg));
}

/// Longitudinal phase mismatch over the crystal,
/// delta = (k_p - k_s cos theta_s - k_i cos theta_i) * L, in rad.
inline double longitudinal_mismatch(double k_p, double k_s, double k_i, double theta_s_deg,
                                    double theta_i_deg, double length_mm) {
    if (length_mm <= 0.0) throw DomainError("crystal length must be positive");
    const double per_um = k_p - k_s * std::cos(deg_to_rad(theta_s_deg)) -
                          k_i * std::cos(deg_to_rad(theta_i_deg));
    return per_um * mm_to_um(length_mm);
}

/// Conserved transverse wavenumber q = k_s sin(theta_s), rad/um.
inline double transverse_wavenumber(double k_s, double theta_s_deg) {
    return k_s * std::sin(deg_to_rad(theta_s_deg));
}

/// The same mismatch written in the conserved-q form,
/// k_s cos theta_s = sqrt(k_s^2 - q^2). This is the arithmetic route shared
/// by the point and map evaluations so their results agree bit-for-bit.
inline double longitudinal_mismatch_q(double k_p, double k_s, double k_i, double q,
                                      double length_mm) {
    if (length_mm <= 0.0) throw DomainError("crystal length must be positive");
    const double q2 = q * q;
    return (k_p - std::sqrt(k_s * k_s - q2) - std::sqrt(k_i * k_i - q2)) * mm_to_um(length_mm);
}

/// One point of the signal (wavelength, angle) map with its derived idler
/// kinematics and crystal phase mismatch. Signal angles are internal
/// propagation angles inside the crystal; face refraction is not modelled.
struct PhasePoint {
    double lambda_s_nm = 0.0;
    double theta_s_deg = 0.0;
    double lambda_i_um = 0.0;
    double theta_i_deg = 0.0;
    double delta_rad = 0.0;
};

/// Builds a PhasePoint from crystal dispersion: pump extraordinary at the cut
/// angle, signal and idler on the ordinary index (type-I, negative uniaxial).
inline PhasePoint make_phase_point(const UniaxialCrystal& crystal, const PumpConfig& pump,
                                   double lambda_s_nm, double theta_s_deg) {
    const double lambda_p_um = nm_to_um(pump.lambda_p_nm);
    const double lambda_s_um = nm_to_um(lambda_s_nm);
    const double lambda_i_um = idler_wavelength(pump.lambda_p_nm, lambda_s_nm);
    crystal.require_transparent(lambda_p_um);
    crystal.require_transparent(lambda_s_um);
    crystal.require_transparent(lambda_i_um);

    const double k_p = wavevector(extraordinary_index(crystal, lambda_p_um, crystal.cut_angle_deg),
                                  lambda_p_um);
    const double k_s = wavevector(index_at(crystal.ordinary, lambda_s_um), lambda_s_um);
    const double k_i = wavevector(index_at(crystal.ordinary, lambda_i_um), lambda_i_um);

    PhasePoint p;
    p.lambda_s_nm = lambda_s_nm;
    p.theta_s_deg = theta_s_deg;
    p.lambda_i_um = lambda_i_um;
    p.theta_i_deg = idler_angle(k_s, k_i, theta_s_deg);
    p.delta_rad = longitudinal_mismatch_q(k_p, k_s, k_i, transverse_wavenumber(k_s, theta_s_deg),
                                          crystal.length_mm);
    return p;
}

/// SPDC efficiency prefactor
///   C0 = 16/3 * c pi^3 hbar L^2 P_p d_eff^2 / (eps0 n_p n_s n_i lambda_s^3 lambda_i S_eff)
/// evaluated in SI units. Scales as L^2, P_p, d_eff^2 and 1/S_eff.
inline double efficiency_c0(const PumpConfig& pump, const UniaxialCrystal& crystal, double n_p,
                            double n_s, double n_i, double lambda_s_nm, double lambda_i_um) {
    if (n_p <= 0 || n_s <= 0 || n_i <= 0 || lambda_s_nm <= 0 || lambda_i_um <= 0)
        throw DomainError("efficiency prefactor inputs must be positive");
    pump.validate();
    crystal.validate();
    const double L_m = crystal.length_mm * 1e-3;
    const double P_W = pump.power_mw * 1e-3;
    const double d_m_v = crystal.d_eff_pm_per_v * 1e-12;
    const double ls_m = lambda_s_nm * 1e-9;
    const double li_m = lambda_i_um * 1e-6;
    const double S_m2 = pump.s_eff_um2 * 1e-12;
    const double num = speed_of_light_m_s * pi * pi * pi * hbar_J_s * L_m * L_m * P_W * d_m_v * d_m_v;
    const double den = vacuum_permittivity_F_m * n_p * n_s * n_i * ls_m * ls_m * ls_m * li_m * S_m2;
    return (16.0 / 3.0) * num / den;
}

/// Single-pass signal intensity C0 sinc^2(delta/2).
inline double single_pass_intensity(const PhasePoint& point, double c0) {
    const double s = sinc(point.delta_rad / 2.0);
    return c0 * s * s;
}

}  // namespace qsup
