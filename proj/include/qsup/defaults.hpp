#pragma once

#include <cstdlib>
#include <string>

#include "qsup/dispersion.hpp"
#include "qsup/interferometer.hpp"

// Shipped reference configuration. Mirrors data/dispersion.json; the file is
// the swappable source of truth for user runs, these constants back the
// library defaults and the test suite.

namespace qsup::defaults {

/// AgGaS2 ordinary index, Sellmeier set from the Handbook of Nonlinear
/// Optical Crystals (Dmitriev, Gurzadyan, Nikogosyan), lambda in um.
inline RefractiveModel ags_ordinary() {
    return RefractiveModel::sellmeier({3.6280, 2.1686, 0.1003, 2.1753, 950.0}, 0.53, 12.0,
                                      "AgGaS2_o");
}

/// AgGaS2 extraordinary index, same source.
inline RefractiveModel ags_extraordinary() {
    return RefractiveModel::sellmeier({4.0172, 1.5274, 0.1310, 2.1699, 950.0}, 0.53, 12.0,
                                      "AgGaS2_e");
}

/// CaF2 (Malitson), shipped for reference; the default biocell medium is the
/// constant 1.4324 the geometry analysis uses.
inline RefractiveModel caf2() {
    return RefractiveModel::sellmeier({1.0, 0.5675888, 0.00252642994, 0.4710914, 0.01007832847,
                                       3.8484723, 1200.5560},
                                      0.23, 9.7, "CaF2");
}

/// Crystal cut angle calibrated to the shipped Sellmeier set: the collinear
/// type-I phase-matching point for a 660 nm pump lands at 743.8 nm signal,
/// just beyond the simulated band, so the emission ring spans the full
/// amide-band window. (With this data set, 74 degrees would place the
/// collinear point at 740.1 nm, inside the measurement window.)
inline constexpr double calibrated_cut_angle_deg = 77.3068591270511;

inline UniaxialCrystal crystal() {
    UniaxialCrystal c;
    c.ordinary = ags_ordinary();
    c.extraordinary = ags_extraordinary();
    c.cut_angle_deg = calibrated_cut_angle_deg;
    c.d_eff_pm_per_v = 15.5;
    c.length_mm = 5.0;
    c.transparency_lo_um = 0.53;
    c.transparency_hi_um = 12.0;
    return c;
}

inline PumpConfig pump() { return PumpConfig{660.0, 100.0, 1.0e4}; }

inline GeometryConfig geometry() {
    GeometryConfig g;
    g.crystal = crystal();
    g.pump = pump();
    g.gap_la_mm = -8.75;
    g.biocell_lb_mm = 10.0;
    g.sample_lm_um = 6.0;
    g.air = Medium{"air", RefractiveModel::constant(1.0, "air")};
    g.biocell = Medium{"biocell", RefractiveModel::constant(1.4324, "biocell")};
    g.sample = Medium{"sample", RefractiveModel::constant(1.33, "sample")};
    return g;
}

inline GridSpec grid() { return GridSpec{732.0, 743.0, 2001, 1.4, 401}; }

/// Analysis windows in signal nm. Window B covers the amide I peak
/// (idler 6.02-6.12 um); window A the low-absorption flank below the amide II
/// band (idler 6.55-6.70 um).
inline constexpr double window_a_nm[2] = {732.1, 734.0};
inline constexpr double window_b_nm[2] = {739.8, 741.3};

/// Dispersion data file path: QSUP_DISPERSION_FILE if set, else the given
/// fallback (empty = use built-in models).
inline std::string dispersion_path(const std::string& fallback = "") {
    if (const char* env = std::getenv("QSUP_DISPERSION_FILE")) return env;
    return fallback;
}

}  // namespace qsup::defaults
