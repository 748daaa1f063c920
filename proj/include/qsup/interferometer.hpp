#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qsup/dispersion.hpp"
#include "qsup/errors.hpp"
#include "qsup/spdc.hpp"
#include "qsup/spectrum.hpp"
#include "qsup/units.hpp"

namespace qsup {

/// All lengths and media of the double-pass optical train. The crystal-mirror
/// gap is signed: negative values follow the plotting convention of the
/// geometry, where the retro-mapped return path makes the air-gap quadratic
/// phase cancel the biocell's.
struct GeometryConfig {
    UniaxialCrystal crystal;
    PumpConfig pump;
    double gap_la_mm = -8.75;       // crystal-mirror air gap (signed)
    double biocell_lb_mm = 10.0;    // total biocell window path
    double sample_lm_um = 6.0;      // sample optical path
    Medium air{"air", RefractiveModel::constant(1.0, "air")};
    Medium biocell{"biocell", RefractiveModel::constant(1.4324, "biocell")};
    Medium sample{"sample", RefractiveModel::constant(1.33, "sample")};

    void validate() const {
        crystal.validate();
        pump.validate();
        if (biocell_lb_mm <= 0.0) throw ConfigError("biocell path must be positive");
        if (sample_lm_um <= 0.0) throw ConfigError("sample path must be positive");
    }
};

/// Amplitude transmissivity of the sample over idler wavelength (um),
/// values in [0, 1] on a strictly ascending axis.
struct SampleTransmissivity {
    std::vector<double> lambda_i_um;
    std::vector<double> tau;

    static SampleTransmissivity flat(double tau_value, double lo_um = 1.0, double hi_um = 20.0) {
        if (tau_value < 0.0 || tau_value > 1.0) throw DomainError("flat tau must lie in [0, 1]");
        return SampleTransmissivity{{lo_um, hi_um}, {tau_value, tau_value}};
    }

    /// Adopts a transmissivity_amplitude spectrum; nm axes are mapped to idler
    /// um via the pump wavelength, cm^-1 axes via the wavenumber relation.
    static SampleTransmissivity from_spectrum(const Spectrum& s,
                                              std::optional<double> lambda_p_nm = std::nullopt) {
        if (s.kind != SpectrumKind::transmissivity_amplitude)
            throw DataError("sample spectrum kind must be transmissivity_amplitude");
        const Spectrum um = convert_axis(s, AxisUnit::micrometre, lambda_p_nm);
        SampleTransmissivity t{um.axis, um.values};
        t.validate();
        return t;
    }

    void validate() const {
        if (lambda_i_um.size() != tau.size() || lambda_i_um.size() < 2)
            throw DataError("transmissivity needs >= 2 (axis, value) pairs of equal length");
        for (std::size_t i = 1; i < lambda_i_um.size(); ++i)
            if (!(lambda_i_um[i] > lambda_i_um[i - 1]))
                throw DataError("transmissivity axis must be strictly ascending");
        for (double t : tau)
            if (t < 0.0 || t > 1.0) throw DataError("transmissivity amplitude outside [0, 1]");
    }

    double at(double lam_i_um) const { return interp_linear(lambda_i_um, tau, lam_i_um); }

    /// Rescales for a different sample path: tau(L) = tau(L_ref)^(L / L_ref),
    /// the Beer-Lambert exponent being linear in path length.
    SampleTransmissivity rescaled_to_path(double new_path_um, double ref_path_um) const {
        if (new_path_um <= 0.0 || ref_path_um <= 0.0)
            throw DomainError("sample paths must be positive");
        SampleTransmissivity out = *this;
        const double e = new_path_um / ref_path_um;
        for (double& t : out.tau) t = std::pow(t, e);
        return out;
    }
};

/// Simulation grid over the signal (wavelength, internal angle) plane.
struct GridSpec {
    double lambda_lo_nm = 732.0;
    double lambda_hi_nm = 743.0;
    int n_lambda = 2001;
    double theta_max_deg = 1.4;
    int n_theta = 401;

    void validate() const {
        if (!(lambda_hi_nm > lambda_lo_nm) || n_lambda < 2)
            throw ConfigError("wavelength grid needs lambda_hi > lambda_lo and >= 2 points");
        if (!(theta_max_deg > 0.0) || n_theta < 2)
            throw ConfigError("angle grid needs theta_max > 0 and >= 2 points");
    }

    std::vector<double> lambda_axis_nm() const {
        std::vector<double> v(n_lambda);
        const double step = (lambda_hi_nm - lambda_lo_nm) / (n_lambda - 1);
        for (int i = 0; i < n_lambda; ++i) v[i] = lambda_lo_nm + step * i;
        return v;
    }

    std::vector<double> theta_axis_deg() const {
        std::vector<double> v(n_theta);
        const double step = 2.0 * theta_max_deg / (n_theta - 1);
        for (int i = 0; i < n_theta; ++i) v[i] = -theta_max_deg + step * i;
        return v;
    }
};

namespace detail {

/// Per-wavelength kinematics shared by every theta of a map row.
struct RowKinematics {
    double lambda_s_um, lambda_i_um;
    double k_p_c, k_s_c, k_i_c;  // crystal wavevectors, rad/um
    double c0;
};

inline RowKinematics row_kinematics(const GeometryConfig& g, double lambda_s_nm) {
    RowKinematics r;
    const double lambda_p_um = nm_to_um(g.pump.lambda_p_nm);
    r.lambda_s_um = nm_to_um(lambda_s_nm);
    r.lambda_i_um = idler_wavelength(g.pump.lambda_p_nm, lambda_s_nm);
    g.crystal.require_transparent(lambda_p_um);
    g.crystal.require_transparent(r.lambda_s_um);
    g.crystal.require_transparent(r.lambda_i_um);
    const double n_p = extraordinary_index(g.crystal, lambda_p_um, g.crystal.cut_angle_deg);
    const double n_s = index_at(g.crystal.ordinary, r.lambda_s_um);
    const double n_i = index_at(g.crystal.ordinary, r.lambda_i_um);
    r.k_p_c = wavevector(n_p, lambda_p_um);
    r.k_s_c = wavevector(n_s, r.lambda_s_um);
    r.k_i_c = wavevector(n_i, r.lambda_i_um);
    r.c0 = efficiency_c0(g.pump, g.crystal, n_p, n_s, n_i, lambda_s_nm, r.lambda_i_um);
    return r;
}

/// (k_p - sqrt(k_s^2 - q^2) - sqrt(k_i^2 - q^2)) * length for one section,
/// with the medium's own wavevectors and the conserved transverse q.
inline double section_phase(const Medium& medium, double lambda_p_um, double lambda_s_um,
                            double lambda_i_um, double q, double length_um) {
    if (length_um == 0.0) return 0.0;
    const double k_p = wavevector(index_at(medium.model, lambda_p_um), lambda_p_um);
    const double k_s = wavevector(index_at(medium.model, lambda_s_um), lambda_s_um);
    const double k_i = wavevector(index_at(medium.model, lambda_i_um), lambda_i_um);
    const double q2 = q * q;
    if (q2 > k_s * k_s || q2 > k_i * k_i)
        throw EvanescentError("transverse wavenumber " + std::to_string(std::abs(q)) +
                              " rad/um exceeds a wavevector in medium '" + medium.label + "'");
    return (k_p - std::sqrt(k_s * k_s - q2) - std::sqrt(k_i * k_i - q2)) * length_um;
}

}  // namespace detail

/// Phase mismatch accumulated over one section of the idler-arm train. The
/// transverse wavenumber q = k_s sin(theta_s) is conserved into the medium;
/// k_s here is the crystal signal wavevector since theta_s is the internal
/// map angle.
inline double sectional_mismatch(const GeometryConfig& geometry, const Medium& medium,
                                 double lambda_s_nm, double theta_s_deg, double length_mm) {
    const auto r = detail::row_kinematics(geometry, lambda_s_nm);
    const double q = r.k_s_c * std::sin(deg_to_rad(theta_s_deg));
    return detail::section_phase(medium, nm_to_um(geometry.pump.lambda_p_nm), r.lambda_s_um,
                                 r.lambda_i_um, q, mm_to_um(length_mm));
}

/// delta_s = delta_a + delta_b + delta_m.
inline double total_sample_phase(const GeometryConfig& geometry, double lambda_s_nm,
                                 double theta_s_deg) {
    const auto r = detail::row_kinematics(geometry, lambda_s_nm);
    const double q = r.k_s_c * std::sin(deg_to_rad(theta_s_deg));
    const double lp = nm_to_um(geometry.pump.lambda_p_nm);
    return detail::section_phase(geometry.air, lp, r.lambda_s_um, r.lambda_i_um, q,
                                 mm_to_um(geometry.gap_la_mm)) +
           detail::section_phase(geometry.biocell, lp, r.lambda_s_um, r.lambda_i_um, q,
                                 mm_to_um(geometry.biocell_lb_mm)) +
           detail::section_phase(geometry.sample, lp, r.lambda_s_um, r.lambda_i_um, q,
                                 geometry.sample_lm_um);
}

/// Modulated double-pass intensity C0 sinc^2(delta/2) (1 + |tau| cos(delta + delta_s)).
inline double double_pass_intensity(const PhasePoint& point, double c0, double delta_s_rad,
                                    double tau) {
    if (tau < 0.0 || tau > 1.0)
        throw DomainError("transmissivity amplitude " + std::to_string(tau) + " outside [0, 1]");
    const double s = sinc(point.delta_rad / 2.0);
    return c0 * s * s * (1.0 + tau * std::cos(point.delta_rad + delta_s_rad));
}

/// 2D signal intensity over (wavelength, emission angle).
struct InterferenceMap {
    std::vector<double> lambda_s_nm;
    std::vector<double> theta_s_deg;
    std::vector<double> intensity;  // row-major [i_lambda * n_theta + i_theta]

    double at(std::size_t i_lambda, std::size_t i_theta) const {
        return intensity[i_lambda * theta_s_deg.size() + i_theta];
    }
};

/// 1D fringe spectrum after angle integration.
struct FringeSpectrum {
    std::vector<double> lambda_s_nm;
    std::vector<double> intensity;
};

/// Per-pair visibility with the pair's spectral midpoint and half separation.
struct VisibilityPoint {
    double lambda_mid_nm;
    double visibility;
    double lambda_halfwidth_nm;
};

struct VisibilityCurve {
    std::vector<VisibilityPoint> points;
};

/// Weighted-visibility figure of merit beta = V_A (V_A - V_B).
struct BetaResult {
    double beta = 0.0;
    double v_a = 0.0;
    double v_b = 0.0;
    double window_a_nm[2] = {0.0, 0.0};
    double window_b_nm[2] = {0.0, 0.0};
};

/// Evaluates the modulated intensity over the grid. tau is interpolated at the
/// idler wavelength derived from each signal wavelength; an axis that does not
/// cover the derived idler range is a coverage error. Rows are independent;
/// `threads` > 1 evaluates them concurrently with identical results.
inline InterferenceMap build_map(const GeometryConfig& geometry, const SampleTransmissivity& sample,
                                 const GridSpec& grid, unsigned threads = 1) {
    geometry.validate();
    grid.validate();
    sample.validate();

    InterferenceMap map;
    map.lambda_s_nm = grid.lambda_axis_nm();
    map.theta_s_deg = grid.theta_axis_deg();
    map.intensity.assign(static_cast<std::size_t>(grid.n_lambda) * grid.n_theta, 0.0);

    // tau axis must cover every derived idler wavelength
    const double li_hi = idler_wavelength(geometry.pump.lambda_p_nm, grid.lambda_lo_nm);
    const double li_lo = idler_wavelength(geometry.pump.lambda_p_nm, grid.lambda_hi_nm);
    if (li_lo < sample.lambda_i_um.front() || li_hi > sample.lambda_i_um.back())
        throw CoverageError("transmissivity axis [" + std::to_string(sample.lambda_i_um.front()) + ", " +
                            std::to_string(sample.lambda_i_um.back()) + "] um does not cover the derived idler range [" +
                            std::to_string(li_lo) + ", " + std::to_string(li_hi) + "] um");

    const double lambda_p_um = nm_to_um(geometry.pump.lambda_p_nm);
    std::vector<double> sin_theta(map.theta_s_deg.size());
    for (std::size_t j = 0; j < sin_theta.size(); ++j)
        sin_theta[j] = std::sin(deg_to_rad(map.theta_s_deg[j]));

    auto do_row = [&](int i) {
        const auto r = detail::row_kinematics(geometry, map.lambda_s_nm[i]);
        const double tau = sample.at(r.lambda_i_um);
        double* row = &map.intensity[static_cast<std::size_t>(i) * grid.n_theta];
        for (int j = 0; j < grid.n_theta; ++j) {
            const double q = r.k_s_c * sin_theta[static_cast<std::size_t>(j)];
            const double delta = longitudinal_mismatch_q(r.k_p_c, r.k_s_c, r.k_i_c, q,
                                                         geometry.crystal.length_mm);
            const double delta_s =
                detail::section_phase(geometry.air, lambda_p_um, r.lambda_s_um, r.lambda_i_um, q,
                                      mm_to_um(geometry.gap_la_mm)) +
                detail::section_phase(geometry.biocell, lambda_p_um, r.lambda_s_um, r.lambda_i_um, q,
                                      mm_to_um(geometry.biocell_lb_mm)) +
                detail::section_phase(geometry.sample, lambda_p_um, r.lambda_s_um, r.lambda_i_um, q,
                                      geometry.sample_lm_um);
            const double s = sinc(delta / 2.0);
            row[j] = r.c0 * s * s * (1.0 + tau * std::cos(delta + delta_s));
        }
    };

    if (threads <= 1) {
        for (int i = 0; i < grid.n_lambda; ++i) do_row(i);
    } else {
        const unsigned n = std::min<unsigned>(threads, std::thread::hardware_concurrency() > 0
                                                           ? std::thread::hardware_concurrency()
                                                           : 4u);
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mutex;
        for (unsigned t = 0; t < n; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (int i = static_cast<int>(t); i < grid.n_lambda; i += static_cast<int>(n))
                        do_row(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return map;
}

/// Trapezoidal integration over the emission angle (radians) per wavelength.
inline FringeSpectrum integrate_angles(const InterferenceMap& map) {
    const std::size_t n_l = map.lambda_s_nm.size();
    const std::size_t n_t = map.theta_s_deg.size();
    if (n_t < 2) throw DomainError("angle integration needs >= 2 angle samples");
    FringeSpectrum out;
    out.lambda_s_nm = map.lambda_s_nm;
    out.intensity.assign(n_l, 0.0);
    std::vector<double> dtheta(n_t - 1);
    for (std::size_t j = 0; j + 1 < n_t; ++j)
        dtheta[j] = deg_to_rad(map.theta_s_deg[j + 1] - map.theta_s_deg[j]);
    for (std::size_t i = 0; i < n_l; ++i) {
        const double* row = &map.intensity[i * n_t];
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < n_t; ++j) acc += 0.5 * (row[j] + row[j + 1]) * dtheta[j];
        out.intensity[i] = acc;
    }
    return out;
}

struct ExtractionOptions {
    int smoothing_width = 0;  // moving-average width in samples, 0 disables
};

/// Peak-dip visibility extraction: interior local extrema of the integrated
/// spectrum; each adjacent (peak, dip) pair yields
/// V = (I_max - I_min)/(I_max + I_min) assigned to the pair's midpoint
/// wavelength. A flat or monotone spectrum (the vanishing-fringe regime) is a
/// NoFringesError.
inline VisibilityCurve extract_visibility(const FringeSpectrum& spectrum,
                                          const ExtractionOptions& options = {}) {
    const std::vector<double>* vals = &spectrum.intensity;
    std::vector<double> smoothed;
    if (options.smoothing_width > 1) {
        const int w = options.smoothing_width;
        const int n = static_cast<int>(spectrum.intensity.size());
        smoothed.resize(spectrum.intensity.size());
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - w / 2);
            const int hi = std::min(n - 1, i + w / 2);
            double acc = 0.0;
            for (int k = lo; k <= hi; ++k) acc += spectrum.intensity[static_cast<std::size_t>(k)];
            smoothed[static_cast<std::size_t>(i)] = acc / (hi - lo + 1);
        }
        vals = &smoothed;
    }

    struct Extremum {
        double lambda;
        double value;
        bool is_max;
    };
    std::vector<Extremum> extrema;
    const auto& v = *vals;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1])
            extrema.push_back({spectrum.lambda_s_nm[i], v[i], true});
        else if (v[i] < v[i - 1] && v[i] < v[i + 1])
            extrema.push_back({spectrum.lambda_s_nm[i], v[i], false});
    }
    bool any_max = false, any_min = false;
    for (const auto& e : extrema) (e.is_max ? any_max : any_min) = true;
    if (!any_max || !any_min)
        throw NoFringesError("no interior fringe extrema: the fringes have vanished over this range");

    VisibilityCurve curve;
    for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
        const auto& a = extrema[i];
        const auto& b = extrema[i + 1];
        if (a.is_max == b.is_max) continue;
        const double hi = std::max(a.value, b.value);
        const double lo = std::min(a.value, b.value);
        if (hi + lo <= 0.0) continue;
        curve.points.push_back({(a.lambda + b.lambda) / 2.0, (hi - lo) / (hi + lo),
                                std::abs(a.lambda - b.lambda) / 2.0});
    }
    if (curve.points.empty())
        throw NoFringesError("no adjacent peak-dip pairs found");
    return curve;
}

/// Mean visibility in each window and beta = V_A (V_A - V_B). Windows are
/// [lo, hi] in signal nm; an empty window is an error naming it.
inline BetaResult weighted_visibility(const VisibilityCurve& curve, const double window_a_nm[2],
                                      const double window_b_nm[2]) {
    auto window_mean = [&](const double w[2], const char* name) {
        double acc = 0.0;
        int n = 0;
        for (const auto& p : curve.points)
            if (p.lambda_mid_nm >= w[0] && p.lambda_mid_nm <= w[1]) {
                acc += p.visibility;
                ++n;
            }
        if (n == 0)
            throw WindowError(std::string("window ") + name + " [" + std::to_string(w[0]) + ", " +
                              std::to_string(w[1]) + "] nm contains no visibility points");
        return acc / n;
    };
    BetaResult r;
    r.v_a = window_mean(window_a_nm, "A");
    r.v_b = window_mean(window_b_nm, "B");
    r.beta = r.v_a * (r.v_a - r.v_b);
    r.window_a_nm[0] = window_a_nm[0];
    r.window_a_nm[1] = window_a_nm[1];
    r.window_b_nm[0] = window_b_nm[0];
    r.window_b_nm[1] = window_b_nm[1];
    return r;
}

/// Gap at which the air and biocell quadratic phases cancel and the fringes
/// vanish: L_a = -(n_a / n_b) L_b. Dispersive media are evaluated at the
/// given reference idler wavelength (default mid amide band).
inline double null_gap_predictor(const GeometryConfig& geometry, double lambda_ref_um = 6.3) {
    const double n_a = index_at(geometry.air.model, lambda_ref_um);
    const double n_b = index_at(geometry.biocell.model, lambda_ref_um);
    if (n_b <= 0.0) throw DomainError("biocell index must be positive");
    return -(n_a / n_b) * geometry.biocell_lb_mm;
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json geometry_to_json(const GeometryConfig& g) {
    auto model_json = [](const RefractiveModel& m) {
        nlohmann::json j{{"label", m.label},
                         {"kind", m.kind == ModelKind::constant ? "constant" : "sellmeier"},
                         {"valid_range_um", {m.valid_lo_um, m.valid_hi_um}}};
        if (m.kind == ModelKind::constant)
            j["n"] = m.constant_n;
        else
            j["coefficients"] = m.coefficients;
        return j;
    };
    return nlohmann::json{
        {"crystal",
         {{"ordinary", model_json(g.crystal.ordinary)},
          {"extraordinary", model_json(g.crystal.extraordinary)},
          {"cut_angle_deg", g.crystal.cut_angle_deg},
          {"d_eff_pm_per_v", g.crystal.d_eff_pm_per_v},
          {"length_mm", g.crystal.length_mm},
          {"transparency_um", {g.crystal.transparency_lo_um, g.crystal.transparency_hi_um}}}},
        {"pump",
         {{"lambda_p_nm", g.pump.lambda_p_nm},
          {"power_mw", g.pump.power_mw},
          {"s_eff_um2", g.pump.s_eff_um2}}},
        {"gap_la_mm", g.gap_la_mm},
        {"biocell_lb_mm", g.biocell_lb_mm},
        {"sample_lm_um", g.sample_lm_um},
        {"media",
         {{"air", model_json(g.air.model)},
          {"biocell", model_json(g.biocell.model)},
          {"sample", model_json(g.sample.model)}}}};
}

inline void write_map_csv(const InterferenceMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "lambda_s_nm";
    for (double th : map.theta_s_deg) out << ",theta_" << detail::format_double(th);
    out << "\n";
    for (std::size_t i = 0; i < map.lambda_s_nm.size(); ++i) {
        out << detail::format_double(map.lambda_s_nm[i]);
        for (std::size_t j = 0; j < map.theta_s_deg.size(); ++j)
            out << "," << detail::format_double(map.at(i, j));
        out << "\n";
    }
}

inline nlohmann::json map_to_json(const InterferenceMap& map, const nlohmann::json& metadata) {
    return nlohmann::json{{"lambda_s_nm", map.lambda_s_nm},
                          {"theta_s_deg", map.theta_s_deg},
                          {"intensity_row_major", map.intensity},
                          {"metadata", metadata}};
}

inline void write_fringe_csv(const FringeSpectrum& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "lambda_s_nm,intensity\n";
    for (std::size_t i = 0; i < s.lambda_s_nm.size(); ++i)
        out << detail::format_double(s.lambda_s_nm[i]) << "," << detail::format_double(s.intensity[i])
            << "\n";
}

inline void write_visibility_csv(const VisibilityCurve& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "lambda_mid_nm,visibility,lambda_halfwidth_nm\n";
    for (const auto& p : c.points)
        out << detail::format_double(p.lambda_mid_nm) << "," << detail::format_double(p.visibility)
            << "," << detail::format_double(p.lambda_halfwidth_nm) << "\n";
}

inline VisibilityCurve read_visibility_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    VisibilityCurve c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("lambda_mid_nm", 0) == 0) continue;
        std::istringstream ss(line);
        std::string a, b, cfield;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, cfield, ','))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected three fields");
        c.points.push_back({detail::parse_double(a, path, lineno), detail::parse_double(b, path, lineno),
                            detail::parse_double(cfield, path, lineno)});
    }
    if (c.points.empty()) throw ParseError(path + ": no visibility points");
    return c;
}

inline nlohmann::json visibility_to_json(const VisibilityCurve& c, const nlohmann::json& metadata) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points)
        pts.push_back({{"lambda_mid_nm", p.lambda_mid_nm},
                       {"visibility", p.visibility},
                       {"lambda_halfwidth_nm", p.lambda_halfwidth_nm}});
    return nlohmann::json{{"points", pts}, {"metadata", metadata}};
}

}  // namespace qsup
