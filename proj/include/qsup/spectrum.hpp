#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsup/errors.hpp"
#include "qsup/units.hpp"

namespace qsup {

enum class AxisUnit { wavenumber_cm, nanometre, micrometre };
enum class SpectrumKind { absorbance, transmissivity_amplitude, visibility, second_derivative, arbitrary };

inline std::string to_string(AxisUnit u) {
    switch (u) {
        case AxisUnit::wavenumber_cm: return "cm^-1";
        case AxisUnit::nanometre: return "nm";
        case AxisUnit::micrometre: return "um";
    }
    return "?";
}

inline std::string to_string(SpectrumKind k) {
    switch (k) {
        case SpectrumKind::absorbance: return "absorbance";
        case SpectrumKind::transmissivity_amplitude: return "transmissivity_amplitude";
        case SpectrumKind::visibility: return "visibility";
        case SpectrumKind::second_derivative: return "second_derivative";
        case SpectrumKind::arbitrary: return "arbitrary";
    }
    return "?";
}

inline AxisUnit axis_unit_from_string(const std::string& s) {
    if (s == "cm^-1" || s == "cm-1" || s == "1/cm") return AxisUnit::wavenumber_cm;
    if (s == "nm") return AxisUnit::nanometre;
    if (s == "um" || s == "micron") return AxisUnit::micrometre;
    throw ParseError("unknown axis unit '" + s + "' (expected cm^-1, nm or um)");
}

inline SpectrumKind kind_from_string(const std::string& s) {
    if (s == "absorbance") return SpectrumKind::absorbance;
    if (s == "transmissivity_amplitude") return SpectrumKind::transmissivity_amplitude;
    if (s == "visibility") return SpectrumKind::visibility;
    if (s == "second_derivative") return SpectrumKind::second_derivative;
    if (s == "arbitrary") return SpectrumKind::arbitrary;
    throw ParseError("unknown value kind '" + s + "'");
}

/// A sampled function over a strictly monotone spectral axis with explicit units.
struct Spectrum {
    AxisUnit unit = AxisUnit::wavenumber_cm;
    SpectrumKind kind = SpectrumKind::arbitrary;
    std::vector<double> axis;
    std::vector<double> values;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return axis.size(); }

    /// Sorts ascending (reordering values accordingly) and validates strict
    /// monotonicity and, for transmissivity, the [0, 1] bound.
    void validate_and_sort() {
        if (axis.size() != values.size())
            throw DataError("axis and value lengths differ (" + std::to_string(axis.size()) + " vs " +
                            std::to_string(values.size()) + ")");
        if (axis.size() < 2) throw DataError("spectrum needs at least two points");
        std::vector<std::size_t> order(axis.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return axis[a] < axis[b]; });
        std::vector<double> ax(axis.size()), va(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            ax[i] = axis[order[i]];
            va[i] = values[order[i]];
        }
        axis = std::move(ax);
        values = std::move(va);
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (!(axis[i] > axis[i - 1]))
                throw DataError("axis not strictly monotone after sort: duplicate value " +
                                std::to_string(axis[i]));
        if (kind == SpectrumKind::transmissivity_amplitude)
            for (double v : values)
                if (v < 0.0 || v > 1.0)
                    throw DataError("transmissivity amplitude " + std::to_string(v) + " outside [0, 1]");
    }
};

/// Linear interpolation on a strictly ascending axis; no extrapolation.
inline double interp_linear(const std::vector<double>& axis, const std::vector<double>& values, double x) {
    if (axis.empty() || x < axis.front() || x > axis.back())
        throw CoverageError("abscissa " + std::to_string(x) + " outside covered range [" +
                            (axis.empty() ? "" : std::to_string(axis.front()) + ", " + std::to_string(axis.back())) +
                            "]");
    auto it = std::lower_bound(axis.begin(), axis.end(), x);
    if (it == axis.begin()) return values.front();
    const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - axis[lo]) / (axis[hi] - axis[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& tok, const std::string& file, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ":" + std::to_string(line) + ": not a number: '" + tok + "'");
    }
}

}  // namespace detail

/// CSV spectrum format: header line `axis_unit,value_kind`, then `axis,value`
/// rows. Values are written with 17 significant digits so write/read
/// round-trips are lossless.
inline Spectrum read_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spectrum file '" + path + "'");
    Spectrum s;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected two comma-separated fields");
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        if (!have_header) {
            s.unit = axis_unit_from_string(a);
            s.kind = kind_from_string(b);
            have_header = true;
            continue;
        }
        s.axis.push_back(detail::parse_double(a, path, lineno));
        s.values.push_back(detail::parse_double(b, path, lineno));
    }
    if (!have_header) throw ParseError(path + ": missing header line 'axis_unit,value_kind'");
    try {
        s.validate_and_sort();
    } catch (const DataError& e) {
        throw ParseError(path + ": " + e.what());
    }
    return s;
}

inline void write_spectrum_csv(const Spectrum& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write spectrum file '" + path + "'");
    out << to_string(s.unit) << "," << to_string(s.kind) << "\n";
    for (std::size_t i = 0; i < s.axis.size(); ++i)
        out << detail::format_double(s.axis[i]) << "," << detail::format_double(s.values[i]) << "\n";
}

inline nlohmann::json spectrum_to_json(const Spectrum& s) {
    return nlohmann::json{{"axis_unit", to_string(s.unit)},
                          {"kind", to_string(s.kind)},
                          {"axis", s.axis},
                          {"values", s.values},
                          {"metadata", s.metadata}};
}

inline Spectrum spectrum_from_json(const nlohmann::json& j) {
    Spectrum s;
    try {
        s.unit = axis_unit_from_string(j.at("axis_unit").get<std::string>());
        s.kind = kind_from_string(j.at("kind").get<std::string>());
        s.axis = j.at("axis").get<std::vector<double>>();
        s.values = j.at("values").get<std::vector<double>>();
        if (j.contains("metadata"))
            s.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad spectrum JSON: ") + e.what());
    }
    s.validate_and_sort();
    return s;
}

inline Spectrum read_spectrum_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spectrum file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return spectrum_from_json(j);
}

/// Reads a spectrum, dispatching on file extension (.json vs CSV).
inline Spectrum read_spectrum(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return read_spectrum_json(path);
    return read_spectrum_csv(path);
}

/// Converts the spectral axis between cm^-1, um (idler) and nm (signal).
/// Signal-wavelength conversions require the pump wavelength for the
/// energy-conservation mapping. Values are carried over unchanged; the result
/// is re-sorted ascending.
inline Spectrum convert_axis(const Spectrum& s, AxisUnit target,
                             std::optional<double> lambda_p_nm = std::nullopt) {
    Spectrum out = s;
    if (s.unit == target) return out;

    // to um first
    std::vector<double> um(s.axis.size());
    switch (s.unit) {
        case AxisUnit::micrometre:
            um = s.axis;
            break;
        case AxisUnit::wavenumber_cm:
            for (std::size_t i = 0; i < s.axis.size(); ++i) um[i] = wavenumber_to_um(s.axis[i]);
            break;
        case AxisUnit::nanometre: {
            // nm axis means signal wavelength; map to idler um via energy conservation
            if (!lambda_p_nm)
                throw ConfigError("pump wavelength required to convert a signal-wavelength axis");
            for (std::size_t i = 0; i < s.axis.size(); ++i)
                um[i] = idler_from_signal_um(nm_to_um(*lambda_p_nm), nm_to_um(s.axis[i]));
            break;
        }
    }

    out.axis.resize(um.size());
    switch (target) {
        case AxisUnit::micrometre:
            out.axis = um;
            break;
        case AxisUnit::wavenumber_cm:
            for (std::size_t i = 0; i < um.size(); ++i) out.axis[i] = um_to_wavenumber(um[i]);
            break;
        case AxisUnit::nanometre: {
            if (!lambda_p_nm)
                throw ConfigError("pump wavelength required to convert to a signal-wavelength axis");
            for (std::size_t i = 0; i < um.size(); ++i)
                out.axis[i] = um_to_nm(signal_from_idler_um(nm_to_um(*lambda_p_nm), um[i]));
            break;
        }
    }
    out.unit = target;
    out.validate_and_sort();
    return out;
}

/// Parameters of the ATR-absorbance -> amplitude-transmissivity conversion.
struct AtrConversionConfig {
    double penetration_depth_nm = 100.0;
    double sample_path_um = 6.0;
    int pass_count = 1;

    void validate() const {
        if (penetration_depth_nm <= 0.0) throw ConfigError("penetration depth must be positive");
        if (sample_path_um <= 0.0) throw ConfigError("sample path must be positive");
        if (pass_count < 1) throw ConfigError("pass count must be >= 1");
    }
};

/// Beer-Lambert chain: alpha = A ln10 / d_p, T = exp(-alpha L_m passes),
/// tau = sqrt(T), clamped to [0, 1]. Axis is unchanged.
inline Spectrum atr_to_transmissivity(const Spectrum& absorbance, const AtrConversionConfig& cfg) {
    cfg.validate();
    if (absorbance.kind != SpectrumKind::absorbance)
        throw DataError("input spectrum kind must be absorbance");
    for (double a : absorbance.values)
        if (a < 0.0)
            throw DataError("negative absorbance " + std::to_string(a) +
                            "; baseline-correct the spectrum first");
    Spectrum out = absorbance;
    out.kind = SpectrumKind::transmissivity_amplitude;
    const double ln10 = std::log(10.0);
    const double path_nm = cfg.sample_path_um * 1e3 * cfg.pass_count;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double alpha_per_nm = absorbance.values[i] * ln10 / cfg.penetration_depth_nm;
        const double t_intensity = std::exp(-alpha_per_nm * path_nm);
        out.values[i] = std::clamp(std::sqrt(t_intensity), 0.0, 1.0);
    }
    out.metadata["penetration_depth_nm"] = detail::format_double(cfg.penetration_depth_nm);
    out.metadata["sample_path_um"] = detail::format_double(cfg.sample_path_um);
    out.metadata["pass_count"] = std::to_string(cfg.pass_count);
    return out;
}

/// Returns a warning if absorbance maxima fall outside the amide I region
/// (1600-1700 cm^-1); empty vector otherwise. Only meaningful for
/// protein-like inputs on a wavenumber axis covering that region.
inline std::vector<std::string> amide_band_warnings(const Spectrum& absorbance) {
    std::vector<std::string> warnings;
    if (absorbance.unit != AxisUnit::wavenumber_cm || absorbance.kind != SpectrumKind::absorbance)
        return warnings;
    if (absorbance.axis.front() > 1600.0 || absorbance.axis.back() < 1700.0) return warnings;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < absorbance.values.size(); ++i)
        if (absorbance.values[i] > absorbance.values[imax]) imax = i;
    const double nu = absorbance.axis[imax];
    if (nu < 1600.0 || nu > 1700.0)
        warnings.push_back("absorbance maximum at " + std::to_string(nu) +
                           " cm^-1 lies outside the amide I region (1600-1700 cm^-1)");
    return warnings;
}

}  // namespace qsup
