#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsup/errors.hpp"
#include "qsup/units.hpp"

namespace qsup {

enum class ModelKind { constant, sellmeier };

/// Wavelength-dependent refractive index of one medium.
///
/// Sellmeier coefficients are stored as [A0, B1, C1, B2, C2, ...] meaning
///   n^2(lambda) = A0 + sum_i  B_i * lambda^2 / (lambda^2 - C_i)
/// with lambda in um and C_i in um^2. Constant models ignore the coefficients.
/// Evaluation outside [valid_lo_um, valid_hi_um] is an error, never an
/// extrapolation.
struct RefractiveModel {
    ModelKind kind = ModelKind::constant;
    double constant_n = 1.0;
    std::vector<double> coefficients;
    double valid_lo_um = 0.0;
    double valid_hi_um = 1e9;
    std::string label = "unnamed";

    static RefractiveModel constant(double n, std::string label = "constant",
                                    double lo_um = 0.0, double hi_um = 1e9) {
        RefractiveModel m;
        m.kind = ModelKind::constant;
        m.constant_n = n;
        m.label = std::move(label);
        m.valid_lo_um = lo_um;
        m.valid_hi_um = hi_um;
        return m;
    }

    static RefractiveModel sellmeier(std::vector<double> coeffs, double lo_um, double hi_um,
                                     std::string label) {
        if (coeffs.empty() || coeffs.size() % 2 == 0)
            throw ConfigError("sellmeier coefficients must be [A0, B1, C1, ...] for '" + label + "'");
        RefractiveModel m;
        m.kind = ModelKind::sellmeier;
        m.coefficients = std::move(coeffs);
        m.valid_lo_um = lo_um;
        m.valid_hi_um = hi_um;
        m.label = std::move(label);
        return m;
    }
};

/// n(lambda). Pure; throws RangeError outside the model's validity window and
/// DataError if the data yields an unphysical index n < 1.
inline double index_at(const RefractiveModel& model, double lambda_um) {
    if (!(lambda_um >= model.valid_lo_um && lambda_um <= model.valid_hi_um))
        throw RangeError("wavelength " + std::to_string(lambda_um) + " um outside valid range [" +
                         std::to_string(model.valid_lo_um) + ", " + std::to_string(model.valid_hi_um) +
                         "] um of medium '" + model.label + "'");
    if (model.kind == ModelKind::constant) return model.constant_n;

    const double l2 = lambda_um * lambda_um;
    double n2 = model.coefficients[0];
    for (std::size_t i = 1; i + 1 < model.coefficients.size(); i += 2)
        n2 += model.coefficients[i] * l2 / (l2 - model.coefficients[i + 1]);
    if (!(n2 >= 1.0))
        throw DataError("medium '" + model.label + "' gives n^2 = " + std::to_string(n2) + " < 1 at " +
                        std::to_string(lambda_um) + " um");
    return std::sqrt(n2);
}

/// A labelled medium of the optical train (air gap, biocell, sample).
struct Medium {
    std::string label;
    RefractiveModel model;
};

/// Uniaxial nonlinear crystal with angle-dependent extraordinary index.
struct UniaxialCrystal {
    RefractiveModel ordinary;
    RefractiveModel extraordinary;
    double cut_angle_deg = 0.0;     // optic axis to propagation direction
    double d_eff_pm_per_v = 0.0;
    double length_mm = 0.0;
    double transparency_lo_um = 0.0;
    double transparency_hi_um = 1e9;

    void validate() const {
        if (cut_angle_deg < 0.0 || cut_angle_deg > 90.0)
            throw ConfigError("crystal cut angle must lie in [0, 90] deg");
        if (d_eff_pm_per_v <= 0.0) throw ConfigError("crystal d_eff must be positive");
        if (length_mm <= 0.0) throw ConfigError("crystal length must be positive");
    }

    void require_transparent(double lambda_um) const {
        if (lambda_um < transparency_lo_um || lambda_um > transparency_hi_um)
            throw RangeError("wavelength " + std::to_string(lambda_um) +
                             " um outside crystal transparency window");
    }
};

/// Index seen by an extraordinary wave propagating at theta from the optic axis:
/// n(theta) = 1 / sqrt(cos^2/n_o^2 + sin^2/n_e^2). Equals n_o at 0 deg, n_e at 90 deg.
inline double extraordinary_index(const UniaxialCrystal& crystal, double lambda_um,
                                  double theta_from_axis_deg) {
    if (theta_from_axis_deg < 0.0 || theta_from_axis_deg > 90.0)
        throw DomainError("propagation angle from optic axis must lie in [0, 90] deg");
    const double n_o = index_at(crystal.ordinary, lambda_um);
    const double n_e = index_at(crystal.extraordinary, lambda_um);
    const double th = deg_to_rad(theta_from_axis_deg);
    const double c = std::cos(th), s = std::sin(th);
    return 1.0 / std::sqrt(c * c / (n_o * n_o) + s * s / (n_e * n_e));
}

/// k = 2 pi n / lambda in rad/um.
inline double wavevector(double n, double lambda_um) {
    if (!(n >= 1.0)) throw DomainError("refractive index must be >= 1");
    if (!(lambda_um > 0.0)) throw DomainError("wavelength must be positive");
    return 2.0 * pi * n / lambda_um;
}

/// Registry of refractive models loaded from a JSON data file. File schema:
///   [ {"label": ..., "kind": "constant"|"sellmeier",
///      "n": ... | "coefficients": [...], "valid_range_um": [lo, hi]}, ... ]
class DispersionLibrary {
public:
    void add(RefractiveModel model) { models_[model.label] = std::move(model); }

    const RefractiveModel& at(const std::string& label) const {
        auto it = models_.find(label);
        if (it == models_.end())
            throw ConfigError("no dispersion entry with label '" + label + "'");
        return it->second;
    }

    bool contains(const std::string& label) const { return models_.count(label) != 0; }

    static DispersionLibrary load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open dispersion file '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("dispersion file '" + path + "': " + e.what());
        }
        return from_json(j, path);
    }

    static DispersionLibrary from_json(const nlohmann::json& j, const std::string& origin = "<json>") {
        if (!j.is_array()) throw ParseError(origin + ": top-level JSON must be an array of entries");
        DispersionLibrary lib;
        for (const auto& e : j) {
            try {
                const std::string label = e.at("label").get<std::string>();
                const std::string kind = e.at("kind").get<std::string>();
                const auto range = e.at("valid_range_um");
                const double lo = range.at(0).get<double>();
                const double hi = range.at(1).get<double>();
                if (kind == "constant") {
                    lib.add(RefractiveModel::constant(e.at("n").get<double>(), label, lo, hi));
                } else if (kind == "sellmeier") {
                    lib.add(RefractiveModel::sellmeier(e.at("coefficients").get<std::vector<double>>(),
                                                       lo, hi, label));
                } else {
                    throw ParseError("unknown kind '" + kind + "'");
                }
            } catch (const nlohmann::json::exception& ex) {
                throw ParseError(origin + ": bad dispersion entry: " + ex.what());
            }
        }
        return lib;
    }

private:
    std::map<std::string, RefractiveModel> models_;
};

}  // namespace qsup
