#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qsup/interferometer.hpp"

namespace qsup {

enum class SweepParameter { crystal_L, sample_L_m, gap_L_a };

inline std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::crystal_L: return "crystal_L";
        case SweepParameter::sample_L_m: return "sample_L_m";
        case SweepParameter::gap_L_a: return "gap_L_a";
    }
    return "?";
}

inline SweepParameter sweep_parameter_from_string(const std::string& s) {
    if (s == "crystal_L") return SweepParameter::crystal_L;
    if (s == "sample_L_m") return SweepParameter::sample_L_m;
    if (s == "gap_L_a") return SweepParameter::gap_L_a;
    throw ConfigError("unknown sweep parameter '" + s + "' (crystal_L | sample_L_m | gap_L_a)");
}

/// One-dimensional sweep description. Units follow the parameter: mm for
/// crystal_L and gap_L_a, um for sample_L_m.
struct SweepSpec {
    SweepParameter parameter = SweepParameter::gap_L_a;
    std::vector<double> values;
    GeometryConfig base;
    SampleTransmissivity sample;
    GridSpec grid;
    double window_a_nm[2] = {732.1, 734.0};
    double window_b_nm[2] = {739.8, 741.3};
    ExtractionOptions extraction;
    unsigned threads = 1;

    void validate() const {
        if (values.size() < 1) throw ConfigError("sweep needs at least one value");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1]))
                throw ConfigError("sweep values must be strictly increasing");
        base.validate();
        grid.validate();
        sample.validate();
    }

    static std::vector<double> linspace(double start, double stop, int count) {
        if (count < 2) throw ConfigError("sweep linspace needs count >= 2");
        std::vector<double> v(static_cast<std::size_t>(count));
        const double step = (stop - start) / (count - 1);
        for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = start + step * i;
        return v;
    }
};

enum class PointStatus { ok, no_fringes };

struct SweepPoint {
    double value = 0.0;
    double beta = 0.0;
    double v_a = 0.0;
    double v_b = 0.0;
    double mean_visibility = 0.0;  // over all extracted pairs, diagnostic
    PointStatus status = PointStatus::ok;
};

struct SweepResult {
    std::vector<SweepPoint> points;             // ordered by value
    std::optional<double> argmax;               // value of the ok point with maximal beta
    std::vector<double> null_points;            // values with status no_fringes
};

/// Applies the swept parameter to a copy of the base configuration. For
/// sample_L_m the transmissivity is rescaled from the base path via the
/// Beer-Lambert exponent.
inline void apply_sweep_value(SweepParameter parameter, double value, GeometryConfig& geometry,
                              SampleTransmissivity& sample, const GeometryConfig& base,
                              const SampleTransmissivity& base_sample) {
    switch (parameter) {
        case SweepParameter::crystal_L:
            geometry.crystal.length_mm = value;
            break;
        case SweepParameter::gap_L_a:
            geometry.gap_la_mm = value;
            break;
        case SweepParameter::sample_L_m:
            geometry.sample_lm_um = value;
            sample = base_sample.rescaled_to_path(value, base.sample_lm_um);
            break;
    }
}

/// Runs the full pipeline (map -> angle integration -> extraction -> beta)
/// at one parameter value.
inline SweepPoint evaluate_sweep_point(const SweepSpec& spec, double value) {
    GeometryConfig geometry = spec.base;
    SampleTransmissivity sample = spec.sample;
    apply_sweep_value(spec.parameter, value, geometry, sample, spec.base, spec.sample);

    SweepPoint point;
    point.value = value;
    try {
        const InterferenceMap map = build_map(geometry, sample, spec.grid);
        const FringeSpectrum fringe = integrate_angles(map);
        const VisibilityCurve curve = extract_visibility(fringe, spec.extraction);
        double acc = 0.0;
        for (const auto& p : curve.points) acc += p.visibility;
        point.mean_visibility = acc / static_cast<double>(curve.points.size());
        const BetaResult beta = weighted_visibility(curve, spec.window_a_nm, spec.window_b_nm);
        point.beta = beta.beta;
        point.v_a = beta.v_a;
        point.v_b = beta.v_b;
        point.status = PointStatus::ok;
    } catch (const NoFringesError&) {
        point.status = PointStatus::no_fringes;
    } catch (const WindowError&) {
        // fringes exist but none fall inside a beta window: no measurable beta
        point.status = PointStatus::no_fringes;
    }
    return point;
}

/// Evaluates every sweep value. Points are independent; with threads > 1 they
/// are evaluated concurrently and assembled in value order, so the result is
/// identical to a sequential run.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.points.resize(spec.values.size());

    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto work = [&](std::size_t i) {
        try {
            result.points[i] = evaluate_sweep_point(spec, spec.values[i]);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (spec.threads <= 1) {
        for (std::size_t i = 0; i < spec.values.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        const unsigned n = std::min<unsigned>(spec.threads, std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < spec.values.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    bool any_ok = false;
    double best = -1e300;
    for (const auto& p : result.points) {
        if (p.status == PointStatus::ok) {
            any_ok = true;
            if (p.beta > best) {
                best = p.beta;
                result.argmax = p.value;
            }
        } else {
            result.null_points.push_back(p.value);
        }
    }
    if (!any_ok && result.points.empty())
        throw DomainError("sweep produced no points");
    return result;
}

inline void write_sweep_csv(const SweepResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "value,beta,V_A,V_B,mean_visibility,status\n";
    for (const auto& p : r.points) {
        out << detail::format_double(p.value) << ",";
        if (p.status == PointStatus::ok)
            out << detail::format_double(p.beta) << "," << detail::format_double(p.v_a) << ","
                << detail::format_double(p.v_b) << "," << detail::format_double(p.mean_visibility);
        else
            out << ",,,";
        out << "," << (p.status == PointStatus::ok ? "ok" : "no_fringes") << "\n";
    }
}

/// Summary JSON: argmax, beta at argmax, null points and the full curve,
/// plus a configuration echo provided by the caller.
inline nlohmann::json summarize(const SweepResult& r, const nlohmann::json& config_echo) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json jp{{"value", p.value},
                          {"status", p.status == PointStatus::ok ? "ok" : "no_fringes"}};
        if (p.status == PointStatus::ok) {
            jp["beta"] = p.beta;
            jp["V_A"] = p.v_a;
            jp["V_B"] = p.v_b;
            jp["mean_visibility"] = p.mean_visibility;
        }
        points.push_back(jp);
    }
    nlohmann::json j{{"points", points}, {"null_points", r.null_points}, {"config", config_echo}};
    if (r.argmax) {
        j["argmax"] = *r.argmax;
        for (const auto& p : r.points)
            if (p.status == PointStatus::ok && p.value == *r.argmax) j["beta_at_argmax"] = p.beta;
    } else {
        j["argmax"] = nullptr;
    }
    return j;
}

}  // namespace qsup
