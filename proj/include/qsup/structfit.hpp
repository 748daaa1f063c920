#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsup/errors.hpp"
#include "qsup/spectrum.hpp"

namespace qsup {

enum class StructureLabel { alpha_helix, beta_sheet, beta_turn, random_coil, unassigned };

inline std::string to_string(StructureLabel s) {
    switch (s) {
        case StructureLabel::alpha_helix: return "alpha_helix";
        case StructureLabel::beta_sheet: return "beta_sheet";
        case StructureLabel::beta_turn: return "beta_turn";
        case StructureLabel::random_coil: return "random_coil";
        case StructureLabel::unassigned: return "unassigned";
    }
    return "?";
}

/// One fitted Gaussian band of the amide I region.
struct PeakComponent {
    double center_cm = 0.0;
    double amplitude = 0.0;
    double sigma_cm = 0.0;
    StructureLabel assignment = StructureLabel::unassigned;
    double area = 0.0;          // amplitude * sigma * sqrt(2 pi)
    double area_percent = 0.0;  // of the summed component areas
};

struct StructureReport {
    std::vector<PeakComponent> components;
    double fit_residual_rms = 0.0;
    double band_window_cm[2] = {0.0, 0.0};
    std::map<std::string, std::string> provenance;
};

/// Subtracts the straight line through the spectrum values at the window
/// endpoints; the result is restricted to the window and its endpoints map
/// to zero.
inline Spectrum baseline_correct(const Spectrum& s, double window_lo_cm, double window_hi_cm) {
    if (window_lo_cm >= window_hi_cm) throw RangeError("baseline window is empty");
    if (window_lo_cm < s.axis.front() || window_hi_cm > s.axis.back())
        throw RangeError("baseline window [" + std::to_string(window_lo_cm) + ", " +
                         std::to_string(window_hi_cm) + "] outside the spectrum axis [" +
                         std::to_string(s.axis.front()) + ", " + std::to_string(s.axis.back()) + "]");
    const double y_lo = interp_linear(s.axis, s.values, window_lo_cm);
    const double y_hi = interp_linear(s.axis, s.values, window_hi_cm);
    const double slope = (y_hi - y_lo) / (window_hi_cm - window_lo_cm);
    Spectrum out;
    out.unit = s.unit;
    out.kind = s.kind;
    out.metadata = s.metadata;
    for (std::size_t i = 0; i < s.axis.size(); ++i) {
        if (s.axis[i] < window_lo_cm || s.axis[i] > window_hi_cm) continue;
        out.axis.push_back(s.axis[i]);
        out.values.push_back(s.values[i] - (y_lo + slope * (s.axis[i] - window_lo_cm)));
    }
    if (out.axis.size() < 2) throw RangeError("baseline window contains fewer than two samples");
    return out;
}

namespace detail {

/// Gaussian elimination with partial pivoting; a is n x n row-major, b the rhs.
/// Solves in place and returns the solution in b. Small systems only.
inline void solve_linear(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) throw FitError("singular normal equations");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double d = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * b[c];
        b[i] = acc / a[i * n + i];
    }
}

/// Savitzky-Golay convolution weights for the d-th derivative at the window
/// centre, polynomial order m over 2*half+1 points of unit spacing.
inline std::vector<double> savgol_weights(int half, int order, int deriv) {
    const int np = 2 * half + 1;
    const std::size_t n = static_cast<std::size_t>(order) + 1;
    // normal equations A^T A c = A^T e_k for each sample k
    std::vector<double> ata(n * n, 0.0);
    for (int k = -half; k <= half; ++k) {
        double pi_ = 1.0;
        std::vector<double> pk(n);
        for (std::size_t i = 0; i < n; ++i) {
            pk[i] = pi_;
            pi_ *= k;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) ata[i * n + j] += pk[i] * pk[j];
    }
    std::vector<double> weights(static_cast<std::size_t>(np));
    double dfact = 1.0;
    for (int i = 2; i <= deriv; ++i) dfact *= i;
    for (int k = -half; k <= half; ++k) {
        std::vector<double> a = ata;
        std::vector<double> rhs(n, 0.0);
        double pi_ = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = pi_;
            pi_ *= k;
        }
        solve_linear(a, rhs, n);
        // rhs now holds the polynomial coefficients of the k-th cardinal fit
        weights[static_cast<std::size_t>(k + half)] = rhs[static_cast<std::size_t>(deriv)] * dfact;
    }
    return weights;
}

}  // namespace detail

/// Savitzky-Golay second derivative. Requires a uniform axis (1e-6 relative);
/// half-window edge samples are dropped from the output.
inline Spectrum second_derivative(const Spectrum& s, int sg_points = 9, int sg_order = 3) {
    if (sg_points < 5 || sg_points % 2 == 0)
        throw ConfigError("Savitzky-Golay window must be an odd integer >= 5");
    if (sg_order < 2) throw ConfigError("Savitzky-Golay order must be >= 2 for a second derivative");
    if (sg_order >= sg_points) throw ConfigError("Savitzky-Golay order must be below the window size");
    if (s.axis.size() < static_cast<std::size_t>(sg_points))
        throw DataError("spectrum shorter than the Savitzky-Golay window");
    const double h = s.axis[1] - s.axis[0];
    for (std::size_t i = 1; i < s.axis.size(); ++i) {
        const double d = s.axis[i] - s.axis[i - 1];
        if (std::abs(d - h) > 1e-6 * std::abs(h))
            throw DataError("non-uniform axis spacing; resample before differentiating");
    }
    const int half = sg_points / 2;
    const auto w = detail::savgol_weights(half, sg_order, 2);

    Spectrum out;
    out.unit = s.unit;
    out.kind = SpectrumKind::second_derivative;
    out.metadata = s.metadata;
    for (std::size_t i = static_cast<std::size_t>(half); i + static_cast<std::size_t>(half) < s.axis.size(); ++i) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k)
            acc += w[static_cast<std::size_t>(k + half)] * s.values[i + static_cast<std::size_t>(k)];
        out.axis.push_back(s.axis[i]);
        out.values.push_back(acc / (h * h));
    }
    return out;
}

/// Candidate band centres from the negative normalized second derivative:
/// local maxima inside the window with prominence >= min_prominence (of the
/// normalized maximum). Returns centres sorted ascending; may be empty.
inline std::vector<double> seed_peaks(const Spectrum& d2, double window_lo_cm, double window_hi_cm,
                                      double min_prominence = 0.05) {
    if (d2.kind != SpectrumKind::second_derivative)
        throw DataError("seed_peaks expects a second-derivative spectrum");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < d2.axis.size(); ++i)
        if (d2.axis[i] >= window_lo_cm && d2.axis[i] <= window_hi_cm) {
            x.push_back(d2.axis[i]);
            y.push_back(-d2.values[i]);
        }
    if (x.size() < 3) return {};
    const double ymax = *std::max_element(y.begin(), y.end());
    if (!(ymax > 0.0)) return {};
    for (double& v : y) v /= ymax;

    std::vector<double> centers;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
        // prominence: climb from the peak to the higher terrain on each side
        double left_min = y[i];
        for (std::size_t k = i; k-- > 0;) {
            if (y[k] > y[i]) break;
            left_min = std::min(left_min, y[k]);
        }
        double right_min = y[i];
        for (std::size_t k = i + 1; k < y.size(); ++k) {
            if (y[k] > y[i]) break;
            right_min = std::min(right_min, y[k]);
        }
        const double prominence = y[i] - std::max(left_min, right_min);
        if (prominence >= min_prominence) centers.push_back(x[i]);
    }
    return centers;
}

struct FitOptions {
    double center_tolerance_cm = 4.0;  // centres constrained to seed +/- tol
    double sigma_min_cm = 2.0;
    double sigma_max_cm = 30.0;
    int max_iterations = 400;
};

/// Least-squares fit of a sum of Gaussians to the (baseline-corrected)
/// spectrum inside the band window. Levenberg-Marquardt with analytic
/// Jacobian; amplitudes >= 0, centres within +/- tolerance of their seed,
/// sigmas inside [sigma_min, sigma_max]. Areas are analytic.
inline StructureReport fit_gaussians(const Spectrum& s, const std::vector<double>& seeds,
                                     double window_lo_cm, double window_hi_cm,
                                     const FitOptions& options = {}) {
    if (seeds.empty()) throw FitError("at least one seed centre is required");
    for (double c : seeds)
        if (c < window_lo_cm || c > window_hi_cm)
            throw FitError("seed centre " + std::to_string(c) + " cm^-1 outside the band window");

    std::vector<double> x, y;
    for (std::size_t i = 0; i < s.axis.size(); ++i)
        if (s.axis[i] >= window_lo_cm && s.axis[i] <= window_hi_cm) {
            x.push_back(s.axis[i]);
            y.push_back(s.values[i]);
        }
    const std::size_t m = x.size();
    const std::size_t K = seeds.size();
    const std::size_t n = 3 * K;  // amp, center, sigma per component
    if (m < n) throw FitError("fewer samples in the window than fit parameters");

    // parameter packing: p[3k] = amplitude, p[3k+1] = centre, p[3k+2] = sigma
    std::vector<double> p(n), lo(n), hi(n);
    for (std::size_t k = 0; k < K; ++k) {
        double a0 = interp_linear(x, y, seeds[k]);
        if (!(a0 > 0.0)) a0 = 1e-6;
        p[3 * k] = a0;
        p[3 * k + 1] = seeds[k];
        p[3 * k + 2] = 10.0;
        lo[3 * k] = 0.0;
        hi[3 * k] = 1e12;
        lo[3 * k + 1] = seeds[k] - options.center_tolerance_cm;
        hi[3 * k + 1] = seeds[k] + options.center_tolerance_cm;
        lo[3 * k + 2] = options.sigma_min_cm;
        hi[3 * k + 2] = options.sigma_max_cm;
    }
    auto clamp_params = [&](std::vector<double>& q) {
        for (std::size_t i = 0; i < n; ++i) q[i] = std::clamp(q[i], lo[i], hi[i]);
    };

    auto residual_norm2 = [&](const std::vector<double>& q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double model = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double t = (x[i] - q[3 * k + 1]) / q[3 * k + 2];
                model += q[3 * k] * std::exp(-0.5 * t * t);
            }
            const double r = y[i] - model;
            acc += r * r;
        }
        return acc;
    };

    double lambda = 1e-3;
    double chi2 = residual_norm2(p);
    bool converged = false;
    for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
        // J^T J and J^T r with analytic derivatives
        std::vector<double> jtj(n * n, 0.0), jtr(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double model = 0.0;
            std::vector<double> grad(n);
            for (std::size_t k = 0; k < K; ++k) {
                const double amp = p[3 * k], c = p[3 * k + 1], sg = p[3 * k + 2];
                const double t = (x[i] - c) / sg;
                const double g = std::exp(-0.5 * t * t);
                model += amp * g;
                grad[3 * k] = g;
                grad[3 * k + 1] = amp * g * t / sg;
                grad[3 * k + 2] = amp * g * t * t / sg;
            }
            const double r = y[i] - model;
            for (std::size_t a = 0; a < n; ++a) {
                jtr[a] += grad[a] * r;
                for (std::size_t b = a; b < n; ++b) jtj[a * n + b] += grad[a] * grad[b];
            }
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a * n + b] = jtj[b * n + a];

        // freeze parameters whose bound is active and whose gradient points
        // outward, so clamped corners converge instead of crawling
        for (std::size_t d = 0; d < n; ++d) {
            const bool at_hi = p[d] >= hi[d] - 1e-12 && jtr[d] > 0.0;
            const bool at_lo = p[d] <= lo[d] + 1e-12 && jtr[d] < 0.0;
            if (at_hi || at_lo) {
                for (std::size_t c = 0; c < n; ++c) {
                    jtj[d * n + c] = 0.0;
                    jtj[c * n + d] = 0.0;
                }
                jtj[d * n + d] = 1.0;
                jtr[d] = 0.0;
            }
        }

        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            std::vector<double> a = jtj, step = jtr;
            for (std::size_t d = 0; d < n; ++d) a[d * n + d] += lambda * std::max(jtj[d * n + d], 1e-12);
            try {
                detail::solve_linear(a, step, n);
            } catch (const FitError&) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = p;
            for (std::size_t d = 0; d < n; ++d) trial[d] += step[d];
            clamp_params(trial);
            const double trial_chi2 = residual_norm2(trial);
            if (trial_chi2 <= chi2) {
                double rel_step = 0.0;
                for (std::size_t d = 0; d < n; ++d)
                    rel_step = std::max(rel_step, std::abs(trial[d] - p[d]) /
                                                      std::max(1.0, std::abs(p[d])));
                const double rel_drop = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
                p = std::move(trial);
                chi2 = trial_chi2;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                // near the optimum steps collapse; near a noise floor the
                // residual stops moving
                if (rel_step < 1e-9 || rel_drop < 1e-8) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) converged = true;  // stalled in a clamped corner counts as done
    }
    if (!converged && chi2 > 1e-20)
        throw FitError("Gaussian fit did not converge; best residual rms = " +
                       std::to_string(std::sqrt(chi2 / m)));

    StructureReport report;
    report.band_window_cm[0] = window_lo_cm;
    report.band_window_cm[1] = window_hi_cm;
    report.fit_residual_rms = std::sqrt(chi2 / m);
    const double sqrt_2pi = std::sqrt(2.0 * pi);
    double total_area = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        PeakComponent c;
        c.amplitude = p[3 * k];
        c.center_cm = p[3 * k + 1];
        c.sigma_cm = p[3 * k + 2];
        c.area = c.amplitude * c.sigma_cm * sqrt_2pi;
        total_area += c.area;
        report.components.push_back(c);
    }
    if (total_area <= 0.0) throw FitError("fit collapsed to zero total area");
    for (auto& c : report.components) c.area_percent = 100.0 * c.area / total_area;
    std::sort(report.components.begin(), report.components.end(),
              [](const PeakComponent& a, const PeakComponent& b) { return a.center_cm < b.center_cm; });
    return report;
}

/// Maps cm^-1 intervals to structure labels. Intervals are half-open [lo, hi).
struct AssignmentTable {
    struct Row {
        double lo_cm, hi_cm;
        StructureLabel label;
    };
    std::vector<Row> rows;

    /// Default intervals consistent with the shipped band assignments:
    /// beta-sheet on both flanks of the amide I region, alpha-helix in the
    /// 1633-1660 core, beta-turn between.
    static AssignmentTable default_table() {
        return AssignmentTable{{{1610.0, 1633.0, StructureLabel::beta_sheet},
                                {1633.0, 1660.0, StructureLabel::alpha_helix},
                                {1660.0, 1685.0, StructureLabel::beta_turn},
                                {1685.0, 1700.0, StructureLabel::beta_sheet}}};
    }

    void validate() const {
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i + 1; j < rows.size(); ++j) {
                const bool disjoint = rows[i].hi_cm <= rows[j].lo_cm || rows[j].hi_cm <= rows[i].lo_cm;
                if (!disjoint)
                    throw ConfigError("assignment intervals overlap near " +
                                      std::to_string(std::max(rows[i].lo_cm, rows[j].lo_cm)) + " cm^-1");
            }
    }

    StructureLabel classify(double center_cm) const {
        for (const auto& r : rows)
            if (center_cm >= r.lo_cm && center_cm < r.hi_cm) return r.label;
        return StructureLabel::unassigned;
    }
};

/// Labels each component by the interval containing its centre.
inline std::vector<PeakComponent> assign_structures(std::vector<PeakComponent> components,
                                                    const AssignmentTable& table) {
    table.validate();
    for (auto& c : components) c.assignment = table.classify(c.center_cm);
    return components;
}

inline nlohmann::json report_to_json(const StructureReport& r) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : r.components)
        comps.push_back({{"center_cm", c.center_cm},
                         {"amplitude", c.amplitude},
                         {"sigma_cm", c.sigma_cm},
                         {"assignment", to_string(c.assignment)},
                         {"area", c.area},
                         {"area_percent", c.area_percent}});
    return nlohmann::json{{"components", comps},
                          {"fit_residual_rms", r.fit_residual_rms},
                          {"band_window_cm", {r.band_window_cm[0], r.band_window_cm[1]}},
                          {"provenance", r.provenance}};
}

/// Table-shaped CSV: position, assignment, percent.
inline void write_report_csv(const StructureReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "position_cm,assignment,area_percent\n";
    for (const auto& c : r.components)
        out << detail::format_double(c.center_cm) << "," << to_string(c.assignment) << ","
            << detail::format_double(c.area_percent) << "\n";
}

/// Fit diagnostics: per-point component curves, model sum and residual.
inline void write_fit_diagnostics_csv(const StructureReport& r, const Spectrum& s,
                                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "axis_cm,value";
    for (std::size_t k = 0; k < r.components.size(); ++k) out << ",component_" << k;
    out << ",model,residual\n";
    for (std::size_t i = 0; i < s.axis.size(); ++i) {
        if (s.axis[i] < r.band_window_cm[0] || s.axis[i] > r.band_window_cm[1]) continue;
        double model = 0.0;
        out << detail::format_double(s.axis[i]) << "," << detail::format_double(s.values[i]);
        for (const auto& c : r.components) {
            const double t = (s.axis[i] - c.center_cm) / c.sigma_cm;
            const double v = c.amplitude * std::exp(-0.5 * t * t);
            model += v;
            out << "," << detail::format_double(v);
        }
        out << "," << detail::format_double(model) << ","
            << detail::format_double(s.values[i] - model) << "\n";
    }
}

}  // namespace qsup
