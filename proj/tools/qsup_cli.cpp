// qsup: simulate and analyse double-pass SPDC interferometry of mid-IR
// absorbing samples read out in the visible.
//
// Subcommands:
//   ingest    FTIR absorbance CSV -> amplitude transmissivity CSV
//   simulate  interference map, angle-integrated spectrum, visibility curve
//   sweep     1D parameter sweep of the weighted visibility beta
//   fit       amide I second-derivative seeding + Gaussian band fit
//   compare   overlay a visibility curve against a transmissivity spectrum
//
// Exit codes: 0 success, 1 computation error (no fringes, fit failure,
// coverage), 2 usage or I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsup/qsup.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string dispersion_file;
    std::string out_dir = ".";
    unsigned threads = 1;
    bool verbose = false;
};

void log_verbose(const GlobalOptions& g, const std::string& msg) {
    if (g.verbose) std::cerr << "qsup: " << msg << "\n";
}

fs::path out_path(const GlobalOptions& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

qsup::RefractiveModel model_from_library_or(const qsup::DispersionLibrary* lib,
                                            const std::string& label,
                                            const qsup::RefractiveModel& fallback) {
    if (lib && lib->contains(label)) return lib->at(label);
    return fallback;
}

/// Geometry/grid/window configuration, optionally overridden by a JSON file.
struct RunConfig {
    qsup::GeometryConfig geometry = qsup::defaults::geometry();
    qsup::GridSpec grid = qsup::defaults::grid();
    double window_a_nm[2] = {qsup::defaults::window_a_nm[0], qsup::defaults::window_a_nm[1]};
    double window_b_nm[2] = {qsup::defaults::window_b_nm[0], qsup::defaults::window_b_nm[1]};
    qsup::ExtractionOptions extraction;

    void apply_json(const json& j, const qsup::DispersionLibrary* lib) {
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            if (g.contains("gap_la_mm")) geometry.gap_la_mm = g.at("gap_la_mm").get<double>();
            if (g.contains("biocell_lb_mm")) geometry.biocell_lb_mm = g.at("biocell_lb_mm").get<double>();
            if (g.contains("sample_lm_um")) geometry.sample_lm_um = g.at("sample_lm_um").get<double>();
            if (g.contains("crystal")) {
                const auto& c = g.at("crystal");
                if (c.contains("cut_angle_deg"))
                    geometry.crystal.cut_angle_deg = c.at("cut_angle_deg").get<double>();
                if (c.contains("length_mm")) geometry.crystal.length_mm = c.at("length_mm").get<double>();
                if (c.contains("d_eff_pm_per_v"))
                    geometry.crystal.d_eff_pm_per_v = c.at("d_eff_pm_per_v").get<double>();
                if (c.contains("ordinary_label"))
                    geometry.crystal.ordinary =
                        model_from_library_or(lib, c.at("ordinary_label").get<std::string>(),
                                              geometry.crystal.ordinary);
                if (c.contains("extraordinary_label"))
                    geometry.crystal.extraordinary =
                        model_from_library_or(lib, c.at("extraordinary_label").get<std::string>(),
                                              geometry.crystal.extraordinary);
            }
            if (g.contains("pump")) {
                const auto& p = g.at("pump");
                if (p.contains("lambda_p_nm")) geometry.pump.lambda_p_nm = p.at("lambda_p_nm").get<double>();
                if (p.contains("power_mw")) geometry.pump.power_mw = p.at("power_mw").get<double>();
                if (p.contains("s_eff_um2")) geometry.pump.s_eff_um2 = p.at("s_eff_um2").get<double>();
            }
            if (g.contains("media")) {
                const auto& m = g.at("media");
                auto medium = [&](const char* key, qsup::Medium& dst) {
                    if (!m.contains(key)) return;
                    const auto& e = m.at(key);
                    if (e.is_string()) {
                        if (!lib) throw qsup::ConfigError("media label given but no dispersion file loaded");
                        dst.model = lib->at(e.get<std::string>());
                        dst.label = e.get<std::string>();
                    } else if (e.contains("n")) {
                        dst.model = qsup::RefractiveModel::constant(e.at("n").get<double>(), dst.label);
                    }
                };
                medium("air", geometry.air);
                medium("biocell", geometry.biocell);
                medium("sample", geometry.sample);
            }
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("lambda_lo_nm")) grid.lambda_lo_nm = g.at("lambda_lo_nm").get<double>();
            if (g.contains("lambda_hi_nm")) grid.lambda_hi_nm = g.at("lambda_hi_nm").get<double>();
            if (g.contains("n_lambda")) grid.n_lambda = g.at("n_lambda").get<int>();
            if (g.contains("theta_max_deg")) grid.theta_max_deg = g.at("theta_max_deg").get<double>();
            if (g.contains("n_theta")) grid.n_theta = g.at("n_theta").get<int>();
        }
        if (j.contains("windows")) {
            const auto& w = j.at("windows");
            if (w.contains("A")) {
                window_a_nm[0] = w.at("A").at(0).get<double>();
                window_a_nm[1] = w.at("A").at(1).get<double>();
            }
            if (w.contains("B")) {
                window_b_nm[0] = w.at("B").at(0).get<double>();
                window_b_nm[1] = w.at("B").at(1).get<double>();
            }
        }
        if (j.contains("smoothing_width"))
            extraction.smoothing_width = j.at("smoothing_width").get<int>();
    }

    json echo() const {
        return json{{"geometry", qsup::geometry_to_json(geometry)},
                    {"grid",
                     {{"lambda_lo_nm", grid.lambda_lo_nm},
                      {"lambda_hi_nm", grid.lambda_hi_nm},
                      {"n_lambda", grid.n_lambda},
                      {"theta_max_deg", grid.theta_max_deg},
                      {"n_theta", grid.n_theta}}},
                    {"windows",
                     {{"A", {window_a_nm[0], window_a_nm[1]}}, {"B", {window_b_nm[0], window_b_nm[1]}}}},
                    {"smoothing_width", extraction.smoothing_width}};
    }
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qsup::ParseError("cannot open '" + path + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw qsup::ParseError(path + ": " + e.what());
    }
}

std::optional<qsup::DispersionLibrary> maybe_load_library(const GlobalOptions& g) {
    const std::string path = qsup::defaults::dispersion_path(g.dispersion_file);
    if (path.empty()) return std::nullopt;
    log_verbose(g, "loading dispersion data from " + path);
    return qsup::DispersionLibrary::load(path);
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const GlobalOptions& g, const std::string& input, const std::string& output,
               const qsup::AtrConversionConfig& conv, const std::string& reference,
               double reference_scale, std::optional<std::pair<double, double>> baseline) {
    qsup::Spectrum a = qsup::read_spectrum(input);
    if (!reference.empty()) {
        const qsup::Spectrum ref = qsup::read_spectrum(reference);
        for (std::size_t i = 0; i < a.axis.size(); ++i)
            a.values[i] -= reference_scale * qsup::interp_linear(ref.axis, ref.values, a.axis[i]);
    }
    if (baseline) a = qsup::baseline_correct(a, baseline->first, baseline->second);
    for (double& v : a.values) v = std::max(v, 0.0);  // numeric dust from baseline subtraction
    a.kind = qsup::SpectrumKind::absorbance;
    for (const auto& w : qsup::amide_band_warnings(a)) std::cerr << "qsup: warning: " << w << "\n";
    const qsup::Spectrum tau = qsup::atr_to_transmissivity(a, conv);
    const std::string out =
        output.empty() ? out_path(g, "transmissivity.csv").string() : output;
    qsup::write_spectrum_csv(tau, out);
    // sidecar JSON carries the conversion parameters the CSV cannot
    std::string sidecar = out;
    if (sidecar.size() > 4 && sidecar.substr(sidecar.size() - 4) == ".csv")
        sidecar = sidecar.substr(0, sidecar.size() - 4);
    std::ofstream(sidecar + ".json") << qsup::spectrum_to_json(tau).dump(2) << "\n";
    log_verbose(g, "wrote transmissivity spectrum");
    return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOptions& g, const RunConfig& cfg, const qsup::SampleTransmissivity& tau) {
    const qsup::InterferenceMap map = qsup::build_map(cfg.geometry, tau, cfg.grid, g.threads);
    const qsup::FringeSpectrum fringe = qsup::integrate_angles(map);
    const qsup::VisibilityCurve curve = qsup::extract_visibility(fringe, cfg.extraction);

    const json meta = cfg.echo();
    qsup::write_map_csv(map, out_path(g, "map.csv").string());
    std::ofstream(out_path(g, "map.json")) << qsup::map_to_json(map, meta).dump(2) << "\n";
    qsup::write_fringe_csv(fringe, out_path(g, "spectrum.csv").string());
    qsup::write_visibility_csv(curve, out_path(g, "visibility.csv").string());
    std::ofstream(out_path(g, "visibility.json")) << qsup::visibility_to_json(curve, meta).dump(2) << "\n";

    json metadata = meta;
    try {
        const qsup::BetaResult beta = qsup::weighted_visibility(curve, cfg.window_a_nm, cfg.window_b_nm);
        metadata["beta"] = {{"beta", beta.beta}, {"V_A", beta.v_a}, {"V_B", beta.v_b}};
    } catch (const qsup::WindowError& e) {
        metadata["beta"] = nullptr;
        std::cerr << "qsup: warning: " << e.what() << "\n";
    }
    metadata["null_gap_prediction_mm"] = qsup::null_gap_predictor(cfg.geometry);
    std::ofstream(out_path(g, "metadata.json")) << metadata.dump(2) << "\n";
    log_verbose(g, "wrote map, spectrum, visibility and metadata");
    return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const GlobalOptions& g, const std::string& spec_path) {
    const json j = load_json_file(spec_path);
    const auto lib = maybe_load_library(g);

    RunConfig cfg;
    cfg.apply_json(j, lib ? &*lib : nullptr);

    qsup::SweepSpec spec;
    spec.base = cfg.geometry;
    spec.grid = cfg.grid;
    spec.window_a_nm[0] = cfg.window_a_nm[0];
    spec.window_a_nm[1] = cfg.window_a_nm[1];
    spec.window_b_nm[0] = cfg.window_b_nm[0];
    spec.window_b_nm[1] = cfg.window_b_nm[1];
    spec.extraction = cfg.extraction;
    spec.threads = g.threads;

    spec.parameter = qsup::sweep_parameter_from_string(j.at("parameter").get<std::string>());
    if (j.contains("values")) {
        spec.values = j.at("values").get<std::vector<double>>();
    } else if (j.contains("range")) {
        const auto& r = j.at("range");
        spec.values = qsup::SweepSpec::linspace(r.at("start").get<double>(), r.at("stop").get<double>(),
                                                r.at("count").get<int>());
    } else {
        // shipped default ranges per parameter
        switch (spec.parameter) {
            case qsup::SweepParameter::crystal_L:
                spec.values = qsup::SweepSpec::linspace(1.0, 10.0, 19);
                break;
            case qsup::SweepParameter::sample_L_m:
                spec.values = qsup::SweepSpec::linspace(1.0, 20.0, 20);
                break;
            case qsup::SweepParameter::gap_L_a:
                spec.values = qsup::SweepSpec::linspace(-12.0, -4.0, 33);
                break;
        }
    }

    if (j.contains("sample_file")) {
        const qsup::Spectrum s = qsup::read_spectrum(j.at("sample_file").get<std::string>());
        spec.sample = qsup::SampleTransmissivity::from_spectrum(s, spec.base.pump.lambda_p_nm);
    } else if (j.contains("flat_tau")) {
        spec.sample = qsup::SampleTransmissivity::flat(j.at("flat_tau").get<double>());
    } else {
        throw qsup::ConfigError("sweep spec needs 'sample_file' or 'flat_tau'");
    }

    const qsup::SweepResult result = qsup::run_sweep(spec);
    qsup::write_sweep_csv(result, out_path(g, "sweep.csv").string());
    json echo = cfg.echo();
    echo["parameter"] = qsup::to_string(spec.parameter);
    std::ofstream(out_path(g, "sweep.json")) << qsup::summarize(result, echo).dump(2) << "\n";
    if (result.argmax)
        std::cout << "argmax " << *result.argmax << "\n";
    if (!result.null_points.empty()) {
        std::cout << "null_points";
        for (double v : result.null_points) std::cout << " " << v;
        std::cout << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- fit

int cmd_fit(const GlobalOptions& g, const std::string& input, const std::string& fit_config) {
    double window[2] = {1600.0, 1700.0};
    int sg_points = 9, sg_order = 3;
    double min_prominence = 0.05;
    qsup::FitOptions fopt;
    qsup::AssignmentTable table = qsup::AssignmentTable::default_table();
    if (!fit_config.empty()) {
        const json j = load_json_file(fit_config);
        if (j.contains("band_window_cm")) {
            window[0] = j.at("band_window_cm").at(0).get<double>();
            window[1] = j.at("band_window_cm").at(1).get<double>();
        }
        if (j.contains("sg_points")) sg_points = j.at("sg_points").get<int>();
        if (j.contains("sg_order")) sg_order = j.at("sg_order").get<int>();
        if (j.contains("min_prominence")) min_prominence = j.at("min_prominence").get<double>();
        if (j.contains("center_tolerance_cm"))
            fopt.center_tolerance_cm = j.at("center_tolerance_cm").get<double>();
        if (j.contains("assignment_table")) {
            table.rows.clear();
            for (const auto& row : j.at("assignment_table"))
                table.rows.push_back({row.at("lo_cm").get<double>(), row.at("hi_cm").get<double>(),
                                      [&] {
                                          const std::string s = row.at("label").get<std::string>();
                                          if (s == "alpha_helix") return qsup::StructureLabel::alpha_helix;
                                          if (s == "beta_sheet") return qsup::StructureLabel::beta_sheet;
                                          if (s == "beta_turn") return qsup::StructureLabel::beta_turn;
                                          if (s == "random_coil") return qsup::StructureLabel::random_coil;
                                          throw qsup::ConfigError("unknown structure label '" + s + "'");
                                      }()});
        }
    }

    const qsup::Spectrum raw = qsup::read_spectrum(input);
    const qsup::Spectrum corrected = qsup::baseline_correct(raw, window[0], window[1]);
    const qsup::Spectrum d2 = qsup::second_derivative(corrected, sg_points, sg_order);
    const auto seeds = qsup::seed_peaks(d2, window[0], window[1], min_prominence);
    if (seeds.empty()) throw qsup::FitError("no candidate bands found in the window");
    qsup::StructureReport report = qsup::fit_gaussians(corrected, seeds, window[0], window[1], fopt);
    report.components = qsup::assign_structures(report.components, table);
    for (const auto& [k, v] : raw.metadata) report.provenance[k] = v;
    report.provenance["source"] = input;

    std::ofstream(out_path(g, "report.json")) << qsup::report_to_json(report).dump(2) << "\n";
    qsup::write_report_csv(report, out_path(g, "report.csv").string());
    qsup::write_fit_diagnostics_csv(report, corrected, out_path(g, "fit_components.csv").string());
    for (const auto& c : report.components)
        std::cout << c.center_cm << " cm^-1  " << qsup::to_string(c.assignment) << "  "
                  << c.area_percent << "%\n";
    return 0;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const GlobalOptions& g, const std::string& visibility_path, const std::string& tau_path,
                double lambda_p_nm) {
    const qsup::VisibilityCurve curve = qsup::read_visibility_csv(visibility_path);
    const qsup::Spectrum tau_s = qsup::read_spectrum(tau_path);
    const qsup::Spectrum tau_um = qsup::convert_axis(tau_s, qsup::AxisUnit::micrometre, lambda_p_nm);

    std::ofstream out(out_path(g, "compare.csv"));
    out << "lambda_mid_nm,lambda_i_um,visibility,tau,abs_deviation\n";
    double sum = 0.0, worst = 0.0;
    int n = 0;
    for (const auto& p : curve.points) {
        const double li = qsup::idler_from_signal_um(qsup::nm_to_um(lambda_p_nm),
                                                     qsup::nm_to_um(p.lambda_mid_nm));
        const double t = qsup::interp_linear(tau_um.axis, tau_um.values, li);  // CoverageError if outside
        const double dev = std::abs(p.visibility - t);
        sum += dev;
        worst = std::max(worst, dev);
        ++n;
        out << qsup::detail::format_double(p.lambda_mid_nm) << "," << qsup::detail::format_double(li)
            << "," << qsup::detail::format_double(p.visibility) << "," << qsup::detail::format_double(t)
            << "," << qsup::detail::format_double(dev) << "\n";
    }
    const json stats{{"points", n}, {"mean_abs_deviation", sum / n}, {"max_abs_deviation", worst}};
    std::ofstream(out_path(g, "compare_stats.json")) << stats.dump(2) << "\n";
    std::cout << "mean |V - tau| = " << sum / n << "\nmax  |V - tau| = " << worst << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-pass SPDC interferometer simulation and mid-IR spectral analysis"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions g;
    app.add_option("--dispersion", g.dispersion_file, "dispersion data JSON (env QSUP_DISPERSION_FILE)");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "worker threads for map rows / sweep points");
    app.add_flag("--verbose", g.verbose, "log progress to stderr");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "absorbance CSV -> amplitude transmissivity CSV");
    std::string in_file, out_file, reference;
    double reference_scale = 1.0;
    qsup::AtrConversionConfig conv;
    std::vector<double> baseline_window;
    ingest->add_option("input", in_file, "absorbance spectrum (CSV or JSON)")->required();
    ingest->add_option("--out", out_file, "output CSV path");
    ingest->add_option("--dp-nm", conv.penetration_depth_nm, "ATR penetration depth (nm)");
    ingest->add_option("--lm-um", conv.sample_path_um, "sample optical path (um)");
    ingest->add_option("--pass-count", conv.pass_count, "idler passes through the sample");
    ingest->add_option("--reference", reference, "reference spectrum to subtract");
    ingest->add_option("--reference-scale", reference_scale, "scale factor for the reference");
    ingest->add_option("--baseline", baseline_window, "baseline window lo hi (axis units)")
        ->expected(2);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "interference map + fringe spectrum + visibility");
    std::string config_file, tau_file;
    double flat_tau = -1.0;
    simulate->add_option("--config", config_file, "run configuration JSON");
    simulate->add_option("--tau", tau_file, "transmissivity spectrum (CSV or JSON)");
    simulate->add_option("--flat-tau", flat_tau, "spectrally flat transmissivity in [0, 1]");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "1D parameter sweep of beta");
    std::string sweep_spec;
    sweep->add_option("spec", sweep_spec, "sweep specification JSON")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "secondary-structure Gaussian band fit");
    std::string fit_input, fit_config;
    fit->add_option("input", fit_input, "absorbance spectrum (CSV or JSON)")->required();
    fit->add_option("--config", fit_config, "fit configuration JSON");

    // compare
    auto* compare = app.add_subcommand("compare", "visibility curve vs transmissivity overlay");
    std::string cmp_vis, cmp_tau;
    double cmp_lambda_p = 660.0;
    compare->add_option("visibility", cmp_vis, "visibility curve CSV")->required();
    compare->add_option("tau", cmp_tau, "transmissivity spectrum (CSV or JSON)")->required();
    compare->add_option("--lambda-p", cmp_lambda_p, "pump wavelength (nm) for axis alignment");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            std::optional<std::pair<double, double>> bl;
            if (baseline_window.size() == 2) bl = {baseline_window[0], baseline_window[1]};
            return cmd_ingest(g, in_file, out_file, conv, reference, reference_scale, bl);
        }
        if (*simulate) {
            const auto lib = maybe_load_library(g);
            RunConfig cfg;
            if (!config_file.empty()) cfg.apply_json(load_json_file(config_file), lib ? &*lib : nullptr);
            qsup::SampleTransmissivity tau = qsup::SampleTransmissivity::flat(1.0);
            if (!tau_file.empty()) {
                tau = qsup::SampleTransmissivity::from_spectrum(qsup::read_spectrum(tau_file),
                                                                cfg.geometry.pump.lambda_p_nm);
            } else if (flat_tau >= 0.0) {
                tau = qsup::SampleTransmissivity::flat(flat_tau);
            }
            return cmd_simulate(g, cfg, tau);
        }
        if (*sweep) return cmd_sweep(g, sweep_spec);
        if (*fit) return cmd_fit(g, fit_input, fit_config);
        if (*compare) return cmd_compare(g, cmp_vis, cmp_tau, cmp_lambda_p);
    } catch (const qsup::ParseError& e) {
        std::cerr << "qsup: error: " << e.what() << "\n";
        return 2;
    } catch (const qsup::ConfigError& e) {
        std::cerr << "qsup: error: " << e.what() << "\n";
        return 2;
    } catch (const qsup::Error& e) {
        std::cerr << "qsup: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "qsup: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
