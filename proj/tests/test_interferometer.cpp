#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qsup/defaults.hpp"
#include "qsup/interferometer.hpp"

using namespace qsup;
using Catch::Approx;

namespace {

GeometryConfig paper_geometry() { return defaults::geometry(); }

/// Brute-force section phase with raw arithmetic, independent of the library
/// path: (k_p - sqrt(k_s^2 - q^2) - sqrt(k_i^2 - q^2)) * L with
/// q = k_s,crystal sin(theta_s).
double oracle_section(double n_medium, double lambda_s_um, double theta_s_deg, double length_um) {
    const double lambda_p = 0.66;
    const double lambda_i = 1.0 / (1.0 / lambda_p - 1.0 / lambda_s_um);
    const double l2 = lambda_s_um * lambda_s_um;
    const double no2 = 3.6280 + 2.1686 * l2 / (l2 - 0.1003) + 2.1753 * l2 / (l2 - 950.0);
    const double ks_c = 2.0 * pi * std::sqrt(no2) / lambda_s_um;
    const double q = ks_c * std::sin(theta_s_deg * pi / 180.0);
    const double kp = 2.0 * pi * n_medium / lambda_p;
    const double ks = 2.0 * pi * n_medium / lambda_s_um;
    const double ki = 2.0 * pi * n_medium / lambda_i;
    return (kp - std::sqrt(ks * ks - q * q) - std::sqrt(ki * ki - q * q)) * length_um;
}

}  // namespace

TEST_CASE("sectional mismatch vanishes for zero length") {
    const auto g = paper_geometry();
    CHECK(sectional_mismatch(g, g.air, 740.0, 0.5, 0.0) == 0.0);
}

TEST_CASE("collinear vacuum mismatch vanishes by energy conservation") {
    const auto g = paper_geometry();
    // k_p - k_s - k_i = 2 pi (1/l_p - 1/l_s - 1/l_i) = 0 in any index-1 medium
    CHECK(std::abs(sectional_mismatch(g, g.air, 740.0, 0.0, -8.75)) < 1e-8);
    CHECK(std::abs(sectional_mismatch(g, g.air, 733.0, 0.0, 10.0)) < 1e-8);
}

TEST_CASE("biocell section matches the direct-formula oracle") {
    const auto g = paper_geometry();
    const double got = sectional_mismatch(g, g.biocell, 740.0, 0.5, 10.0);
    CHECK(got == Approx(oracle_section(1.4324, 0.74, 0.5, 10000.0)).epsilon(1e-12));
    // value recorded once from a standalone evaluation
    CHECK(got == Approx(131.61332695313942).epsilon(1e-10));
}

TEST_CASE("total sample phase is the sum of the three sections") {
    auto g = paper_geometry();
    const double total = total_sample_phase(g, 738.0, 0.3);
    const double expected = oracle_section(1.0, 0.738, 0.3, -8750.0) +
                            oracle_section(1.4324, 0.738, 0.3, 10000.0) +
                            oracle_section(1.33, 0.738, 0.3, 6.0);
    CHECK(total == Approx(expected).epsilon(1e-12));
    CHECK(total == Approx(-12.346427873148366).epsilon(1e-10));

    // vacuum train with zero sample path vanishes on axis
    g.air.model = RefractiveModel::constant(1.0, "air");
    g.biocell.model = RefractiveModel::constant(1.0, "biocell");
    g.sample_lm_um = 1e-12;
    CHECK(std::abs(total_sample_phase(g, 738.0, 0.0)) < 1e-8);

    // all lengths zero
    g.gap_la_mm = 0.0;
    g.biocell_lb_mm = 0.0;
    g.sample_lm_um = 0.0;
    CHECK(total_sample_phase(g, 738.0, 0.3) == 0.0);
}

TEST_CASE("evanescent transverse momentum names the medium") {
    auto g = paper_geometry();
    // an implausibly rare medium: idler wavevector below the conserved q
    g.sample.model = RefractiveModel::constant(1.0000001, "thin_gas");
    g.sample.label = "thin_gas";
    // q at 3.2 deg internal exceeds the idler wavevector in an index-1 medium
    // for a 6.2 um idler
    CHECK_THROWS_MATCHES(
        sectional_mismatch(GeometryConfig{g}, g.sample, 740.0, 60.0, 1.0), EvanescentError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("thin_gas")));
}

TEST_CASE("double-pass intensity special cases") {
    PhasePoint p;
    p.delta_rad = 0.0;
    SECTION("tau = 0 reduces to the single-pass intensity bit-exactly") {
        for (double d : {0.0, 0.3, 2.0, 17.5}) {
            p.delta_rad = d;
            CHECK(double_pass_intensity(p, 2.25, 1.234, 0.0) == single_pass_intensity(p, 2.25));
        }
    }
    SECTION("full-contrast destructive fringe") {
        CHECK(double_pass_intensity(p, 2.25, pi, 1.0) == Approx(0.0).margin(1e-25));
    }
    SECTION("tau = 0.5 constructive") {
        CHECK(double_pass_intensity(p, 2.0, 0.0, 0.5) == Approx(3.0).epsilon(1e-15));
    }
    SECTION("tau = 1, fully constructive gives 2 C0") {
        CHECK(double_pass_intensity(p, 2.0, 0.0, 1.0) == Approx(4.0).epsilon(1e-15));
    }
    SECTION("tau outside [0, 1] is a domain error") {
        CHECK_THROWS_AS(double_pass_intensity(p, 1.0, 0.0, 1.2), DomainError);
        CHECK_THROWS_AS(double_pass_intensity(p, 1.0, 0.0, -0.1), DomainError);
    }
}

TEST_CASE("map with tau = 0 equals the single-pass map bit-exactly") {
    const auto g = paper_geometry();
    GridSpec grid{735.0, 740.0, 101, 1.0, 41};
    const auto map = build_map(g, SampleTransmissivity::flat(0.0), grid);
    for (std::size_t i = 0; i < map.lambda_s_nm.size(); ++i)
        for (std::size_t j = 0; j < map.theta_s_deg.size(); ++j) {
            const auto p = make_phase_point(g.crystal, g.pump, map.lambda_s_nm[i], map.theta_s_deg[j]);
            const double n_p =
                extraordinary_index(g.crystal, nm_to_um(g.pump.lambda_p_nm), g.crystal.cut_angle_deg);
            const double n_s = index_at(g.crystal.ordinary, nm_to_um(map.lambda_s_nm[i]));
            const double n_i = index_at(g.crystal.ordinary, p.lambda_i_um);
            const double c0 = efficiency_c0(g.pump, g.crystal, n_p, n_s, n_i, map.lambda_s_nm[i],
                                            p.lambda_i_um);
            CHECK(map.at(i, j) == single_pass_intensity(p, c0));
        }
}

TEST_CASE("map is nonnegative and deterministic across thread counts") {
    const auto g = paper_geometry();
    GridSpec grid{733.0, 741.0, 201, 1.4, 81};
    const auto sample = SampleTransmissivity::flat(0.8);
    const auto m1 = build_map(g, sample, grid, 1);
    const auto m4 = build_map(g, sample, grid, 4);
    REQUIRE(m1.intensity.size() == m4.intensity.size());
    for (std::size_t i = 0; i < m1.intensity.size(); ++i) {
        CHECK(m1.intensity[i] == m4.intensity[i]);
        CHECK(m1.intensity[i] >= 0.0);
    }
}

TEST_CASE("tau axis short of the derived idler range is a coverage error") {
    const auto g = paper_geometry();
    GridSpec grid{733.0, 741.0, 11, 1.0, 5};
    SampleTransmissivity narrow{{6.0, 6.2}, {0.9, 0.9}};
    CHECK_THROWS_MATCHES(build_map(g, narrow, grid), CoverageError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("idler")));
}

TEST_CASE("angle integration of a constant map gives value times span") {
    InterferenceMap map;
    map.lambda_s_nm = {735.0, 736.0, 737.0};
    map.theta_s_deg = {-1.0, -0.5, 0.0, 0.5, 1.0};
    map.intensity.assign(15, 3.0);
    const auto spec = integrate_angles(map);
    const double span_rad = deg_to_rad(2.0);
    for (double v : spec.intensity) CHECK(v == Approx(3.0 * span_rad).epsilon(1e-14));
}

TEST_CASE("angle integration of a zero map is zero") {
    InterferenceMap map;
    map.lambda_s_nm = {735.0, 736.0};
    map.theta_s_deg = {-1.0, 0.0, 1.0};
    map.intensity.assign(6, 0.0);
    const auto spec = integrate_angles(map);
    for (double v : spec.intensity) CHECK(v == 0.0);
}

TEST_CASE("angle integration matches a hand trapezoid on a 5-point row") {
    InterferenceMap map;
    map.lambda_s_nm = {740.0};
    map.theta_s_deg = {-1.0, -0.5, 0.0, 0.5, 1.0};
    map.intensity = {0.0, 1.0, 4.0, 2.0, 0.5};
    const auto spec = integrate_angles(map);
    const double h = deg_to_rad(0.5);
    const double hand = h * (0.5 * 0.0 + 1.0 + 4.0 + 2.0 + 0.5 * 0.5);
    CHECK(spec.intensity[0] == Approx(hand).epsilon(1e-14));
}

TEST_CASE("closed-form fringes extract their modulation depth") {
    FringeSpectrum s;
    const int n = 20001;
    const double omega = 4.0;  // rad per nm: ~2900 samples per fringe period
    for (int i = 0; i < n; ++i) {
        const double lam = 732.0 + 11.0 * i / (n - 1);
        s.lambda_s_nm.push_back(lam);
        s.intensity.push_back(2.5 * (1.0 + 0.5 * std::cos(omega * lam)));
    }
    const auto curve = extract_visibility(s);
    REQUIRE(curve.points.size() >= 10);
    for (const auto& p : curve.points) CHECK(p.visibility == Approx(0.5).margin(1e-6));
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        CHECK(curve.points[i].lambda_mid_nm > curve.points[i - 1].lambda_mid_nm);
    // halfwidth is half a period: pi / omega / 2
    CHECK(curve.points[3].lambda_halfwidth_nm == Approx(pi / omega / 2.0).epsilon(1e-2));
}

TEST_CASE("unit-contrast fringes give visibility 1") {
    FringeSpectrum s;
    const int n = 60001;
    const double omega = 12.0;
    for (int i = 0; i < n; ++i) {
        const double lam = 700.0 + 10.0 * i / (n - 1);
        s.lambda_s_nm.push_back(lam);
        s.intensity.push_back(1.7 * (1.0 + std::cos(omega * lam)));
    }
    const auto curve = extract_visibility(s);
    REQUIRE_FALSE(curve.points.empty());
    for (const auto& p : curve.points) CHECK(p.visibility == Approx(1.0).margin(1e-6));
}

TEST_CASE("ramped modulation matches a brute-force windowed oracle") {
    // two-tone fringe with tau ramping 0.2 -> 0.8 across the span
    FringeSpectrum s;
    const int n = 40001;
    const double lo = 732.0, hi = 743.0, omega = 30.0;
    auto tau_at = [&](double lam) { return 0.2 + 0.6 * (lam - lo) / (hi - lo); };
    for (int i = 0; i < n; ++i) {
        const double lam = lo + (hi - lo) * i / (n - 1);
        s.lambda_s_nm.push_back(lam);
        s.intensity.push_back(1.0 + tau_at(lam) * std::cos(omega * (lam - lo)));
    }
    const auto curve = extract_visibility(s);
    REQUIRE(curve.points.size() > 20);

    // oracle: scan each half-period window of the same sampled data for its
    // extremum, then form (max-min)/(max+min) for adjacent windows
    const double half_period = pi / omega;
    std::vector<double> window_extrema;
    std::vector<double> window_mid;
    for (double w0 = lo; w0 + half_period <= hi + 1e-12; w0 += half_period) {
        double lo_v = 1e300, hi_v = -1e300, lo_l = 0, hi_l = 0;
        for (int i = 0; i < n; ++i) {
            const double lam = s.lambda_s_nm[static_cast<std::size_t>(i)];
            if (lam < w0 || lam >= w0 + half_period) continue;
            const double v = s.intensity[static_cast<std::size_t>(i)];
            if (v < lo_v) { lo_v = v; lo_l = lam; }
            if (v > hi_v) { hi_v = v; hi_l = lam; }
        }
        const bool is_max_window = std::cos(omega * (w0 + half_period / 2.0 - lo)) > 0.0;
        window_extrema.push_back(is_max_window ? hi_v : lo_v);
        window_mid.push_back(is_max_window ? hi_l : lo_l);
    }
    std::size_t matched = 0;
    for (std::size_t k = 0; k + 1 < window_extrema.size(); ++k) {
        const double a = window_extrema[k], b = window_extrema[k + 1];
        const double v_oracle = std::abs(a - b) / (a + b);
        const double mid = (window_mid[k] + window_mid[k + 1]) / 2.0;
        // find the extracted point with the nearest midpoint
        double best = 1e300;
        double v_lib = 0.0;
        for (const auto& p : curve.points)
            if (std::abs(p.lambda_mid_nm - mid) < best) {
                best = std::abs(p.lambda_mid_nm - mid);
                v_lib = p.visibility;
            }
        if (best < half_period / 4.0) {
            CHECK(v_lib == Approx(v_oracle).margin(1e-9));
            ++matched;
        }
    }
    CHECK(matched > 20);
}

TEST_CASE("flat and monotone spectra have no fringes") {
    FringeSpectrum flat;
    for (int i = 0; i < 100; ++i) {
        flat.lambda_s_nm.push_back(732.0 + 0.1 * i);
        flat.intensity.push_back(5.0);
    }
    CHECK_THROWS_AS(extract_visibility(flat), NoFringesError);

    FringeSpectrum ramp = flat;
    for (int i = 0; i < 100; ++i) ramp.intensity[static_cast<std::size_t>(i)] = i;
    CHECK_THROWS_AS(extract_visibility(ramp), NoFringesError);
}

TEST_CASE("weighted visibility arithmetic and window errors") {
    VisibilityCurve curve;
    for (int i = 0; i < 10; ++i)
        curve.points.push_back({733.0 + 0.1 * i, 0.9, 0.05});  // window A region
    for (int i = 0; i < 10; ++i)
        curve.points.push_back({740.0 + 0.1 * i, 0.5, 0.05});  // window B region

    const double wa[2] = {732.9, 734.0};
    const double wb[2] = {739.9, 741.1};
    const auto r = weighted_visibility(curve, wa, wb);
    CHECK(r.v_a == Approx(0.9).epsilon(1e-12));
    CHECK(r.v_b == Approx(0.5).epsilon(1e-12));
    CHECK(r.beta == Approx(0.36).epsilon(1e-12));

    // V_A == V_B gives beta = 0
    const double wa2[2] = {733.0, 733.4};
    const double wb2[2] = {733.5, 733.9};
    CHECK(weighted_visibility(curve, wa2, wb2).beta == Approx(0.0).margin(1e-15));

    const double empty[2] = {750.0, 751.0};
    CHECK_THROWS_MATCHES(weighted_visibility(curve, wa, empty), WindowError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("B")));
}

TEST_CASE("null gap predictor") {
    auto g = paper_geometry();
    CHECK(null_gap_predictor(g) == Approx(-10.0 / 1.4324).epsilon(1e-12));
    CHECK(null_gap_predictor(g) == Approx(-6.98).margin(0.005));

    g.air.model = RefractiveModel::constant(1.4324, "air");
    CHECK(null_gap_predictor(g) == Approx(-10.0).epsilon(1e-12));

    g.air.model = RefractiveModel::constant(1.0, "air");
    g.biocell.model = RefractiveModel::constant(2.0, "biocell");
    CHECK(null_gap_predictor(g) == Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("quadratic phase expansion: quartic residual scaling") {
    // The exact total phase (crystal + sections) against its quadratic-in-q
    // expansion. The residual must grow as theta^4; at 0.1 deg it is below
    // 1e-4 of the phase scale.
    const auto g = paper_geometry();
    const double lambda_p_um = nm_to_um(g.pump.lambda_p_nm);

    auto phases = [&](double lambda_s_nm, double theta_deg) {
        const double ls = nm_to_um(lambda_s_nm);
        const double li = idler_wavelength(g.pump.lambda_p_nm, lambda_s_nm);
        struct Sec {
            double n, L_um;
        };
        const double n_p_c = extraordinary_index(g.crystal, lambda_p_um, g.crystal.cut_angle_deg);
        const double n_s_c = index_at(g.crystal.ordinary, ls);
        const double n_i_c = index_at(g.crystal.ordinary, li);
        const double ks_c = wavevector(n_s_c, ls);
        const double q = ks_c * std::sin(deg_to_rad(theta_deg));

        double exact = 0.0, quad = 0.0;
        auto add = [&](double np_, double ns_, double ni_, double L_um) {
            const double kp = wavevector(np_, lambda_p_um);
            const double ks = wavevector(ns_, ls);
            const double ki = wavevector(ni_, li);
            exact += (kp - std::sqrt(ks * ks - q * q) - std::sqrt(ki * ki - q * q)) * L_um;
            quad += (kp - ks - ki + 0.5 * q * q * (1.0 / ks + 1.0 / ki)) * L_um;
        };
        add(n_p_c, n_s_c, n_i_c, mm_to_um(g.crystal.length_mm));
        add(1.0, 1.0, 1.0, mm_to_um(g.gap_la_mm));
        add(1.4324, 1.4324, 1.4324, mm_to_um(g.biocell_lb_mm));
        add(1.33, 1.33, 1.33, g.sample_lm_um);
        return std::pair<double, double>{exact, quad};
    };

    std::vector<double> thetas{0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 1.0};
    std::vector<double> residuals;
    for (double th : thetas) {
        double worst = 0.0, scale = 0.0;
        for (double ls = 732.0; ls <= 743.0; ls += 0.5) {
            const auto [exact, quad] = phases(ls, th);
            worst = std::max(worst, std::abs(exact - quad));
            scale = std::max(scale, std::abs(exact));
        }
        residuals.push_back(worst);
        if (th <= 0.1 + 1e-12) CHECK(worst / scale < 1e-4);
    }
    // log-log slope across the angle range
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double x = std::log(thetas[i]), y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == Approx(4.0).margin(0.3));
}

TEST_CASE("a spectrally flat sample gives nearly equal window means") {
    // with no absorption band the two window means differ only through the
    // angular-decoherence profile of the exact kinematics, which bounds
    // |beta| well below any absorbing sample's value
    const auto g = paper_geometry();
    const auto curve =
        extract_visibility(integrate_angles(build_map(g, SampleTransmissivity::flat(0.9),
                                                      GridSpec{732.0, 743.0, 1601, 1.4, 301})));
    const auto beta = weighted_visibility(curve, defaults::window_a_nm, defaults::window_b_nm);
    CHECK(std::abs(beta.v_a - beta.v_b) < 0.1);
    CHECK(std::abs(beta.beta) < 0.08);
}

TEST_CASE("deepening a synthetic absorption band lowers V_B and raises V_A - V_B") {
    const auto g = paper_geometry();
    const GridSpec grid{732.0, 743.0, 1201, 1.4, 201};
    const double wa[2] = {defaults::window_a_nm[0], defaults::window_a_nm[1]};
    const double wb[2] = {defaults::window_b_nm[0], defaults::window_b_nm[1]};

    double prev_vb = 2.0, prev_contrast = -1.0;
    for (double tau_min : {0.9, 0.7, 0.5, 0.3, 0.1}) {
        // Gaussian absorption dip centred on window B (idler ~6.07 um)
        SampleTransmissivity sample;
        for (int i = 0; i <= 400; ++i) {
            const double li = 5.5 + (7.5 - 5.5) * i / 400.0;
            const double dip = (1.0 - tau_min) * std::exp(-0.5 * std::pow((li - 6.07) / 0.05, 2.0));
            sample.lambda_i_um.push_back(li);
            sample.tau.push_back(1.0 - dip);
        }
        const auto curve = extract_visibility(integrate_angles(build_map(g, sample, grid)));
        const auto beta = weighted_visibility(curve, wa, wb);
        CHECK(beta.v_b < prev_vb);
        CHECK(beta.v_a - beta.v_b > prev_contrast);
        prev_vb = beta.v_b;
        prev_contrast = beta.v_a - beta.v_b;
    }
}
