// End-to-end tests of the qsup binary: subcommand plumbing, file formats and
// exit codes (0 success, 1 computation error, 2 usage/IO error).

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsup/interferometer.hpp"
#include "qsup/spectrum.hpp"

namespace fs = std::filesystem;
using Catch::Approx;

namespace {

const std::string cli = QSUP_CLI_PATH;
const std::string source_dir = QSUP_SOURCE_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qsup_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("ingest converts zero absorbance to unit transmissivity") {
    TempDir tmp;
    write_file(tmp.file("a.csv"), "cm^-1,absorbance\n1500,0\n1600,0\n1700,0\n1800,0\n");
    REQUIRE(run("ingest " + tmp.file("a.csv") + " --out " + tmp.file("tau.csv")) == 0);
    const auto tau = qsup::read_spectrum_csv(tmp.file("tau.csv"));
    CHECK(tau.kind == qsup::SpectrumKind::transmissivity_amplitude);
    for (double v : tau.values) CHECK(v == 1.0);
}

TEST_CASE("ingest reproduces the worked conversion example end to end") {
    TempDir tmp;
    write_file(tmp.file("a.csv"), "cm^-1,absorbance\n1600,0.01\n1700,0.01\n");
    REQUIRE(run("ingest " + tmp.file("a.csv") + " --dp-nm 100 --lm-um 6 --out " +
                tmp.file("tau.csv")) == 0);
    const auto tau = qsup::read_spectrum_csv(tmp.file("tau.csv"));
    CHECK(tau.values[0] == Approx(0.5011872336272722).epsilon(1e-10));
}

TEST_CASE("missing input file exits with the usage/IO code") {
    TempDir tmp;
    CHECK(run("ingest " + tmp.file("missing.csv")) == 2);
}

TEST_CASE("invalid sweep spec exits with the usage/IO code") {
    TempDir tmp;
    write_file(tmp.file("spec.json"), "{ this is not json");
    CHECK(run("sweep " + tmp.file("spec.json")) == 2);
    write_file(tmp.file("spec2.json"), R"({"parameter": "gap_L_a"})");
    CHECK(run("sweep " + tmp.file("spec2.json")) == 2);
}

TEST_CASE("simulate writes map, spectrum, visibility and metadata") {
    TempDir tmp;
    write_file(tmp.file("cfg.json"),
               R"({"grid": {"lambda_lo_nm": 734, "lambda_hi_nm": 740, "n_lambda": 601,
                            "theta_max_deg": 1.4, "n_theta": 101}})");
    REQUIRE(run("simulate --config " + tmp.file("cfg.json") + " --flat-tau 0.7 --out-dir " +
                tmp.path.string()) == 0);
    for (const char* name : {"map.csv", "map.json", "spectrum.csv", "visibility.csv",
                             "visibility.json", "metadata.json"})
        CHECK(fs::exists(tmp.path / name));

    // visibility values are physical and the metadata echoes the geometry
    const auto curve = qsup::read_visibility_csv(tmp.file("visibility.csv"));
    CHECK(curve.points.size() > 5);
    for (const auto& p : curve.points) {
        CHECK(p.visibility >= 0.0);
        CHECK(p.visibility <= 1.0);
    }
    std::ifstream meta(tmp.file("metadata.json"));
    nlohmann::json j;
    meta >> j;
    CHECK(j.contains("geometry"));
    CHECK(j.at("geometry").at("gap_la_mm").get<double>() == -8.75);
    CHECK(j.at("null_gap_prediction_mm").get<double>() == Approx(-6.98129).margin(1e-4));
}

TEST_CASE("simulate accepts an ingested sample file") {
    TempDir tmp;
    REQUIRE(run("ingest " + source_dir + "/data/samples/bsa_24c_absorbance.csv --out " +
                tmp.file("tau.csv")) == 0);
    write_file(tmp.file("cfg.json"),
               R"({"grid": {"lambda_lo_nm": 733, "lambda_hi_nm": 741, "n_lambda": 801,
                            "theta_max_deg": 1.4, "n_theta": 101}})");
    REQUIRE(run("simulate --config " + tmp.file("cfg.json") + " --tau " + tmp.file("tau.csv") +
                " --out-dir " + tmp.path.string()) == 0);
    CHECK(fs::exists(tmp.path / "visibility.csv"));
}

TEST_CASE("compare overlays a visibility curve onto a transmissivity spectrum") {
    TempDir tmp;
    // hand-built inputs with known deviations: tau = 0.5 flat over the idler
    // band, V alternating 0.52 / 0.48 -> mean dev 0.02, max dev 0.02
    write_file(tmp.file("vis.csv"),
               "lambda_mid_nm,visibility,lambda_halfwidth_nm\n"
               "736,0.52,0.1\n737,0.48,0.1\n738,0.52,0.1\n739,0.48,0.1\n");
    write_file(tmp.file("tau.csv"), "um,transmissivity_amplitude\n5.5,0.5\n7.0,0.5\n");
    REQUIRE(run("compare " + tmp.file("vis.csv") + " " + tmp.file("tau.csv") +
                " --lambda-p 660 --out-dir " + tmp.path.string()) == 0);

    std::ifstream stats(tmp.file("compare_stats.json"));
    nlohmann::json j;
    stats >> j;
    CHECK(j.at("points").get<int>() == 4);
    CHECK(j.at("mean_abs_deviation").get<double>() == Approx(0.02).epsilon(1e-12));
    CHECK(j.at("max_abs_deviation").get<double>() == Approx(0.02).epsilon(1e-12));
}

TEST_CASE("compare with disjoint spectral ranges is a coverage error") {
    TempDir tmp;
    write_file(tmp.file("vis.csv"),
               "lambda_mid_nm,visibility,lambda_halfwidth_nm\n736,0.5,0.1\n737,0.5,0.1\n");
    write_file(tmp.file("tau.csv"), "um,transmissivity_amplitude\n2.0,0.5\n3.0,0.5\n");
    CHECK(run("compare " + tmp.file("vis.csv") + " " + tmp.file("tau.csv") + " --out-dir " +
              tmp.path.string()) == 1);
}

TEST_CASE("fit analyses the shipped synthetic sample") {
    TempDir tmp;
    REQUIRE(run("fit " + source_dir + "/data/samples/bsa_24c_absorbance.csv --out-dir " +
                tmp.path.string()) == 0);
    std::ifstream report(tmp.file("report.json"));
    nlohmann::json j;
    report >> j;
    REQUIRE(j.at("components").size() >= 2);
    double total = 0.0;
    bool has_helix = false;
    for (const auto& c : j.at("components")) {
        total += c.at("area_percent").get<double>();
        if (c.at("assignment").get<std::string>() == "alpha_helix") has_helix = true;
    }
    CHECK(total == Approx(100.0).margin(0.1));
    CHECK(has_helix);
    CHECK(fs::exists(tmp.path / "report.csv"));
    CHECK(fs::exists(tmp.path / "fit_components.csv"));
}

TEST_CASE("fit recovers a three-component mixture through the CLI") {
    TempDir tmp;
    // area ratios 8.6 : 78.7 : 12.7 at 1627 / 1655 / 1683 cm^-1
    {
        std::ofstream out(tmp.file("mix.csv"));
        out << "cm^-1,absorbance\n";
        const double sqrt2pi = std::sqrt(2.0 * 3.14159265358979323846);
        const double c[3] = {1627.0, 1655.0, 1683.0};
        const double pct[3] = {8.6, 78.7, 12.7};
        const double sg[3] = {8.0, 10.0, 8.0};
        for (double x = 1590.0; x <= 1720.0 + 1e-9; x += 0.5) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double amp = pct[k] / (sg[k] * sqrt2pi) * 1e-3;
                const double t = (x - c[k]) / sg[k];
                acc += amp * std::exp(-0.5 * t * t);
            }
            out << x << "," << acc << "\n";
        }
    }
    // quantitative areas need the band tails inside the fit window
    write_file(tmp.file("fitcfg.json"), R"({"band_window_cm": [1590, 1720]})");
    REQUIRE(run("fit " + tmp.file("mix.csv") + " --config " + tmp.file("fitcfg.json") +
                " --out-dir " + tmp.path.string()) == 0);
    std::ifstream report(tmp.file("report.json"));
    nlohmann::json j;
    report >> j;
    REQUIRE(j.at("components").size() == 3);
    const double expected[3] = {8.6, 78.7, 12.7};
    const char* labels[3] = {"beta_sheet", "alpha_helix", "beta_turn"};
    for (int k = 0; k < 3; ++k) {
        CHECK(j.at("components")[k].at("area_percent").get<double>() ==
              Approx(expected[k]).margin(0.5));
        CHECK(j.at("components")[k].at("assignment").get<std::string>() == labels[k]);
    }
}

TEST_CASE("fit with a band window outside the data exits nonzero") {
    TempDir tmp;
    write_file(tmp.file("a.csv"), "cm^-1,absorbance\n1600,0.01\n1650,0.02\n1700,0.01\n");
    write_file(tmp.file("cfg.json"), R"({"band_window_cm": [2000, 2100]})");
    CHECK(run("fit " + tmp.file("a.csv") + " --config " + tmp.file("cfg.json") + " --out-dir " +
              tmp.path.string()) == 1);
}

TEST_CASE("one-point sweep runs through the CLI") {
    TempDir tmp;
    // grid must span both analysis windows for beta to be measurable
    write_file(tmp.file("spec.json"),
               R"({"parameter": "gap_L_a", "values": [-8.75], "flat_tau": 0.6,
                   "grid": {"lambda_lo_nm": 732, "lambda_hi_nm": 743, "n_lambda": 1101,
                            "theta_max_deg": 1.4, "n_theta": 151}})");
    REQUIRE(run("sweep " + tmp.file("spec.json") + " --out-dir " + tmp.path.string()) == 0);
    std::ifstream in(tmp.file("sweep.csv"));
    std::string header, row;
    REQUIRE(std::getline(in, header));
    REQUIRE(std::getline(in, row));
    CHECK(row.find("ok") != std::string::npos);
    std::ifstream js(tmp.file("sweep.json"));
    nlohmann::json j;
    js >> j;
    CHECK(j.at("argmax").get<double>() == -8.75);
}

TEST_CASE("dispersion file loading is wired through the environment variable") {
    TempDir tmp;
    // a file that is valid JSON but an empty array: labels resolve to built-ins
    write_file(tmp.file("disp.json"), "[]");
    const std::string cmd = "QSUP_DISPERSION_FILE=" + tmp.file("disp.json") + " " + cli +
                            " simulate --flat-tau 0.5 --out-dir " + tmp.path.string() +
                            " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);

    write_file(tmp.file("bad.json"), "not json");
    const std::string bad = "QSUP_DISPERSION_FILE=" + tmp.file("bad.json") + " " + cli +
                            " simulate --flat-tau 0.5 --out-dir " + tmp.path.string() +
                            " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);
}
