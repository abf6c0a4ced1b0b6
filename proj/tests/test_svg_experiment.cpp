#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ctsid/experiment.hpp"
#include "ctsid/svg_plot.hpp"

#include <nlohmann/json.hpp>

using namespace ctsid;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SweepSpec tiny_sweep() {
    SweepSpec spec;
    spec.scenario = preset_scenario("paper-setting2");
    spec.methods = {method_from_name("srivc", false), method_from_name("clsrivc", false)};
    spec.sample_sizes = {300, 600};
    spec.runs_per_point = 3;
    spec.master_seed = 11;
    spec.model_n = 2;
    spec.model_m = 1;
    return spec;
}

}  // namespace

TEST_CASE("svg plots are well formed with and without data") {
    const fs::path dir = fs::temp_directory_path() / "ctsid_svg_test";
    fs::create_directories(dir);
    PlotPanel panel;
    panel.title = "demo";
    panel.log_x = true;
    panel.series.push_back({"series", {1.0, 10.0, 100.0}, {0.5, 0.25, 0.125}});
    panel.reference_lines.push_back(0.3);
    write_svg_plot(dir / "with_data.svg", "demo plot", {panel});
    const std::string with_data = slurp(dir / "with_data.svg");
    CHECK(with_data.find("<svg") != std::string::npos);
    CHECK(with_data.find("</svg>") != std::string::npos);
    CHECK(with_data.find("polyline") != std::string::npos);

    write_svg_plot(dir / "empty.svg", "empty plot", {PlotPanel{}});
    const std::string empty = slurp(dir / "empty.svg");
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("</svg>") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("logarithmic grids hit their endpoints exactly once each") {
    const std::vector<int> sizes = log_spaced_sizes(200, 200000, 40);
    REQUIRE(!sizes.empty());
    CHECK(sizes.front() == 200);
    CHECK(sizes.back() == 200000);
    for (size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i] > sizes[i - 1]);
    CHECK(sizes.size() <= 40);

    const std::vector<double> values = log_spaced_values(1e-3, 1e3, 8);
    REQUIRE(values.size() == 8);
    CHECK(values.front() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(values.back() == doctest::Approx(1e3).epsilon(1e-12));
    const std::vector<int> single = log_spaced_sizes(500, 600, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 500);
    CHECK_THROWS_AS(log_spaced_sizes(500, 500, 10), std::invalid_argument);
}

TEST_CASE("method names resolve to instruments by controller domain") {
    CHECK(method_from_name("srivc", true).kind == InstrumentKind::model_output);
    CHECK(method_from_name("srivc", false).kind == InstrumentKind::model_output);
    CHECK(method_from_name("clsrivc", true).kind == InstrumentKind::reference_ct_sensitivity);
    CHECK(method_from_name("clsrivc", false).kind == InstrumentKind::reference_dt_sensitivity);
    CHECK_FALSE(method_from_name("srivc", true).oversampled);
    CHECK(method_from_name("srivc-os", true).oversampled);
    CHECK(method_from_name("clsrivc-os", true).oversampled);
    CHECK(method_from_name("clsrivc-os", true).kind == InstrumentKind::reference_ct_sensitivity);
    CHECK_THROWS_AS(method_from_name("riv", true), std::invalid_argument);
    CHECK_THROWS_AS(method_from_name("", true), std::invalid_argument);
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
    const SweepSpec spec = tiny_sweep();
    const SweepReport a = run_consistency_sweep(spec);
    const SweepReport b = run_consistency_sweep(spec);
    SweepSpec threaded = spec;
    threaded.jobs = 3;
    const SweepReport c = run_consistency_sweep(threaded);
    REQUIRE(a.cells.size() == 2);
    REQUIRE(a.cells[0].size() == 2);
    for (size_t mi = 0; mi < a.cells.size(); ++mi) {
        for (size_t s = 0; s < a.cells[mi].size(); ++s) {
            CHECK((a.cells[mi][s].mean - b.cells[mi][s].mean).cwiseAbs().maxCoeff() == 0.0);
            CHECK((a.cells[mi][s].mean - c.cells[mi][s].mean).cwiseAbs().maxCoeff() == 0.0);
            CHECK(a.cells[mi][s].converged_runs == c.cells[mi][s].converged_runs);
        }
    }
    CHECK(a.theta_true.size() == 4);
}

TEST_CASE("a sweep records failures without inventing numbers") {
    SweepSpec spec = tiny_sweep();
    spec.model_m = 3;  // m > n: every estimate call is rejected
    spec.sample_sizes = {300};
    const SweepReport rep = run_consistency_sweep(spec);
    const SweepCell& cell = rep.cells[0][0];
    CHECK(cell.converged_runs == 0);
    CHECK(cell.failed_runs == spec.runs_per_point);
    CHECK_FALSE(cell.valid);
    CHECK(std::isnan(cell.mean(0)));
    CHECK(std::isnan(cell.variance(0)));
}

TEST_CASE("sweep specs reject malformed grids") {
    SweepSpec spec = tiny_sweep();
    spec.sample_sizes = {600, 300};
    CHECK_THROWS_AS(run_consistency_sweep(spec), std::invalid_argument);
    spec = tiny_sweep();
    spec.methods.clear();
    CHECK_THROWS_AS(run_consistency_sweep(spec), std::invalid_argument);
    spec = tiny_sweep();
    spec.methods[0].oversampled = true;  // scenario has oversample_m = 1
    CHECK_THROWS_AS(run_consistency_sweep(spec), std::invalid_argument);
}

TEST_CASE("sweep artifacts round-trip the in-memory report") {
    const SweepSpec spec = tiny_sweep();
    const SweepReport rep = run_consistency_sweep(spec);
    const fs::path dir = fs::temp_directory_path() / "ctsid_sweep_artifacts";
    fs::remove_all(dir);
    const std::vector<std::string> files = emit_sweep_report(rep, dir, 4, 5);
    for (const char* name : {"fig4.csv", "fig4.svg", "fig5.csv", "fig5.svg", "sweep_summary.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir / name));
    }
    CHECK(files.size() == 5);

    // Re-parse the mean CSV: header names every method/parameter pair, and
    // the %.17g values reproduce the report bit for bit.
    std::istringstream csv(slurp(dir / "fig4.csv"));
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "N,srivc_a1_mean,srivc_a2_mean,srivc_b0_mean,srivc_b1_mean,"
                    "clsrivc_a1_mean,clsrivc_a2_mean,clsrivc_b0_mean,clsrivc_b1_mean");
    for (size_t s = 0; s < rep.sample_sizes.size(); ++s) {
        std::string line;
        REQUIRE(std::getline(csv, line));
        std::istringstream cells(line);
        std::string field;
        REQUIRE(std::getline(cells, field, ','));
        CHECK(std::stoi(field) == rep.sample_sizes[s]);
        for (size_t mi = 0; mi < rep.cells.size(); ++mi) {
            for (long k = 0; k < rep.cells[mi][s].mean.size(); ++k) {
                REQUIRE(std::getline(cells, field, ','));
                CHECK(std::strtod(field.c_str(), nullptr) == rep.cells[mi][s].mean(k));
            }
        }
    }

    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "sweep_summary.json"));
    CHECK(summary.at("model_n").get<int>() == 2);
    CHECK(summary.at("model_m").get<int>() == 1);
    CHECK(summary.at("method_names").size() == 2);
    fs::remove_all(dir);
}

TEST_CASE("experiment specs round-trip through JSON") {
    SweepSpec spec = tiny_sweep();
    spec.jobs = 4;
    const SweepSpec back = sweep_spec_from_json(sweep_spec_to_json(spec));
    CHECK(sweep_spec_to_json(back) == sweep_spec_to_json(spec));
    CHECK(back.sample_sizes == spec.sample_sizes);
    CHECK(back.runs_per_point == spec.runs_per_point);
    CHECK(back.methods.size() == 2);
    CHECK(back.methods[1].kind == InstrumentKind::reference_dt_sensitivity);

    BiasSpec bias = preset_bias_spec();
    bias.snr_values = {0.01, 1.0, 100.0};
    bias.runs_per_point = 2;
    const BiasSpec bias_back = bias_spec_from_json(bias_spec_to_json(bias));
    CHECK(bias_spec_to_json(bias_back) == bias_spec_to_json(bias));
    CHECK(bias_back.snr_values == bias.snr_values);
}

TEST_CASE("bias curves and their artifacts stay finite on a desk-scale run") {
    BiasSpec spec = preset_bias_spec();
    spec.snr_values = {1e-3, 1e3};
    spec.runs_per_point = 2;
    spec.scenario.n_samples = 20000;
    const BiasCurveReport rep = run_bias_vs_snr(spec);
    REQUIRE(rep.points.size() == 2);
    CHECK(rep.points[0].snr == doctest::Approx(1e-3));
    for (const BiasPoint& p : rep.points) {
        CHECK(p.valid);
        CHECK(std::isfinite(p.metric));
        CHECK(p.metric >= 0.0);
        CHECK(p.metric <= 1.0);
    }
    // Even at this tiny scale the endpoints separate decisively.
    CHECK(rep.points[0].metric > 0.8);
    CHECK(rep.points[1].metric < 0.2);

    const fs::path dir = fs::temp_directory_path() / "ctsid_bias_artifacts";
    fs::remove_all(dir);
    emit_bias_report(rep, dir, 6);
    CHECK(fs::exists(dir / "fig6.csv"));
    CHECK(fs::exists(dir / "fig6.svg"));
    CHECK(fs::exists(dir / "bias_summary.json"));
    const std::string csv = slurp(dir / "fig6.csv");
    CHECK(csv.rfind("snr,bias_metric,converged_runs,failed_runs,mean_a1,mean_b0,mean_b1", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("table artifacts list the truth and every method") {
    Table1Report rep;
    rep.method_names = {"srivc", "clsrivc"};
    rep.theta_true = Eigen::Vector4d(0.707, 0.5, 0.5, -0.25);
    rep.means = {Eigen::Vector4d(0.7044, 0.4966, 0.5008, -0.2469),
                 Eigen::Vector4d(0.7044, 0.4965, 0.5008, -0.2469)};
    rep.converged_runs = {100, 100};
    rep.failed_runs = {0, 0};
    rep.runs = 100;
    rep.seed = 1;
    rep.h = 0.02;
    rep.n_samples = 200000;

    const fs::path dir = fs::temp_directory_path() / "ctsid_table_artifacts";
    fs::remove_all(dir);
    emit_table1(rep, dir);
    std::istringstream csv(slurp(dir / "table1.csv"));
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "method,a1,a2,b0,b1");
    REQUIRE(std::getline(csv, line));
    CHECK(line.rfind("true,", 0) == 0);
    REQUIRE(std::getline(csv, line));
    CHECK(line.rfind("srivc,", 0) == 0);
    REQUIRE(std::getline(csv, line));
    CHECK(line.rfind("clsrivc,", 0) == 0);
    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "table1_summary.json"));
    CHECK(summary.at("n_samples").get<int>() == 200000);
    fs::remove_all(dir);
}
