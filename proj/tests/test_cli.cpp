#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chanest/config.hpp"
#include "chanest/runner.hpp"
#include "chanest/sweep_io.hpp"

using namespace chanest;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig tiny_scalar_config() {
    ExperimentConfig cfg = parse_config(
        "model = scalar\n"
        "alpha = 0.4\n"
        "sigma_h2 = 1\n"
        "pilot = 1\n"
        "grid = 0.5, 1.0, 2.0\n"
        "trials = 2000\n"
        "seed = 7\n");
    return cfg;
}

}  // namespace

TEST_CASE("presets carry the documented parameters") {
    const ExperimentConfig fig1 = preset("fig1");
    CHECK(fig1.model == "scalar");
    CHECK(fig1.alpha == 0.4);
    CHECK(fig1.sigma_h2 == 1.0);
    CHECK(fig1.pilot_scalar.size() == 1);
    CHECK(fig1.pilot_scalar.front().value == 1.0);
    CHECK(fig1.trials == 1000000);
    CHECK(fig1.grid.size() == 20);
    CHECK(fig1.grid.front() == doctest::Approx(1e-4));
    CHECK(fig1.grid.back() == doctest::Approx(10.0));

    const ExperimentConfig fig2 = preset("fig2");
    CHECK(fig2.model == "vector");
    CHECK(fig2.m == 4);
    CHECK(fig2.n == 4);
    CHECK(fig2.t == 4);
    CHECK(fig2.pilot_matrix_text == "identity");
    CHECK(fig2.effective_lb_trials() == 10000);

    CHECK(preset_names() == std::vector<std::string>{"fig1", "fig2"});
    CHECK_THROWS_WITH_AS(preset("fig3"), doctest::Contains("unknown preset"),
                         std::invalid_argument);
}

TEST_CASE("config diagnostics name the key and line") {
    CHECK_THROWS_WITH_AS(parse_config("model = scalar\nalpha = 0\n"),
                         doctest::Contains("alpha"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("bogus = 3\n"), doctest::Contains("unknown key"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("bogus = 3\n"), doctest::Contains("line 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("model = scalar\ntrials = -3\n"),
                         doctest::Contains("trials"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("model = scalar\nquantities = lb, bogus\n"),
                         doctest::Contains("bogus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("grid = 1\ngrid_points = 5\n"),
                         doctest::Contains("conflicts"), std::invalid_argument);
    // Scalar pilot at zero is rejected when bound/MMSE quantities are on.
    CHECK_THROWS_AS(parse_config("model = scalar\npilot = 0\n"), std::invalid_argument);
    CHECK_NOTHROW(parse_config("model = scalar\npilot = 0\nquantities = lmmse\n"));
}

TEST_CASE("vector config validation: identity needs T == M, rank errors surface") {
    CHECK_THROWS_WITH_AS(
        parse_config("model = vector\nM = 3\nN = 2\nT = 2\npilot_matrix = identity\n"),
        doctest::Contains("identity"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_config("model = vector\nM = 2\nN = 2\nT = 2\npilot_matrix = 1,1; 2i,2i\n"),
        doctest::Contains("rank"), std::invalid_argument);
    CHECK_NOTHROW(
        parse_config("model = vector\nM = 2\nN = 2\nT = 2\npilot_matrix = 1,1; 2i,-2i\n"));
}

TEST_CASE("complex pilot literals parse") {
    const ExperimentConfig cfg = parse_config(
        "model = vector\nM = 2\nN = 1\nT = 2\n"
        "pilot_matrix = [[1+2i, -i]; [3.5, 1e-1-0.5i]]\n");
    const VectorChannelSpec spec = cfg.vector_spec(1.0);
    const ComplexMatrix& x = spec.pilot.front().value;
    CHECK(x(0, 0) == std::complex<double>(1.0, 2.0));
    CHECK(x(0, 1) == std::complex<double>(0.0, -1.0));
    CHECK(x(1, 0) == std::complex<double>(3.5, 0.0));
    CHECK(x(1, 1) == std::complex<double>(0.1, -0.5));
}

TEST_CASE("scalar pilot distributions parse") {
    const ExperimentConfig cfg =
        parse_config("model = scalar\npilot = 1:0.25, 2:0.75\n");
    REQUIRE(cfg.pilot_scalar.size() == 2);
    CHECK(cfg.pilot_scalar[0].value == 1.0);
    CHECK(cfg.pilot_scalar[0].prob == 0.25);
    CHECK(cfg.pilot_scalar[1].value == 2.0);
    CHECK(cfg.pilot_scalar[1].prob == 0.75);
}

TEST_CASE("log grid spans the requested decades") {
    const std::vector<double> grid = make_log_grid(1e-4, 1e1, 20);
    REQUIRE(grid.size() == 20);
    CHECK(grid.front() == doctest::Approx(1e-4));
    CHECK(grid.back() == doctest::Approx(10.0));
    CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("CSV: schema, metadata, and nan for skipped quantities") {
    ExperimentConfig cfg = tiny_scalar_config();
    cfg.quantities = {"lmmse", "asymptote"};
    SweepRow row;
    row.sigma_s2 = 1.0;
    row.lmmse = 0.25;
    row.asymptote_line = 0.125;
    const std::string csv = sweep_csv(cfg, {row});
    CHECK(csv.find("\"seed\":7") != std::string::npos);
    CHECK(csv.find("\"trials\":2000") != std::string::npos);
    CHECK(csv.find("\"version\":\"") != std::string::npos);
    CHECK(csv.find("sigma_s2,lb,lb_se,mmse_t1,mmse_t1_se,mmse_oracle,mmse_oracle_se,"
                   "lmmse,asymptote\n") != std::string::npos);
    CHECK(csv.find("nan,nan,nan,nan,nan,nan,0.25,0.125") != std::string::npos);
}

TEST_CASE("CSV round-trips full double precision") {
    ExperimentConfig cfg = tiny_scalar_config();
    SweepRow row;
    row.sigma_s2 = 0.1;  // not exactly representable
    row.lmmse = 1.0 / 3.0;
    const std::string csv = sweep_csv(cfg, {row});
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // metadata
    std::getline(lines, line);  // header
    std::getline(lines, line);  // row
    double parsed = 0.0;
    std::sscanf(line.c_str(), "%lf", &parsed);
    CHECK(parsed == 0.1);
    CHECK(line.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("experiment runs are byte-deterministic and worker-independent") {
    ExperimentConfig cfg = tiny_scalar_config();
    cfg.csv_path = "/tmp/chanest_test_a.csv";
    std::ostringstream devnull;
    setenv("MMSE_POINCARE_WORKERS", "1", 1);
    run_experiment(cfg, devnull);
    const std::string first = slurp(cfg.csv_path);
    cfg.csv_path = "/tmp/chanest_test_b.csv";
    setenv("MMSE_POINCARE_WORKERS", "3", 1);
    run_experiment(cfg, devnull);
    unsetenv("MMSE_POINCARE_WORKERS");
    const std::string second = slurp(cfg.csv_path);
    CHECK(first == second);
    std::remove("/tmp/chanest_test_a.csv");
    std::remove("/tmp/chanest_test_b.csv");
}

TEST_CASE("failed sweeps leave no partial CSV and name the grid point") {
    ExperimentConfig cfg = tiny_scalar_config();
    cfg.csv_path = "/tmp/chanest_no_such_dir/out.csv";  // write fails at the end
    std::ostringstream devnull;
    CHECK_THROWS(run_experiment(cfg, devnull));
    std::ifstream probe(cfg.csv_path);
    CHECK(!probe.good());
}

TEST_CASE("SVG output is well-formed and oriented") {
    ExperimentConfig cfg = tiny_scalar_config();
    std::ostringstream devnull;
    const RunResult result = run_experiment(cfg, devnull);
    const std::string svg = sweep_svg(result.rows, cfg.quantities);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("lmmse") != std::string::npos);

    // Monotone data maps to monotone pixel ordinates (SVG y grows downward).
    SweepRow lo, hi;
    lo.sigma_s2 = 0.1;
    lo.lmmse = 0.1;
    lo.asymptote_line = 0.05;
    hi.sigma_s2 = 1.0;
    hi.lmmse = 0.4;
    hi.asymptote_line = 0.2;
    const std::string two = sweep_svg({lo, hi}, {"lmmse"});
    const auto at = two.find("<polyline points=\"");
    REQUIRE(at != std::string::npos);
    double x1, y1, x2, y2;
    REQUIRE(std::sscanf(two.c_str() + at + 18, "%lf,%lf %lf,%lf", &x1, &y1, &x2, &y2) == 4);
    CHECK(x2 > x1);
    CHECK(y2 < y1);  // larger value, higher on the canvas

    CHECK_THROWS_AS(sweep_svg({lo}, {"lmmse"}), std::invalid_argument);
}

TEST_CASE("quantity subsets skip work") {
    ExperimentConfig cfg = tiny_scalar_config();
    cfg.quantities = {"lmmse"};
    const SweepRow row = compute_row(cfg, 1.0, 99);
    CHECK(row.lb.count == 0);
    CHECK(row.mmse_t1.count == 0);
    CHECK(row.lmmse == doctest::Approx(0.4 / 1.4));
}

TEST_CASE("load_config resolves presets and files") {
    const ExperimentConfig p = load_config("fig1");
    CHECK(p.name == "fig1");
    const std::string path = "/tmp/chanest_test_cfg.txt";
    {
        std::ofstream out(path);
        out << "model = scalar\npilot = 2\ngrid = 1\ntrials = 10\n";
    }
    const ExperimentConfig f = load_config(path);
    CHECK(f.pilot_scalar.front().value == 2.0);
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS(load_config("/tmp/no_such_config_file.txt"),
                         doctest::Contains("cannot open"), std::invalid_argument);
}

TEST_CASE("self-check suite passes") {
    std::ostringstream out;
    CHECK(run_check(out) == 0);
    CHECK(out.str().find("[FAIL]") == std::string::npos);
}
