#include "kslab/config.hpp"
#include "kslab/csv.hpp"
#include "kslab/svg.hpp"

#include "kslab/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <fstream>

using namespace kslab;

TEST_SUITE_BEGIN("io");

TEST_CASE("matrix CSV round trip is exact") {
    const std::string dir = test::scratch_dir("csv");
    Rng rng(51);
    Matrix m = test::random_matrix(7, 5, rng);
    m(0, 0) = 1e-300;
    m(1, 1) = -3.0;
    m(2, 2) = 0.1;
    write_matrix_csv(dir + "/m.csv", m);
    const Matrix back = read_matrix_csv(dir + "/m.csv");
    CHECK(back.max_abs_diff(m) == 0.0);
}

TEST_CASE("csv writer emits schema comment, header, quoted fields") {
    const std::string dir = test::scratch_dir("csvw");
    CsvWriter w(dir + "/t.csv", "test-v1", {"a", "b"});
    w.write_row({"1", "x,y"});
    CHECK_THROWS_AS(w.write_row({"only-one"}), std::invalid_argument);
    w.close();
    const std::string content = read_file(dir + "/t.csv");
    CHECK(content == "# schema: test-v1\na,b\n1,\"x,y\"\n");
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -2.5e300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("svg output is well formed and labels every series") {
    const std::string dir = test::scratch_dir("svg");
    SvgSeries line;
    line.label = "bound";
    line.xs = {10, 100, 1000};
    line.ys = {0.1, 0.01, 0.001};
    SvgSeries pinned;
    pinned.label = "bound (vacuous)";
    pinned.pinned = true;
    pinned.xs = {5};
    pinned.ys = {0.0};
    write_loglog_svg(dir + "/p.svg", "title", "N", "value", {line, pinned});
    const std::string content = read_file(dir + "/p.svg");
    CHECK(content.find("<svg") != std::string::npos);
    CHECK(content.find("</svg>") != std::string::npos);
    CHECK(content.find("bound") != std::string::npos);
    CHECK(content.find("vacuous") != std::string::npos);
    CHECK(content.find("polyline") != std::string::npos);
    // Deterministic bytes on rewrite.
    write_loglog_svg(dir + "/p2.svg", "title", "N", "value", {line, pinned});
    CHECK(test::files_identical(dir + "/p.svg", dir + "/p2.svg"));
}

TEST_CASE("config parsing applies defaults and validates") {
    const std::string dir = test::scratch_dir("cfg");
    test::write_text(dir + "/ok.cfg",
                     "# comment\n"
                     "model.m1 = 4\n"
                     "model.m2 = 4\n"
                     "model.p1 = 8\n"
                     "model.p2 = 8\n"
                     "noise.sigma = 0.25\n"
                     "experiment.n_grid = 10, 100, 1000\n");
    const RunConfig cfg = parse_run_config(dir + "/ok.cfg");
    CHECK(cfg.m1 == 4);
    CHECK(cfg.sigma == 0.25);
    CHECK(cfg.n_grid == std::vector<int>{10, 100, 1000});
    CHECK(cfg.coeff_type == "sparse_gaussian");  // default
    CHECK(cfg.s == 4);                           // default
    CHECK(cfg.t == 0.5);                         // default
    // eps_prime = 0 resolves to half the sparse cap min{r^2/s, r^4/4p} = (1/2)(1/256).
    CHECK(cfg.resolved_eps_prime() == doctest::Approx(1.0 / 512.0).epsilon(1e-15));
}

TEST_CASE("config errors name the offending field") {
    const std::string dir = test::scratch_dir("cfgbad");

    test::write_text(dir + "/missing.cfg", "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\n");
    CHECK_THROWS_WITH_AS(parse_run_config(dir + "/missing.cfg"), doctest::Contains("model.p2"),
                         ConfigError);

    test::write_text(dir + "/unknown.cfg",
                     "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\nmodel.p2 = 8\nmodel.bogus = 1\n");
    CHECK_THROWS_WITH_AS(parse_run_config(dir + "/unknown.cfg"), doctest::Contains("model.bogus"),
                         ConfigError);

    test::write_text(dir + "/eps.cfg",
                     "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\nmodel.p2 = 8\n"
                     "packing.eps_prime = 0.5\n");
    CHECK_THROWS_WITH_AS(parse_run_config(dir + "/eps.cfg"), doctest::Contains("eps_prime"),
                         ConfigError);

    test::write_text(dir + "/badnum.cfg",
                     "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\nmodel.p2 = 8\n"
                     "noise.sigma = fast\n");
    CHECK_THROWS_WITH_AS(parse_run_config(dir + "/badnum.cfg"), doctest::Contains("noise.sigma"),
                         ConfigError);

    test::write_text(dir + "/grid.cfg",
                     "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\nmodel.p2 = 8\n"
                     "experiment.n_grid = 10,10\n");
    CHECK_THROWS_WITH_AS(parse_run_config(dir + "/grid.cfg"), doctest::Contains("n_grid"),
                         ConfigError);

    test::write_text(dir + "/side.cfg",
                     "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\nmodel.p2 = 8\n"
                     "coeff.type = general\nexperiment.side_info = support_only\n");
    CHECK_THROWS_WITH_AS(parse_run_config(dir + "/side.cfg"), doctest::Contains("side_info"),
                         ConfigError);
}

TEST_SUITE_END();
