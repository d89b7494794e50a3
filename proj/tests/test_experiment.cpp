#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "scatent/errors.hpp"
#include "scatent/experiment.hpp"
#include "scatent/transforms.hpp"

using namespace scatent;

namespace {

ExperimentConfig parse(const std::string& text) { return parse_config(text); }

}  // namespace

TEST_CASE("defaults")
{
    const auto c = parse("{}");
    CHECK(c.state.k == 5.0);
    CHECK(c.state.sigma1 == 0.5);
    CHECK(c.grid_n == 256);
    CHECK(c.window == 8.0);
    CHECK(std::holds_alternative<DeltaBarrier>(c.potential));
    CHECK(std::get<DeltaBarrier>(c.potential).strength == 5.0);
    CHECK_FALSE(c.scan.has_value());
    CHECK(c.format == OutputFormat::csv);
}

TEST_CASE("full config")
{
    const auto c = parse(R"({
        "state": {"k": 6, "a": 2, "sigma1": 1, "sigma2": 1.5, "m1": 1, "m2": 2},
        "potential": {"type": "square", "height": 3, "width": 0.5},
        "grid": {"n": 128, "window": 9},
        "scan": {"axis": "mass_ratio", "start": 1, "stop": 3, "step": 0.5},
        "output": {"path": "out.json", "format": "json"},
        "threads": 2
    })");
    CHECK(c.state.sigma2 == 1.5);
    CHECK(std::get<SquareBarrier>(c.potential).width == 0.5);
    CHECK(c.grid_n == 128);
    CHECK(c.scan->axis == ScanAxis::mass_ratio);
    CHECK(c.output_path == "out.json");
    CHECK(c.format == OutputFormat::json);
    CHECK(c.threads == 2);
    CHECK(c.coverage == CoveragePolicy::error);
    CHECK(parse(R"({"grid": {"coverage": "warn"}})").coverage == CoveragePolicy::warn);
    const auto values = scan_values(c);
    CHECK(values == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
}

TEST_CASE("scan endpoints survive rounding")
{
    const auto c = parse(R"({"scan": {"axis": "k", "start": 4, "stop": 5, "step": 0.1}})");
    const auto v = scan_values(c);
    CHECK(v.size() == 11);
    CHECK(v.back() == doctest::Approx(5.0));
}

TEST_CASE("invalid configs")
{
    const char* bad[] = {
        "not json",
        "[]",
        R"({"unknown": 1})",
        R"({"state": {"sigma1": 0}})",
        R"({"state": {"m2": -1}})",
        R"({"state": {"k": "fast"}})",
        R"({"potential": {"type": "coulomb"}})",
        R"({"potential": {"type": "square", "height": 1}})",
        R"({"potential": {"type": "square", "height": 1, "width": -1}})",
        R"({"potential": {"type": "delta", "strength": 1, "extra": 2}})",
        R"({"grid": {"n": 4}})",
        R"({"grid": {"n": 2.5}})",
        R"({"scan": {"axis": "k", "start": 5, "stop": 4, "step": 0.1}})",
        R"({"scan": {"axis": "k", "start": 4, "stop": 5, "step": 0}})",
        R"({"scan": {"axis": "temperature", "start": 4, "stop": 5, "step": 1}})",
        R"({"scan": {"axis": "mass_ratio", "start": 0, "stop": 1, "step": 0.5}})",
        R"({"potential": {"type": "hard_wall"}, "scan": {"axis": "potential_strength", "start": 1, "stop": 2, "step": 1}})",
        R"({"output": {"format": "xml"}})",
        R"({"grid": {"coverage": "ignore"}})",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse(text), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("scan points")
{
    const auto c = parse(R"({"potential": {"type": "double_delta", "strength": 2, "separation": 1},
                             "scan": {"axis": "potential_strength", "start": 1, "stop": 2, "step": 1}})");
    CHECK(std::get<DoubleDelta>(at_scan_point(c, 7.0).potential).strength == 7.0);
    CHECK_FALSE(at_scan_point(c, 7.0).scan.has_value());

    auto m = c;
    m.scan->axis = ScanAxis::mass_ratio;
    CHECK(at_scan_point(m, 3.0).state.m2 == 3.0);
    m.scan->axis = ScanAxis::sigma_ratio;
    CHECK(at_scan_point(m, 2.0).state.sigma2 == 1.0);
    m.scan->axis = ScanAxis::k;
    CHECK(at_scan_point(m, 8.0).state.k == 8.0);
}

TEST_CASE("single point run")
{
    const auto rows = run(parse("{}"));
    REQUIRE(rows.size() == 1);
    const auto& r = rows[0];
    CHECK(std::isnan(r.scan_value));
    CHECK(std::abs(r.transmission - 0.8) < 0.01);
    CHECK(std::abs(r.transmission + r.reflection - 1.0) < 1e-8);
    CHECK(std::abs(r.p_exact - r.p_tra - r.p_ref) < 1e-7);
    CHECK(r.p_qubit == doctest::Approx(r.transmission * r.transmission + r.reflection * r.reflection));
    CHECK(r.p_reflection == doctest::Approx(1.0));
    CHECK(r.ie_purity == doctest::Approx(1.0));
    CHECK(r.variation_t.has_value());
    CHECK(r.grid_n == 256);
}

TEST_CASE("mass ratio scan with a hard wall")
{
    const auto c = parse(R"({"state": {"k": 6, "sigma1": 1, "sigma2": 1},
                             "potential": {"type": "hard_wall"},
                             "scan": {"axis": "mass_ratio", "start": 1, "stop": 3, "step": 0.5}})");
    const auto rows = run(c);
    REQUIRE(rows.size() == 5);
    CHECK(std::abs(rows[0].p_exact - 1.0) < 1e-5);
    for (const auto& r : rows) {
        CHECK(std::abs(r.p_exact - r.p_reflection) < 1e-5);
        CHECK_FALSE(r.variation_t.has_value());
        CHECK(r.transmission == 0.0);
    }
    CHECK(std::abs(rows[2].p_exact - 9.0 / std::sqrt(85.0)) < 1e-5);
}

TEST_CASE("sigma ratio scan across the Schulman locus")
{
    // m2/m1 = 2: locus at sigma2/sigma1 = sqrt(2).
    const auto c = parse(R"({"state": {"k": 12, "sigma1": 1, "sigma2": 1, "m1": 1, "m2": 2},
                             "potential": {"type": "hard_wall"},
                             "scan": {"axis": "sigma_ratio", "start": 1.0, "stop": 1.8, "step": 0.02}})");
    const auto rows = run(c);
    const auto best = std::max_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.p_reflection < b.p_reflection; });
    CHECK(std::abs(best->scan_value - std::sqrt(2.0)) <= 0.01 + 1e-12);
    CHECK(best->p_reflection > 1.0 - 1e-4);
    CHECK(std::abs(best->p_exact - best->p_reflection) < 1e-5);
}

TEST_CASE("strength scan: qubit purity bottoms out at T = R = 1/2")
{
    const auto c = parse(R"({"state": {"k": 5, "sigma1": 0.25, "sigma2": 0.25},
                             "scan": {"axis": "potential_strength", "start": 6, "stop": 14, "step": 0.5}})");
    const auto rows = run(c);
    const auto best = std::min_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.p_qubit < b.p_qubit; });
    // q = m lambda at lambda = k / m = 10.
    CHECK(best->scan_value == doctest::Approx(10.0));
    CHECK(std::abs(best->p_qubit - 0.5) < 1e-3);
    CHECK(std::abs(best->transmission - 0.5) < 0.02);
    for (const auto& r : rows) {
        CHECK(r.p_qubit >= 0.5);
    }
}

TEST_CASE("output is deterministic and independent of threads")
{
    auto c = parse(R"({"potential": {"type": "double_delta", "strength": 3, "separation": 1},
                       "scan": {"axis": "k", "start": 4, "stop": 6, "step": 0.5}})");
    c.threads = 1;
    const std::string serial = format_results(run(c), OutputFormat::csv);
    c.threads = 4;
    const std::string parallel = format_results(run(c), OutputFormat::csv);
    CHECK(serial == parallel);
    CHECK(format_results(run(c), OutputFormat::csv) == parallel);

    const auto rows = run(c);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].scan_value > rows[i - 1].scan_value);
    }
    for (const auto& r : rows) {
        for (double p : {r.p_exact, r.p_const_amp, r.p_qubit, r.p_reflection, r.ie_purity}) {
            CHECK(p > 0.0);
            CHECK(p <= 1.0 + 1e-8);
        }
    }
}

TEST_CASE("formatting")
{
    ResultRow r;
    r.scan_value = 1.0 / 3.0;
    r.transmission = 0.8;
    r.grid_n = 64;
    const std::string csv = format_results({r}, OutputFormat::csv);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "scan_value,T,R,p_exact,p_const_amp,p_qubit,p_reflection,schulman_residual,ie_purity,p_tra,p_ref,"
          "mode_overlap,variation_t,variation_r,grid_n");
    CHECK(csv.find("0.333333333333,0.8,") != std::string::npos);
    CHECK(csv.find(",nan,nan,64") != std::string::npos);

    const std::string json = format_results({r}, OutputFormat::json);
    CHECK(json.find("\"schema_version\": 1") != std::string::npos);
    CHECK(json.find("\"variation_t\": null") != std::string::npos);
    CHECK(json.find("\"grid_n\": 64") != std::string::npos);
}

TEST_CASE("check suite")
{
    SUBCASE("defaults pass")
    {
        const auto results = check(parse("{}"));
        CHECK(results.size() >= 7);
        for (const auto& r : results) {
            CAPTURE(r.name);
            CAPTURE(r.detail);
            CHECK(r.passed);
        }
    }
    SUBCASE("overlapping supports fail the boundary check")
    {
        const auto results = check(parse(R"({"state": {"k": 0.5, "sigma1": 0.5, "sigma2": 0.5}})"));
        const auto boundary = std::find_if(results.begin(), results.end(), [](const auto& r) { return r.name == "boundary"; });
        REQUIRE(boundary != results.end());
        CHECK_FALSE(boundary->passed);
    }
    SUBCASE("hard wall, equal masses")
    {
        const auto results = check(parse(R"({"potential": {"type": "hard_wall"}})"));
        const auto split = std::find_if(results.begin(), results.end(), [](const auto& r) { return r.name == "split"; });
        REQUIRE(split != results.end());
        CHECK(split->passed);
        CHECK(split->detail == "p_total=1");
    }
}

TEST_CASE("amplitude table")
{
    const auto c = parse(R"({"potential": {"type": "delta", "strength": 5},
                             "amplitudes": {"q_min": 1, "q_max": 10, "count": 10}})");
    const auto rows = amplitude_table(c);
    REQUIRE(rows.size() == 10);
    CHECK(rows.front().q == 1.0);
    CHECK(rows.back().q == 10.0);
    CHECK(std::norm(rows[4].t) == doctest::Approx(0.8));  // q = 5
    const std::string csv = format_amplitudes(rows, OutputFormat::csv);
    CHECK(csv.rfind("q,t_re,t_im,r_re,r_im,T,R\n", 0) == 0);
}
