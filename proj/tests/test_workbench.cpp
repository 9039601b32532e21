#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

#include "epp/workbench.hpp"

using namespace epp;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path fresh_dir(const std::string& stem) {
    const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    auto p = std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(tick));
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

Json fast_two_channel() {
    Json j;
    j["a"] = {1.0, 2.0};
    j["K_re"] = 1.0;
    j["K_im"] = 2.0;
    j["angles_re"] = Json::array();
    j["angles_im"] = Json::array();
    j["k_values"] = {0.8, 1.6};
    j["r_match"] = 15.0;
    j["grid_points"] = 48;
    return j;
}

}  // namespace

TEST_CASE("config parses momentum given as energy", "[workbench]") {
    Json j = fast_two_channel();
    j.erase("K_re");
    j.erase("K_im");
    j["E_re"] = 0.0;
    j["E_im"] = 4.5;
    const RunConfig c = config_from_json(j);
    CHECK(std::abs(c.momentum - Complex(1.5, 1.5)) < 1e-14);
}

TEST_CASE("config round-trips through its echo", "[workbench]") {
    Json j = fast_two_channel();
    const RunConfig c = config_from_json(j);
    const RunConfig c2 = config_from_json(config_to_json(c));
    CHECK(c2.momentum == c.momentum);
    CHECK(c2.a == c.a);
    CHECK(c2.sigma == c.sigma);
    CHECK(c2.k_values == c.k_values);
    CHECK(c2.grid_points == c.grid_points);
    CHECK(c2.resolved_r_max() == c.resolved_r_max());
    CHECK(c2.resolved_r_match() == c.resolved_r_match());
    CHECK(c2.angles.has_value());

    // resolved defaults: r_max from Im K, r_match given explicitly
    CHECK(c.resolved_r_max() == 40.0);
    CHECK(c.resolved_r_match() == 15.0);

    Json jb;
    jb["a"] = {1.1, 1.5, 2.1, 2.5};
    jb["K_re"] = 1.5;
    jb["K_im"] = 1.5;
    jb["b_re"] = 2.5;
    jb["b_im"] = 1.3;
    jb["branch"] = 1;
    const RunConfig cb = config_from_json(jb);
    const RunConfig cb2 = config_from_json(config_to_json(cb));
    CHECK(cb2.b.has_value());
    CHECK(*cb2.b == *cb.b);
    CHECK(max_abs(Matrix(cb2.spec().mixing() - cb.spec().mixing())) == 0.0);
}

TEST_CASE("config rejects malformed input", "[workbench]") {
    REQUIRE_THROWS_AS(config_from_json(Json::array()), ConfigError);

    Json j = fast_two_channel();
    j["surprise"] = 1;
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("unknown key"));

    j = fast_two_channel();
    j["E_re"] = 0.0;
    j["E_im"] = 4.5;
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("exactly one of K"));

    j = fast_two_channel();
    j.erase("K_re");
    j.erase("K_im");
    REQUIRE_THROWS_AS(config_from_json(j), ConfigError);

    j = fast_two_channel();
    j.erase("angles_re");
    j.erase("angles_im");
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("mixing"));

    j = fast_two_channel();
    j["b_re"] = 0.5;
    j["b_im"] = 0.0;
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("mixing"));

    j = fast_two_channel();
    j["angles_im"] = {0.1};
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("equal length"));

    j = fast_two_channel();
    j["sigma"] = 2;
    REQUIRE_THROWS_AS(config_from_json(j), ConfigError);

    j = fast_two_channel();
    j["grid_points"] = 1;
    REQUIRE_THROWS_AS(config_from_json(j), ConfigError);

    j = fast_two_channel();
    j["a"] = {1.0, 2.0, 3.0, 4.0};
    j.erase("angles_re");
    j.erase("angles_im");
    j["B_re"] = {1.0, 0.0, 0.0};  // not a square count
    j["B_im"] = {0.0, 0.0, 0.0};
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("square"));

    // b parametrization is tied to four channels
    j = fast_two_channel();
    j["b_re"] = 2.5;
    j["b_im"] = 1.3;
    j.erase("angles_re");
    j.erase("angles_im");
    REQUIRE_THROWS_WITH(config_from_json(j).spec(), ContainsSubstring("4 channels"));
}

TEST_CASE("cmd_transform writes deterministic artifacts", "[workbench]") {
    Json j = fast_two_channel();
    j["grid_points"] = 64;
    j["r_max"] = 30.0;
    const auto dir = fresh_dir("epp-transform");
    j["out_dir"] = dir.string();
    const RunConfig config = config_from_json(j);

    std::ostringstream quiet;
    REQUIRE(cmd_transform(config, quiet) == 0);
    const std::string csv_first = slurp(dir / "v2_grid.csv");
    const std::string json_first = slurp(dir / "summary.json");
    REQUIRE(cmd_transform(config, quiet) == 0);
    CHECK(slurp(dir / "v2_grid.csv") == csv_first);
    CHECK(slurp(dir / "summary.json") == json_first);

    const auto rows = lines_of(csv_first);
    REQUIRE(rows.size() == 65);  // header + grid_points
    CHECK(rows[0] == "r,V11,V12,V22");
    const auto first = parse_row(rows[1]);
    REQUIRE(first.size() == 4);
    CHECK(first[0] == Catch::Approx(1e-3).epsilon(1e-15));
    const auto last = parse_row(rows.back());
    CHECK(last[0] == Catch::Approx(30.0).epsilon(1e-15));

    // values reproduce the sampled potential
    const RealMatrix v2 = sample(config.model(), config.spec(), last[0]).v2;
    CHECK(std::abs(last[1] - v2(0, 0)) < 1e-12);
    CHECK(std::abs(last[2] - v2(0, 1)) < 1e-12);
    CHECK(std::abs(last[3] - v2(1, 1)) < 1e-12);

    const Json summary = Json::parse(json_first);
    for (const char* key : {"config", "omega", "u_infinity", "x_diagnostic", "diagnostics"})
        CHECK(summary.contains(key));
    CHECK(summary["diagnostics"]["wronskian_rcond_min"].get<double>() > 1e-10);
    CHECK(summary["diagnostics"]["w2_norm_at_r_max"].get<double>() < 1e-6);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_verify writes a passing report for the fast case", "[workbench]") {
    Json j = fast_two_channel();
    const auto dir = fresh_dir("epp-verify");
    j["out_dir"] = dir.string();
    const RunConfig config = config_from_json(j);

    std::ostringstream log;
    REQUIRE(cmd_verify(config, log) == 0);
    CHECK_THAT(log.str(), ContainsSubstring("PASS"));

    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["pass"].get<bool>());
    REQUIRE(report["invariants"].is_array());
    CHECK(report["invariants"].size() == 10);
    for (const Json& inv : report["invariants"]) {
        CHECK(inv.contains("name"));
        CHECK(inv.contains("value"));
        CHECK(inv.contains("tol"));
        CHECK(inv["pass"].get<bool>());
    }
    REQUIRE(report["scattering"]["records"].size() == 2);
    CHECK(report["scattering"]["pass"].get<bool>());
    CHECK(report["scattering"]["max_closed_deviation"].get<double>() < 1e-10);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_figures emits consistent tables", "[workbench]") {
    Json j = fast_two_channel();
    j["grid_points"] = 16;
    j["k_values"] = {0.5, 2.0};
    const auto dir = fresh_dir("epp-figures");
    j["out_dir"] = dir.string();
    const RunConfig config = config_from_json(j);
    const TransformSpec spec = config.spec();

    std::ostringstream quiet;
    REQUIRE(cmd_figures(config, quiet) == 0);

    const auto rs_rows = lines_of(slurp(dir / "rs_columns.csv"));
    REQUIRE(rs_rows.size() == 17);
    CHECK(rs_rows[0] == "ksq,R1_1,R1_2,R2_1,R2_2");
    for (const std::size_t row : {std::size_t(1), std::size_t(16)}) {
        const auto vals = parse_row(rs_rows[row]);
        REQUIRE(vals.size() == 5);
        const RealMatrix rs = rs_matrix(spec, vals[0]);
        CHECK(std::abs(vals[1] - rs(0, 0)) < 1e-12);
        CHECK(std::abs(vals[2] - rs(1, 0)) < 1e-12);
        CHECK(std::abs(vals[3] - rs(0, 1)) < 1e-12);
        CHECK(std::abs(vals[4] - rs(1, 1)) < 1e-12);
    }
    CHECK(parse_row(rs_rows[1])[0] == Catch::Approx(0.25));
    CHECK(parse_row(rs_rows[16])[0] == Catch::Approx(4.0));

    const auto ph_rows = lines_of(slurp(dir / "eigenphases.csv"));
    REQUIRE(ph_rows.size() == 17);
    CHECK(ph_rows[0] == "k,delta0_1,delta0_2,delta2_1,delta2_2");
    for (std::size_t row = 1; row < ph_rows.size(); ++row) {
        const auto vals = parse_row(ph_rows[row]);
        REQUIRE(vals.size() == 5);
        // the deformation preserves every eigen-phase band
        CHECK(std::abs(vals[1] - vals[3]) < 1e-10);
        CHECK(std::abs(vals[2] - vals[4]) < 1e-10);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_cli maps failures onto exit codes", "[workbench]") {
    std::ostringstream err;
    CHECK(run_cli([] { return 0; }, err) == 0);
    CHECK(run_cli([] { return 1; }, err) == 1);

    err.str("");
    CHECK(run_cli([]() -> int {
              throw EppNotExistentError("odd channel count: EPP transformation does not exist");
          },
                  err) == 2);
    CHECK_THAT(err.str(), ContainsSubstring("error: odd channel count"));

    err.str("");
    CHECK(run_cli([]() -> int { throw std::runtime_error("plain failure"); }, err) == 2);
    CHECK_THAT(err.str(), ContainsSubstring("plain failure"));
}

TEST_CASE("cli rejects an odd channel count config end to end", "[workbench]") {
    Json j = fast_two_channel();
    j["a"] = {1.0, 2.0, 3.0};
    const auto dir = fresh_dir("epp-odd");
    j["out_dir"] = dir.string();
    std::ostringstream out, err;
    const int code = run_cli(
        [&] {
            const RunConfig config = config_from_json(j);
            return cmd_transform(config, out);
        },
        err);
    CHECK(code == 2);
    CHECK_THAT(err.str(), ContainsSubstring("odd channel count"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli rejects a corrupted raw mixing matrix", "[workbench]") {
    Json j = fast_two_channel();
    j.erase("angles_re");
    j.erase("angles_im");
    j["B_re"] = {1.0, 1.0, 0.0, 1.0};  // shear, not orthogonal
    j["B_im"] = {0.0, 0.0, 0.0, 0.0};
    j["a"] = {1.0, 1.5, 2.0, 2.5};
    std::ostringstream out, err;
    const int code = run_cli(
        [&] {
            const RunConfig config = config_from_json(j);
            return cmd_transform(config, out);
        },
        err);
    CHECK(code == 2);
    CHECK_THAT(err.str(), ContainsSubstring("not complex-orthogonal"));
}

TEST_CASE("load_config reports unreadable and unparsable files", "[workbench]") {
    REQUIRE_THROWS_AS(load_config("/nonexistent/epp-config.json"), ConfigError);
    const auto dir = fresh_dir("epp-badjson");
    const auto bad = dir / "bad.json";
    detail::write_text(bad, "{ not json");
    REQUIRE_THROWS_WITH(load_config(bad), ContainsSubstring("parse error"));
    std::filesystem::remove_all(dir);
}
