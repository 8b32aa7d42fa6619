#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wgkit/cli.hpp"
#include "wgkit/config.hpp"

using namespace wgkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json default_json() { return json::parse(slurp(fs::path(WGKIT_CONFIG_DIR) / "default.json")); }

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_subcommand(args, out, err);
    return {code, out.str(), err.str()};
}

// Scratch directory with a config whose outputs land inside it.
struct Workspace {
    fs::path dir;
    explicit Workspace(const std::string& name, json cfg = default_json()) {
        dir = fs::temp_directory_path() / ("wgkit_test_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
        cfg["paths"]["output_dir"] = (dir / "out").string();
        std::ofstream(dir / "config.json") << cfg.dump(2);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string config() const { return (dir / "config.json").string(); }
    fs::path out(const std::string& f) const { return dir / "out" / f; }
};

json coarse_json() {
    auto j = default_json();
    j["grid"]["resolution_nm"] = {20, 20};
    j["solver"]["mode_count"] = 1;
    return j;
}

}  // namespace

TEST_CASE("shipped default config equals the built-in defaults") {
    const auto a = load_config((fs::path(WGKIT_CONFIG_DIR) / "default.json").string());
    const auto b = default_config();
    CHECK(a.geometry.core_width == b.geometry.core_width);
    CHECK(a.wavelength == b.wavelength);
    CHECK(a.tip_widths == b.tip_widths);
    CHECK(a.master_seed == 20240501);
    CHECK(a.setup.window.x_extent == b.setup.window.x_extent);
    CHECK(a.fiber.mode_field_diameter == b.fiber.mode_field_diameter);
    CHECK(a.material("SiO2").name == "SiO2");
    CHECK_THROWS_AS(a.material("GaP"), ConfigError);
}

TEST_CASE("hash ignores formatting and key order, not values") {
    const auto j = default_json();
    const auto a = parse_config(j.dump());
    const auto b = parse_config(j.dump(4));
    CHECK(a.hash == b.hash);
    auto k = j;
    k["geometry"]["width_nm"] = 701;
    CHECK(parse_config(k.dump()).hash != a.hash);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("strict configuration errors name the key path") {
    auto j = default_json();
    j["geometry"]["widht_nm"] = 700;
    try {
        parse_config(j.dump());
        FAIL("accepted an unknown key");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("geometry.widht_nm") != std::string::npos);
    }
    j = default_json();
    j["geometry"]["width_nm"] = "wide";
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
    j = default_json();
    j["geometry"]["core"] = "unobtainium";
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
    j = default_json();
    j["emitter"]["rho"] = 5.0;
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
    CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"cutback"}).code == 2);  // --data is required
    CHECK(run({"--config", "/nonexistent/config.json", "budget"}).code == 2);

    auto j = default_json();
    j["geometry"]["widht_nm"] = 700;
    Workspace bad("bad_key", j);
    const auto r = run({"--config", bad.config(), "budget"});
    CHECK(r.code == 2);
    CHECK(r.err.find("geometry.widht_nm") != std::string::npos);

    Workspace ws("missing_data");
    CHECK(run({"--config", ws.config(), "cutback", "--data", "/nonexistent.csv"}).code == 1);
}

TEST_CASE("cutback report for the WG2-like data set") {
    Workspace ws("cutback");
    const auto r = run({"--config", ws.config(), "cutback", "--data", std::string(WGKIT_TEST_DATA) + "/wg2.csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("slope 1.77 +/- 0.03 dB/mm, insertion 2.31 +/- 0.08 dB") != std::string::npos);
    const auto j = json::parse(slurp(ws.out("cutback.json")));
    CHECK(j["slope_db_per_mm"].get<double>() == doctest::Approx(1.77).epsilon(1e-9));
    CHECK(j["l_out_db"].get<double>() == doctest::Approx(2.0551195334).epsilon(1e-10));
    CHECK(j["meta"]["command"] == "cutback");
    CHECK(j["meta"]["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("bad data rows are reported with their row number") {
    Workspace ws("bad_rows");
    std::ofstream(ws.dir / "d.csv") << "length_mm,loss_db\n1.0,5.0\n2.0,abc\n";
    auto r = run({"--config", ws.config(), "cutback", "--data", (ws.dir / "d.csv").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("row 2") != std::string::npos);
    std::ofstream(ws.dir / "e.csv") << "length_mm,transmission\n1.0,0.5\n2.0,1.5\n";
    r = run({"--config", ws.config(), "cutback", "--data", (ws.dir / "e.csv").string()});
    CHECK(r.code == 1);
    std::ofstream(ws.dir / "f.csv") << "length_mm,colour\n1.0,red\n";
    CHECK(run({"--config", ws.config(), "cutback", "--data", (ws.dir / "f.csv").string()}).code == 1);
}

TEST_CASE("budget report") {
    Workspace ws("budget");
    const auto r = run({"--config", ws.config(), "budget"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(ws.out("budget.json")));
    CHECK(j["efficiency"].get<double>() == doctest::Approx(0.35 * std::pow(10.0, -0.18) * 0.57));
}

TEST_CASE("payne-lacey report") {
    Workspace ws("pl");
    REQUIRE(run({"--config", ws.config(), "payne-lacey"}).code == 0);
    const auto j = json::parse(slurp(ws.out("payne_lacey.json")));
    CHECK(j.contains("meta"));
}

TEST_CASE("repeated solves write identical bytes") {
    Workspace ws("solve", coarse_json());
    REQUIRE(run({"--config", ws.config(), "solve"}).code == 0);
    const auto modes = slurp(ws.out("modes.json"));
    const auto ex = slurp(ws.out("mode0_ex.csv"));
    REQUIRE(run({"--config", ws.config(), "solve"}).code == 0);
    CHECK(slurp(ws.out("modes.json")) == modes);
    CHECK(slurp(ws.out("mode0_ex.csv")) == ex);
    CHECK(ex.rfind("# wgkit ", 0) == 0);
    CHECK(ex.find("# command: solve") != std::string::npos);
    CHECK(json::parse(modes)["meta"]["command"] == "solve");
}
