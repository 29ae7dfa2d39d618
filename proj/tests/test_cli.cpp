#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tfatom/commands.hpp"
#include "tfatom/errors.hpp"

using namespace tfatom;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    auto d = fs::temp_directory_path() / "tfatom_cli_test";
    fs::create_directories(d);
    return d;
}

std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("config keys") {
    auto c = default_config("phase-sweep");
    c.set("ell", "0, 2");
    c.set("tau", "0.25");
    c.set("n-max", "12");
    CHECK(c.ell == std::vector<int>{0, 2});
    CHECK(c.tau == std::vector<double>{0.25});
    CHECK(c.n_max == 12);
    CHECK_THROWS_AS(c.set("nonsense", "1"), DomainError);
    CHECK_THROWS_AS(c.set("tol", "abc"), DomainError);
    CHECK_THROWS_AS(c.set("jobs", "1.5"), DomainError);
    CHECK_THROWS_AS(default_config("nope"), DomainError);
}

TEST_CASE("config validation") {
    auto c = default_config("phase-sweep");
    c.ell.clear();
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = default_config("tf-solve");
    c.tol = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = default_config("tf-solve");
    c.format = "xml";
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = default_config("spectrum");
    c.mode = "counterexample";
    c.ell_max = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    for (const auto& s : subcommand_names()) CHECK_NOTHROW(default_config(s).validate());
}

TEST_CASE("config files and JSON round trip") {
    auto dir = scratch_dir();
    auto p = (dir / "run.cfg").string();
    {
        std::ofstream f(p);
        f << "# comment\nmode = madelung\nn-max=5\n";
    }
    auto c = default_config("aufbau");
    load_config_file(c, p);
    CHECK(c.mode == "madelung");
    CHECK(c.n_max == 5);

    auto w = default_config("wkb-verify");
    w.lambda = {12.5, 0.1 + 0.2};
    auto j = w.to_json();
    auto back = default_config("wkb-verify");
    back.lambda.clear();
    back.apply_json(nlohmann::json{{"config", j}});
    CHECK(back.to_json() == j);
    CHECK_THROWS_AS(default_config("aufbau").apply_json(j), DomainError);
}

TEST_CASE("tf-solve") {
    auto c = default_config("tf-solve");
    auto r = run_command(c);
    CHECK(r.table.header == std::vector<std::string>{"x", "chi", "dchi"});
    CHECK(r.table.rows.size() == 4001);
    CHECK(r.summary.contains("d_cl"));
    CHECK(r.summary.contains("slope_origin"));
    CHECK(r.summary["residual"].get<double>() < 1e-8);
    c.grid_points = 8001;
    auto r2 = run_command(c);
    CHECK(std::abs(r2.summary["d_cl"].get<double>() - r.summary["d_cl"].get<double>()) < 1e-7);
}

TEST_CASE("outputs") {
    auto dir = scratch_dir();
    auto c = default_config("aufbau");
    c.mode = "madelung";
    c.n_max = 7;
    c.out = (dir / "mad").string();
    auto res = run_command(c);
    auto files = write_outputs(c, res);
    REQUIRE(files.size() == 2);
    auto csv = slurp(c.out + ".csv");
    CHECK(csv.rfind("n,Z_l0,Z_l1,Z_l2,Z_l3\n1,1,5,21,57\n", 0) == 0);
    auto doc = nlohmann::json::parse(slurp(c.out + ".json"));
    CHECK(doc["config"]["n-max"] == 7);

    // rerun from the emitted JSON reproduces the CSV body
    auto again = default_config("aufbau");
    load_config_file(again, c.out + ".json");
    again.out = (dir / "mad2").string();
    write_outputs(again, run_command(again));
    CHECK(slurp(again.out + ".csv") == csv);

    c.format = "json";
    c.out = (dir / "mad3").string();
    CHECK(write_outputs(c, res).size() == 1);
    CHECK(nlohmann::json::parse(slurp(c.out + ".json"))["rows"].size() == 7);

    c.out = (dir / "missing" / "x").string();
    try {
        write_outputs(c, res);
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find((dir / "missing").string()) != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("wkb-verify single lambda") {
    auto c = default_config("wkb-verify");
    c.ell = {1};
    c.lambda = {20};
    auto r = run_command(c);
    CHECK(r.table.rows.size() == 1);
    c.interval = {1e-4, 1e-3};
    c.ell = {3};
    c.lambda = {10};
    r = run_command(c);
    CHECK(std::get<long long>(r.table.rows[0][6]) == 1);
}

TEST_CASE("phase-sweep is deterministic across job counts") {
    auto c = default_config("phase-sweep");
    c.tau = {0.5};
    c.ell = {0, 1};
    c.n_max = 12;
    auto a = run_command(c);
    c.jobs = 3;
    auto b = run_command(c);
    CHECK(a.table.to_csv() == b.table.to_csv());
    CHECK(a.summary.dump() == b.summary.dump());
}

TEST_CASE("spectrum and aufbau tables") {
    auto c = default_config("spectrum");
    c.ell = {0};
    c.mu = {-1.0};
    auto r = run_command(c);
    CHECK(r.summary["max_error"].get<double>() < 1e-4);
    auto a = default_config("aufbau");
    a.mode = "converges";
    a.tau = {0.3};
    a.n_max = 200;
    r = run_command(a);
    CHECK(std::get<std::string>(r.table.rows[0][1]) == "converged");
}
