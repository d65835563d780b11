#include "doctest_main.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "lgkin/config.hpp"
#include "lgkin/evolution.hpp"

using namespace lgkin;

TEST_CASE("config parsing") {
    ExperimentConfig c = ExperimentConfig::from_string("", "empty");
    CHECK(c.n_theta == 16);
    CHECK(c.init == "cosine");
    c = ExperimentConfig::from_string(
        "# comment\n"
        "n_theta = 32\n"
        "T = 12.5\n"
        "init = equilibrium\n"
        "k_list = 1,0;3,4\n"
        "snapshot_times = 1,2.5,5\n",
        "test");
    CHECK(c.n_theta == 32);
    CHECK(c.T == 12.5);
    CHECK(c.init == "equilibrium");
    REQUIRE(c.k_list.size() == 2);
    CHECK(c.k_list[1].x == 3.0);
    CHECK(c.k_list[1].y == 4.0);
    REQUIRE(c.snapshot_times.size() == 3);
    CHECK(c.snapshot_times[1] == 2.5);
}

TEST_CASE("unknown keys are rejected with a line number") {
    try {
        ExperimentConfig::from_string("n_theta = 16\nbogus_key = 3\n", "cfg");
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("cfg:2") != std::string::npos);
        CHECK(msg.find("bogus_key") != std::string::npos);
    }
    CHECK_THROWS(ExperimentConfig::from_string("init = nonsense\n", "cfg"));
    CHECK_THROWS(ExperimentConfig::from_string("just a line\n", "cfg"));
}

TEST_CASE("manifest serializes to parseable json") {
    RunManifest m;
    m.command = "test";
    m.checks.push_back({"alpha", 0.5, 1.0, "<", true, ""});
    m.checks.push_back({"beta", 2.0, 1.0, "<", false, "why"});
    m.constants["gamma"] = 1.25;
    CHECK(!m.all_pass());
    auto j = nlohmann::json::parse(m.to_json());
    CHECK(j["checks"].size() == 2);
    CHECK(j["all_pass"] == false);
    CHECK(j["constants"]["gamma"] == 1.25);
    std::string path = "/tmp/lgkin_manifest_test.json";
    write_manifest(path, m);
    std::ifstream is(path);
    CHECK(is.good());
}

TEST_CASE("custom datum file") {
    std::string path = "/tmp/lgkin_harmonics.csv";
    {
        std::ofstream os(path);
        os << "m,cos_amp,sin_amp\n1,0.5,0\n2,0,0.25\n";
    }
    InitialData d = file_datum(path);
    double th = 0.7, s = 0.3, h = 0.2;
    double expect = (1.0 + 0.5 * std::cos(th) + 0.25 * std::sin(2.0 * th)) / kTwoPi *
                    equilibrium(s, h);
    CHECK(d.eval(th, s, h) == doctest::Approx(expect).epsilon(1e-14));
    {
        std::ofstream os(path);
        os << "1\n";  // missing fields
    }
    CHECK_THROWS(file_datum(path));
    CHECK_THROWS(file_datum("/tmp/definitely_missing_lgkin.csv"));
}

TEST_CASE("identical runs produce byte-identical series") {
    // the evolve pipeline writes CSV deterministically
    std::string a, b;
    for (std::string* out : {&a, &b}) {
        SolverSetup S = SolverSetup::make(8, 12, 5.0, 8, 2.0, 0.05);
        InitialData cd = cosine_datum();
        CollisionTrace tr = solve_trace(S, cd);
        char buf[128];
        for (double t : {0.5, 1.0, 2.0}) {
            RealField f = reconstruct(S, cd, tr, t);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t,
                          equilibrium_distance(S, f, 1.0, 1));
            *out += buf;
        }
    }
    CHECK(a == b);
}

TEST_CASE("command line interface round trip") {
    // ctest runs from the build directory where the binary lives
    std::FILE* probe = std::fopen("./lgkin", "rb");
    if (!probe) return;  // binary elsewhere (manual test invocation)
    std::fclose(probe);
    CHECK(std::system("mkdir -p /tmp/lgkin_cli_a /tmp/lgkin_cli_b") == 0);
    std::string cmd =
        "./lgkin evolve --T 2 --dt 0.05 --grid 8,12,8 --smax 5 --init cosine --out ";
    CHECK(std::system((cmd + "/tmp/lgkin_cli_a > /dev/null").c_str()) == 0);
    CHECK(std::system((cmd + "/tmp/lgkin_cli_b > /dev/null").c_str()) == 0);
    CHECK(std::system("cmp -s /tmp/lgkin_cli_a/series.csv /tmp/lgkin_cli_b/series.csv") == 0);
    // unknown config keys surface as errors with a nonzero exit
    {
        std::ofstream os("/tmp/lgkin_cli_a/bad.cfg");
        os << "not_a_key = 1\n";
    }
    int rc = std::system(
        "./lgkin evolve --config /tmp/lgkin_cli_a/bad.cfg --out /tmp/lgkin_cli_a 2>/dev/null");
    CHECK(rc != 0);
}
