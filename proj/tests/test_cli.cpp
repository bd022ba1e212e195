#include "ftrans/cli.hpp"
#include "ftrans/families.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ftrans;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate") {
    Result r = run({"generate", "--construction", "p54_delta"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["name"] == "p54_delta");
    CHECK(j["kind"] == "unilateral");
    CHECK(run({"generate", "--construction", "nope"}).code == 1);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"density", "--construction", "p44_ruler"}).code == 1);
    CHECK(run({"classify", "--construction", "p41_1", "--horizon", "abc"}).code == 1);
    CHECK(run({"classify", "--construction", "constant", "--horizon", "20"}).code == 1);
    CHECK(run({"families", "--set", "{\"runs\": []}", "--family", "bogus", "--horizon", "10"}).code == 1);
    CHECK(run({"families", "--set", "{not json", "--family", "thick", "--horizon", "10"}).code == 1);
    CHECK(run({"simulate", "sandwich", "--construction", "bd1_nonmixing", "--N", "3", "--R", "2"}).code == 1);
    CHECK(run({"algebra", "verify-lemma23", "--n", "9"}).code == 1);
    CHECK(run({"classify", "--construction", "p41_1", "--horizon", "1000000000000"}).code == 1);
}

TEST_CASE("density output for the ruler construction") {
    Result r = run({"density", "--construction", "p44_ruler", "--blocks", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("n,count,ratio_num,ratio_den,ratio_float\n", 0) == 0);
    CHECK(r.out.find("\n22,15,15,22,") != std::string::npos);

    Result j = run({"density", "--construction", "constant", "--blocks", "3"});
    CHECK(j.code == 1);
    Result s = run({"density", "--set", "{\"runs\": [[\"2\", \"6\"]]}", "--horizon", "10", "--checkpoints", "5,10",
                    "--format", "json"});
    REQUIRE(s.code == 0);
    json d = json::parse(s.out);
    CHECK(d["checkpoints"][1]["count"] == "4");
}

TEST_CASE("lemma and hierarchy") {
    Result r = run({"algebra", "verify-lemma23", "--n", "4"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["families"] == 166);
    CHECK(j["counterexample"].is_null());
}

TEST_CASE("classify output and reproducibility") {
    std::vector<std::string> args{"classify", "--construction", "p54_delta", "--horizon", "100000",
                                  "--classes", "delta_star,mixing"};
    Result a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    json j = json::parse(a.out);
    CHECK(j["summary"]["delta_star"] == "holds_at_horizon");
    CHECK(j["summary"]["mixing"] == "fails_at_horizon");
}

TEST_CASE("emitted verdicts re-verify after reloading") {
    std::string set = R"({"runs": [["1", "40"], ["45", "300"], ["302", "5000"]]})";
    for (const char* f : {"syndetic", "thick", "cofinite", "piecewise_syndetic", "D_lower_1", "BD_lower_pos"}) {
        Result r = run({"families", "--set", set, "--family", f, "--horizon", "5000", "--verify"});
        REQUIRE(r.code == 0);
        json j = json::parse(r.out);
        CHECK(j["verified"] == true);
        j.erase("verified");
        RunSet a = runset_from_json(json::parse(set));
        CHECK(verify_verdict(verdict_from_json(j), a));
    }
    Result ip = run({"families", "--set", set, "--family", "ip", "--mode", "contains_FS", "--generators", "3,7,11",
                     "--horizon", "5000", "--verify"});
    CHECK(ip.code == 0);
    Result t = run({"families", "--set", set, "--family", "syndetic", "--transform", "tilde", "--n-max-transform", "2",
                    "--horizon", "5000", "--verify"});
    CHECK(t.code == 0);
}

TEST_CASE("atomic artifact files") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ftrans_cli_test";
    fs::create_directories(dir);
    fs::path target = dir / "spec.json";
    Result r = run({"--output", target.string(), "generate", "--construction", "p41_3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(fs::exists(target));
    CHECK(!fs::exists(dir / "spec.json.tmp"));
    std::ifstream in(target);
    json j = json::parse(in);
    CHECK(j["name"] == "p41_3");

    // the written spec drives a simulation
    Result s = run({"simulate", "sandwich", "--weight", target.string(), "--horizon", "2000"});
    CHECK(s.code == 0);
    Result c = run({"simulate", "criterion", "--weight", target.string(), "--vector",
                    R"({"entries": [[0, "1"], [2, "3/4"]]})", "--epsilon", "1/8", "--horizon", "2000"});
    CHECK(c.code == 0);
    fs::remove_all(dir);
}

}  // TEST_SUITE
