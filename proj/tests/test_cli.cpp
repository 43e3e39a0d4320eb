// Copyright 2026 The locc-geometry Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "locc/cli.hpp"

using namespace locc;
using io::Json;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

Json report(const std::vector<std::string> &args) {
    const Invocation r = invoke(args);
    INFO(r.err);
    REQUIRE(r.code == cli::kExitOk);
    return Json::parse(r.out);
}

std::filesystem::path temp_file(const std::string &name, const std::string &text) {
    const auto path = std::filesystem::temp_directory_path() / ("locc_cli_test_" + name);
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST_CASE("the report envelope", "[cli]") {
    const Json r = report({"validate", "--povm", "builtin:bell-states-as-povm"});
    CHECK(r["tool"] == cli::kToolName);
    CHECK(r["version"] == cli::kToolVersion);
    CHECK(r["command"] == "validate");
    CHECK(r["config"]["inputs"]["povm"] == "builtin:bell-states-as-povm");
    CHECK(r["config"].contains("tolerances"));
    CHECK_FALSE(r.contains("timing"));
    CHECK(r["result"]["valid"] == true);
    CHECK(r["result"]["completeness_residual"].get<double>() <= 1e-12);
    CHECK(report({"validate", "--povm", "builtin:bell-states-as-povm", "--timing"}).contains("timing"));
}

TEST_CASE("exit codes distinguish input errors", "[cli]") {
    const auto bad_json = temp_file("bad.json", "{\"parties\": [2, 2], \"elements\": [");
    const auto mismatch = temp_file("mismatch.json",
                                    R"({"parties": [2, 2], "elements": [{"matrix": [[1, 0], [0, 1]]}]})");
    const auto non_hermitian = temp_file(
        "nonherm.json", R"({"parties": [2, 2], "elements": [{"matrix": [[1,1,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}]})");

    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
    CHECK(invoke({"validate"}).code == cli::kExitUsage);
    CHECK(invoke({"validate", "--povm", "builtin:no-such"}).code == cli::kExitUnknownBuiltin);
    CHECK(invoke({"validate", "--povm", "/nonexistent/povm.json"}).code == cli::kExitMissingFile);
    CHECK(invoke({"validate", "--povm", bad_json.string()}).code == cli::kExitMalformedJson);
    CHECK(invoke({"validate", "--povm", mismatch.string()}).code == cli::kExitDimensionMismatch);
    CHECK(invoke({"validate", "--povm", non_hermitian.string()}).code == cli::kExitMalformedJson);
    CHECK(invoke({"path-search", "--povm", "builtin:footnote-measurement", "--target", "nope"}).code ==
          cli::kExitUsage);
    CHECK(invoke({"prop1", "--povm", "builtin:footnote-measurement", "--ensemble",
                  "builtin:footnote-measurement"}).code == cli::kExitUsage);
    CHECK(invoke({"member", "--povm", "builtin:footnote-measurement"}).code == cli::kExitUsage);
    const Invocation err = invoke({"validate", "--povm", "builtin:no-such"});
    CHECK(err.out.empty());
    CHECK(err.err.find("no-such") != std::string::npos);
    // help and version are not errors
    CHECK(invoke({"--help"}).code == cli::kExitOk);
    CHECK(invoke({"--version"}).out == std::string(cli::kToolVersion) + "\n");

    for (const auto &p : {bad_json, mismatch, non_hermitian}) {
        std::filesystem::remove(p);
    }
}

TEST_CASE("four paths on the four-outcome measurement", "[cli]") {
    const Json r = report({"path-search", "--povm", "builtin:footnote-measurement", "--target", "all",
                           "--seed", "1"});
    CHECK(r["result"]["found_count"] == 4);
    for (const auto &t : r["result"]["targets"]) {
        CHECK(t["found"] == true);
        CHECK(t["verification"]["passed"] == true);
    }
}

TEST_CASE("isolation of the first KKB outcome at reduced size", "[cli]") {
    const Json r = report({"isolate", "--povm", "builtin:kkb15-measurement", "--target", "psi11",
                           "--epsilon", "0.05", "--samples", "2000", "--seed", "7"});
    CHECK(r["result"]["all_hits_on_segment"] == true);
    CHECK(r["result"]["target_label"] == "psi11");
    CHECK(r["config"]["epsilon"] == 0.05);
}

TEST_CASE("obstruction is an analysis outcome, not an error", "[cli]") {
    const Invocation r = invoke({"path-search", "--povm", "builtin:bell-states-as-povm", "--target", "0",
                                 "--restarts", "1"});
    REQUIRE(r.code == cli::kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j["result"]["targets"][0]["found"] == false);
    CHECK(j["result"]["targets"][0].contains("obstruction"));
}

TEST_CASE("weights and membership", "[cli]") {
    const Json w = report({"weights", "--ensemble", "builtin:kkb15-products"});
    CHECK(w["result"]["feasible"] == true);
    bool forced = false;
    for (const auto &i : w["result"]["intervals"]) {
        if (i["label"] == "psi12") {
            forced = i["forced_zero"].get<bool>();
            CHECK(i["max"].get<double>() <= 1e-8);
        }
    }
    CHECK(forced);

    const Json in = report({"member", "--povm", "builtin:footnote-measurement", "--coefficients",
                            "1,0.5,0,0.25"});
    CHECK(in["result"]["feasible"] == true);
    const Json out = report({"member", "--povm", "builtin:footnote-measurement", "--coefficients",
                             "1,0.5,0,1.5"});
    CHECK(out["result"]["feasible"] == false);
}

TEST_CASE("hausdorff distances through the CLI", "[cli]") {
    const Json same = report({"hausdorff", "--povm", "builtin:footnote-measurement", "--other",
                              "builtin:footnote-measurement"});
    CHECK(same["result"]["hausdorff"].get<double>() <= 1e-10);
    const Json frob = report({"hausdorff", "--povm", "builtin:footnote-measurement", "--other",
                              "builtin:bell-states-as-povm", "--norm", "frobenius"});
    CHECK(frob["result"]["norm"] == "frobenius");
    CHECK(frob["result"]["hausdorff"].get<double>() > 0.5);
    CHECK(invoke({"hausdorff", "--povm", "builtin:footnote-measurement", "--other",
                  "builtin:footnote-measurement", "--norm", "spectral"}).code == cli::kExitUsage);
}

TEST_CASE("reports are byte-identical across runs and thread counts", "[cli]") {
    const std::vector<std::string> args{"isolate", "--povm", "builtin:kkb15-measurement", "--target",
                                        "all", "--samples", "400", "--grid-step", "0.5", "--seed", "3"};
    const std::string first = invoke(args).out;
    REQUIRE_FALSE(first.empty());
    for (const char *threads : {"1", "2", "3"}) {
        auto a = args;
        a.insert(a.end(), {"--threads", threads});
        CHECK(invoke(a).out == first);
    }
    auto seeded = args;
    seeded.back() = "4";
    CHECK(invoke(seeded).out != first);
}

TEST_CASE("--out writes the same bytes as stdout", "[cli]") {
    const auto path = std::filesystem::temp_directory_path() / "locc_cli_test_out.json";
    const std::vector<std::string> args{"simulate", "--space", "2,2", "--rounds", "2", "--seed", "8"};
    const std::string text = invoke(args).out;
    auto with_out = args;
    with_out.insert(with_out.end(), {"--out", path.string()});
    const Invocation r = invoke(with_out);
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == text);
    std::filesystem::remove(path);
}

TEST_CASE("simulated trees round-trip through JSON", "[cli]") {
    const Json a = report({"simulate", "--space", "2,3", "--rounds", "2", "--branching", "3", "--seed",
                           "12", "--emit-tree"});
    CHECK(a["result"]["all_branches_passed"] == true);
    CHECK(a["result"]["all_nested"] == true);
    CHECK(a["result"]["lemma4"]["passed"] == true);
    const auto path = temp_file("tree.json", a["result"]["tree"].dump());
    const Json b = report({"simulate", "--tree", path.string(), "--emit-tree"});
    std::filesystem::remove(path);
    for (const char *key : {"nodes", "leaves", "rounds", "branches", "leaf_povm", "tree"}) {
        CHECK(a["result"][key] == b["result"][key]);
    }
}

TEST_CASE("normalized-path certificates through the CLI", "[cli]") {
    const Json r = report({"prop1", "--povm", "builtin:footnote-measurement", "--ensemble",
                           "builtin:footnote-states"});
    CHECK(r["result"]["all_passed"] == true);
    CHECK(r["result"]["partition"]["ok"] == true);
    for (const auto &t : r["result"]["targets"]) {
        CHECK(t["certificate"]["f_start"].get<double>() == Catch::Approx(0.25).margin(1e-12));
    }
}

TEST_CASE("ensemble listing and analysis", "[cli]") {
    const Json list = report({"ensembles"});
    CHECK(list["result"]["builtins"].size() == builtin_names().size());
    const Json kkb = report({"ensembles", "--name", "kkb15", "--povm", "builtin:kkb15-measurement"});
    CHECK(kkb["result"]["orthocomplement"].size() == 1);
    CHECK(kkb["result"]["kernel_product_search"]["found"] == false);
    CHECK(kkb["result"]["kernel_product_search"]["residual"].get<double>() >= 0.1);
    CHECK(kkb["result"]["partition"]["ok"] == true);
    CHECK(invoke({"ensembles", "--name", "nothing"}).code == cli::kExitUnknownBuiltin);
}

TEST_CASE("JSON numbers fold negative zero and write non-finite values as null", "[cli]") {
    CHECK(io::number(-0.0).dump() == "0.0");
    CHECK(io::number(std::numeric_limits<double>::quiet_NaN()).is_null());
    CHECK(io::number(std::numeric_limits<double>::infinity()).is_null());
    CHECK(io::number(1.5).get<double>() == 1.5);
}
