#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "../support.hpp"
#include "qsd/json_io.hpp"

using namespace qsd;
using nlohmann::json;
using qsd::testing::rng;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QSD_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

json slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        char tmpl[] = "/tmp/qsd_cli_XXXXXX";
        REQUIRE(mkdtemp(tmpl) != nullptr);
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("matrix json round trip is exact") {
    auto gen = rng(51);
    const CMat m = qsd::testing::random_matrix(gen, 3);
    const CMat back = matrix_from_json(matrix_to_json(m));
    CHECK(max_abs_diff(m, back) == 0.0);
}

TEST_CASE("ensemble json round trip is exact") {
    auto gen = rng(52);
    const StateEnsemble e = qsd::testing::random_ensemble(gen, 2, 2, 3);
    const StateEnsemble back = ensemble_from_json(ensemble_to_json(e));
    REQUIRE(back.size() == e.size());
    CHECK(back.d1() == e.d1());
    CHECK(back.d2() == e.d2());
    CHECK(back.separable_asserted() == e.separable_asserted());
    for (int i = 0; i < e.size(); ++i) {
        CHECK(back.prior(i) == e.prior(i));
        CHECK(max_abs_diff(back.state(i).mat(), e.state(i).mat()) == 0.0);
    }
}

TEST_CASE("povm json round trip is exact") {
    const Povm l = example_local_povm(2);
    const Povm back = povm_from_json(povm_to_json(l));
    REQUIRE(back.size() == l.size());
    for (int i = 0; i < l.size(); ++i)
        CHECK(max_abs_diff(back.element(i).mat(), l.element(i).mat()) == 0.0);
}

TEST_CASE("solve result json round trip preserves every field") {
    const StateEnsemble e = example_ensemble(2, 1.0);
    const SolveResult r = solve_qg(e);
    const ResultData back = result_from_json(result_to_json(r));
    CHECK(back.problem == ProblemKind::QG);
    CHECK(back.value == r.value);
    CHECK(back.certified_gap == r.certified_gap);
    REQUIRE(back.povm.size() == r.povm.size());
    for (int i = 0; i < r.povm.size(); ++i)
        CHECK(max_abs_diff(back.povm.element(i).mat(), r.povm.element(i).mat()) == 0.0);
    CHECK(max_abs_diff(back.dual_K.mat(), r.dual_K.mat()) == 0.0);
}

TEST_CASE("malformed json is rejected with a validation error") {
    CHECK_THROWS_AS(matrix_from_json(json{{"rows", 2}, {"cols", 2}}), ValidationError);
    CHECK_THROWS_AS(matrix_from_json(json{{"rows", 2},
                                          {"cols", 2},
                                          {"data", json::array({json::array({1.0, 0.0})})}}),
                    ValidationError);
    CHECK_THROWS_AS(ensemble_from_json(json{{"d1", 2}, {"d2", 2}}), ValidationError);
    CHECK_THROWS_AS(ensemble_from_json(json::array()), ValidationError);
    CHECK_THROWS_AS(povm_from_json(json{{"d1", 2}, {"d2", 2}, {"elements", 3}}), ValidationError);
    CHECK_THROWS_AS(result_from_json(json{{"problem", "nope"}}), ValidationError);
}

TEST_CASE("cli drives the full workflow through files") {
    TempDir tmp;
    const std::string ens = (tmp.path / "ens.json").string();
    const std::string res = (tmp.path / "res.json").string();
    const std::string povm = (tmp.path / "povm.json").string();
    const std::string bounds = (tmp.path / "bounds.json").string();

    REQUIRE(run_cli("example --d 2 --lambda 1.0 --out " + ens) == 0);
    REQUIRE(run_cli("example --d 2 --emit local-povm --out " + povm) == 0);

    CHECK(run_cli("solve --problem qg --in " + ens + " --out " + res) == 0);
    const json rj = slurp(res);
    CHECK(rj.at("problem") == "qg");
    CHECK(std::abs(rj.at("value").get<double>() - 0.5) < 1e-6);
    CHECK(rj.at("certified_gap").get<double>() <= 1e-8);

    CHECK(run_cli("certify --kind qg --ensemble " + ens + " --povm " + povm) == 0);
    CHECK(run_cli("certify --kind global --ensemble " + ens + " --povm " + povm) == 1);
    CHECK(run_cli("certify --kind ppt --povm " + povm) == 0);
    CHECK(run_cli("certify --kind local --ensemble " + ens + " --povm " + povm) == 0);

    CHECK(run_cli("bounds --in " + ens + " > " + bounds) == 0);
    const json bj = slurp(bounds);
    CHECK(std::abs(bj.at("p_G").get<double>() - 1.0) < 1e-6);
    CHECK(std::abs(bj.at("q_G").get<double>() - 0.5) < 1e-6);
    CHECK(std::abs(bj.at("p_PPT").get<double>() - 0.5) < 1e-6);
    CHECK(bj.at("ordering_ok") == true);
    CHECK(bj.at("nlwe_flag") == false);
}

TEST_CASE("cli maps failures to its exit code contract") {
    TempDir tmp;
    const std::string bad = (tmp.path / "bad.json").string();
    {
        std::ofstream out(bad);
        out << "{ not json";
    }
    const std::string out_file = (tmp.path / "never.json").string();

    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("solve --problem pg") == 2);
    CHECK(run_cli("solve --problem nope --in " + bad) == 2);
    CHECK(run_cli("example --d 1") == 2);
    CHECK(run_cli("example --d 2 --lambda 2.0") == 2);
    CHECK(run_cli("solve --problem pg --in " + bad + " --out " + out_file) == 2);
    CHECK(!std::filesystem::exists(out_file));
    CHECK(run_cli("solve --problem pg --in /nonexistent.json") == 2);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("example --help") == 0);
}
