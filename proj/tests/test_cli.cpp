// Copyright 2026 The nlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the built nlab binary through std::system and checks the exit-code
// contract: 0 ok, 1 parse, 2 validation, 3 relation failure.

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "test_util.hpp"

namespace nlab {
namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("nlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }

    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }
    std::string write(const std::string &name, const std::string &text) const {
        write_text_file(path(name), text);
        return path(name);
    }
    std::string write(const std::string &name, const Json &j) const {
        return write(name, dump(j));
    }
    static std::string slurp(const std::string &p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    RunResult run(const std::string &args) const {
        const std::string out = path("stdout.txt"), err = path("stderr.txt");
        const std::string cmd = std::string(NLAB_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
        const int status = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    fs::path dir_;
};

TEST_F(CliTest, ValidateSevenOutcomePovm) {
    const RunResult r = run("validate " + write("seven.povm.json", to_json(build_seven_outcome().povm)));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("valid povm"), std::string::npos);
}

TEST_F(CliTest, ValidateReportsInvariantViolation) {
    Json j = to_json(validate_povm({testing::diag({0.75, 0.25}), testing::diag({0.25, 0.75})}));
    j["effects"][1]["data"][0][0] = 0.5;
    const RunResult r = run("validate " + write("bad.povm.json", j));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("completeness"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("residual"), std::string::npos) << r.err;
}

TEST_F(CliTest, ValidateNonUnitTraceState) {
    Json j = to_json(DensityMatrix::maximally_mixed(2));
    j["matrix"]["data"][0][0] = 0.9;
    const RunResult r = run("validate " + write("bad.density.json", j));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unit trace"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedJsonAndBadArgumentsAreParseErrors) {
    EXPECT_EQ(run("validate " + write("broken.json", std::string("{\"type\": "))).code, 1);
    EXPECT_EQ(run("validate " + path("missing.json")).code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("apply a.json b.json --rule sideways").code, 1);
}

TEST_F(CliTest, DilateIdpRoundTrips) {
    const IdpFixture f = build_idp(std::numbers::pi / 3);
    const std::string povm = write("idp.povm.json", to_json(f.povm));
    const RunResult r = run("dilate " + povm + " --out " + path("idp.dilation.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const NaimarkDilation d = dilation_from_json(read_json_file(path("idp.dilation.json")));
    EXPECT_LT(povm_distance(reduce_to_povm(d), f.povm), 1e-8);
    EXPECT_EQ(run("validate " + path("idp.dilation.json")).code, 0);
}

TEST_F(CliTest, DilateProjectiveGivesTrivialAncilla) {
    const Povm m = validate_povm({basis_projector(3, 0), basis_projector(3, 1) + basis_projector(3, 2)});
    const RunResult r = run("dilate " + write("proj.povm.json", to_json(m)));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["dim_a"].get<int>(), 1);
}

TEST_F(CliTest, DilateFromKraus) {
    const Povm m = random_povm(2, 3, 4);
    const std::string povm = write("m.povm.json", to_json(m));
    const std::string good = write("good.kraus.json", to_json(gram_correction_family(m)));
    EXPECT_EQ(run("dilate " + povm + " --mode from-kraus --kraus " + good).code, 0);
    const KrausCorrectionFamily broken = detail::broken_family(2, 4, 1e-3);
    const std::string bad = write("bad.kraus.json", to_json(broken));
    const RunResult r = run("dilate " + write("b.povm.json", to_json(broken.povm())) + " --mode from-kraus --kraus " + bad);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("correction condition"), std::string::npos) << r.err;
    EXPECT_EQ(run("dilate " + povm + " --mode from-kraus").code, 1);
}

TEST_F(CliTest, ApplyIntrinsicIdpOnZero) {
    const IdpFixture f = build_idp(std::numbers::pi / 3);
    const std::string state = write("zero.density.json", to_json(DensityMatrix::pure(basis_ket(2, 0))));
    const std::string dil = write("idp.dilation.json", to_json(f.dilation_qutrit));
    const RunResult r = run("apply " + state + " " + dil + " --rule intrinsic");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json out = Json::parse(r.out);
    EXPECT_NEAR(out["branches"][0]["probability"].get<double>(), 0.75, 1e-12);
    const Matrix post = matrix_from_json(out["branches"][0]["normalized"]);
    EXPECT_LT(testing::max_diff(post, testing::diag({0.75, 0.25})), 1e-12);

    // Same branches through the extracted family.
    ASSERT_EQ(run("extract " + dil + " --out " + path("idp.kraus.json")).code, 0);
    const RunResult via_kraus = run("apply " + state + " " + path("idp.kraus.json") + " --rule intrinsic");
    ASSERT_EQ(via_kraus.code, 0) << via_kraus.err;
    const Json k = Json::parse(via_kraus.out);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LT(testing::max_diff(matrix_from_json(k["branches"][i]["state"]),
                                    matrix_from_json(out["branches"][i]["state"])),
                  1e-9);
    }
}

TEST_F(CliTest, ApplyProjectiveAndRuleErrors) {
    const std::string state = write("mixed.density.json", to_json(DensityMatrix::from_matrix(testing::diag({0.6, 0.4}))));
    const Pvm z = validate_pvm({basis_projector(2, 0), basis_projector(2, 1)});
    const RunResult r = run("apply " + state + " " + write("z.pvm.json", to_json(z)) + " --rule projective");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(testing::max_diff(matrix_from_json(Json::parse(r.out)["branches"][0]["normalized"]), basis_projector(2, 0)),
              1e-15);
    const std::string qutrit = write("q.density.json", to_json(DensityMatrix::maximally_mixed(3)));
    EXPECT_EQ(run("apply " + qutrit + " " + path("z.pvm.json") + " --rule luders").code, 2);
    EXPECT_EQ(run("apply " + state + " " + path("z.pvm.json") + " --rule textbook").code, 1);
}

TEST_F(CliTest, VerifyPassesAndIsDeterministic) {
    const RunResult a = run("verify --trials 20 --seed 5 --out " + path("a.csv"));
    ASSERT_EQ(a.code, 0) << a.out << a.err;
    EXPECT_NE(a.out.find("summary gentle_family"), std::string::npos);
    EXPECT_NE(a.out.find("PASS"), std::string::npos);
    ASSERT_EQ(run("verify --trials 20 --seed 5 --out " + path("b.csv")).code, 0);
    const std::string csv = slurp(path("a.csv"));
    EXPECT_EQ(csv, slurp(path("b.csv")));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kReportCsvHeader);
    ASSERT_EQ(run("verify --trials 5 --seed 5 --out " + path("a.json")).code, 0);
    EXPECT_TRUE(Json::parse(slurp(path("a.json")))["pass"].get<bool>());
}

TEST_F(CliTest, VerifyConfigFile) {
    const std::string cfg = write("sweep.json", Json::parse(R"({"trials": 4, "seed": 2, "dims": [3], "relations": ["balance"]})"));
    const RunResult r = run("verify " + cfg);
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("summary balance rows=4"), std::string::npos) << r.out;
}

TEST_F(CliTest, VerifyInjectedBrokenFamilyExitsThree) {
    const RunResult r = run("verify --trials 3 --inject-broken-kraus");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("correction_condition"), std::string::npos);
    EXPECT_NE(r.out.find("failing seeds:"), std::string::npos);
}

TEST_F(CliTest, VerifyBadConfigIsValidationError) {
    EXPECT_EQ(run("verify --trials 2 --alphas 1.5").code, 2);
    EXPECT_EQ(run("verify --trials 2 --relations nope").code, 2);
    EXPECT_EQ(run("verify --trials 2 --dims two").code, 1);
}

TEST_F(CliTest, ScenarioIdp) {
    const RunResult r = run("scenario idp --beta 1.0471975512");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_LT(j["closed_form_max_deviation"].get<double>(), 1e-9);
    EXPECT_LT(j["qutrit_vs_qubit_max_deviation"].get<double>(), 1e-9);
    EXPECT_EQ(j["e_block_convention"], "column-index");
    EXPECT_EQ(run("scenario idp --beta 0").code, 2);
}

TEST_F(CliTest, ScenarioSevenOutcome) {
    const RunResult r = run("scenario seven-outcome --out " + path("seven.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = read_json_file(path("seven.json"));
    EXPECT_LT(j["first_round_reduction_error"].get<double>(), 1e-10);
    EXPECT_GT(j["repeatability"][0]["max_difference"].get<double>(), 0.1);
    EXPECT_EQ(j["findings_first_outcome"].size(), 9u);
    // Emitted artifacts re-validate.
    write("seven.dilation.json", j["dilation"]);
    EXPECT_EQ(run("validate " + path("seven.dilation.json")).code, 0);
}

}  // namespace
}  // namespace nlab
