#include <eulerlab/io.hpp>
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

using namespace eulerlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("eulerlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  Outcome run(const std::string& args, const std::string& env = "") const {
    std::string cmd = env + " " + std::string(EULERLAB_CLI_PATH) + " " + args + " >" + (dir / "stdout").string() +
                      " 2>" + (dir / "stderr").string();
    int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(dir / "stdout");
    r.err = read_text(dir / "stderr");
    return r;
  }

  [[nodiscard]] std::string out_flag() const { return "--out " + (dir / "out").string(); }
  [[nodiscard]] json result(const std::string& file) const { return read_json(dir / "out" / file); }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("solve1d --lambda").code, 1);
}

TEST_F(Cli, Solve1dWritesProfileAndEnvelope) {
  Outcome r = run("solve1d --lambda 4 --n 401 " + out_flag());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("residual="), std::string::npos);
  json j = result("profile.json");
  EXPECT_EQ(j.at("schema"), kSchema);
  EXPECT_EQ(j.at("command"), "solve1d");
  EXPECT_EQ(j.at("config").at("n"), 401);
  EXPECT_EQ(j.at("config").at("lambda"), 4.0);
  EXPECT_GT(j.at("result").at("slope_lower").get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(dir / "out" / "profile.csv"));
}

TEST_F(Cli, MissingRequiredFieldIsAConfigError) {
  Outcome r = run("solve1d " + out_flag());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("lambda"), std::string::npos);
}

TEST_F(Cli, SolverFailureIsReported) {
  Outcome r = run("solve1d --lambda 2 --n 201 " + out_flag());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(result("profile.json").at("result").at("error").at("code"), "NoSubsolution");
}

TEST_F(Cli, ConfigFileFillsUnsetFlags) {
  write_text(dir / "c.json", R"({"solve1d": {"lambda": 3.5, "n": 301}})");
  Outcome r = run("solve1d --config " + (dir / "c.json").string() + " --n 201 " + out_flag());
  ASSERT_EQ(r.code, 0) << r.err;
  json cfg = result("profile.json").at("config");
  EXPECT_EQ(cfg.at("lambda"), 3.5);
  EXPECT_EQ(cfg.at("n"), 201);
}

TEST_F(Cli, BadConfigFilesAreRejected) {
  write_text(dir / "unknown.json", R"({"lambda": 4, "lamda": 4})");
  Outcome a = run("solve1d --config " + (dir / "unknown.json").string() + " " + out_flag());
  EXPECT_EQ(a.code, 1);
  EXPECT_NE(a.err.find("lamda"), std::string::npos);
  write_text(dir / "typed.json", R"({"lambda": "four"})");
  Outcome b = run("solve1d --config " + (dir / "typed.json").string() + " " + out_flag());
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.err.find("lambda"), std::string::npos);
  write_text(dir / "broken.json", "{");
  EXPECT_EQ(run("solve1d --config " + (dir / "broken.json").string()).code, 1);
}

TEST_F(Cli, OutputDirectoryPrecedence) {
  fs::path env_dir = dir / "env";
  ASSERT_EQ(run("solve1d --lambda 4 --n 101", "EULERLAB_OUT=" + env_dir.string()).code, 0);
  EXPECT_TRUE(fs::exists(env_dir / "profile.json"));
  ASSERT_EQ(run("solve1d --lambda 4 --n 101 " + out_flag(), "EULERLAB_OUT=" + env_dir.string()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "profile.json"));
}

TEST_F(Cli, AnalyzeCatalogFlow) {
  Outcome r = run("analyze --catalog taylor-green --grid torus:256 " + out_flag());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("classification=FullCircle TC=", 0), 0u) << r.out;
  EXPECT_NE(r.out.find(" Jinf="), std::string::npos);
  EXPECT_NE(r.out.find(" gap="), std::string::npos);
  json j = result("analyze_report.json");
  EXPECT_NEAR(j.at("result").at("total_curvature").get<double>(), 25.1327, 0.03);
  EXPECT_TRUE(fs::exists(dir / "out" / "angle_set.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "kappa.csv"));
}

TEST_F(Cli, AnalyzeRejectsBadSources) {
  EXPECT_EQ(run("analyze --catalog poiseuille --grid torus:64 " + out_flag()).code, 1);
  EXPECT_EQ(run("analyze --catalog poiseuille " + out_flag()).code, 1);
  EXPECT_EQ(run("analyze --catalog nope --grid torus:64 " + out_flag()).code, 1);
  EXPECT_EQ(run("analyze --catalog couette --grid strip:4:x:17 " + out_flag()).code, 1);
  EXPECT_EQ(run("analyze " + out_flag()).code, 1);
  EXPECT_EQ(run("analyze --input " + (dir / "missing.json").string() + " " + out_flag()).code, 1);
}

TEST_F(Cli, SolveStripThenAnalyzeBundle) {
  Outcome s = run("solve strip --lambda 4 --nx 193 --ny 33 " + out_flag());
  ASSERT_EQ(s.code, 0) << s.err;
  json rep = result("strip_report.json");
  EXPECT_FALSE(rep.at("result").at("attachment_warning").get<bool>());
  Outcome a = run("analyze --input " + (dir / "out" / "strip_flow.json").string() + " --bins 64 --R 4 " + out_flag());
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.rfind("classification=TypeIIIUpper", 0), 0u) << a.out;
}

TEST_F(Cli, ShortStripWarnsButSucceeds) {
  Outcome s = run("solve strip --lambda 4 --L 2 --nx 33 --ny 17 " + out_flag());
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(result("strip_report.json").at("result").at("attachment_warning").get<bool>());
  EXPECT_EQ(run("solve strip --lambda 4 --nx 32 --ny 17 " + out_flag()).code, 1);
}

TEST_F(Cli, SolveHalfPlane) {
  Outcome s = run("solve halfplane --n 61 " + out_flag());
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "halfplane_flow.json"));
  EXPECT_LT(result("halfplane_report.json").at("result").at("diagonal_gap").get<double>(), 1e-8);
}

TEST_F(Cli, TraceWritesPolylines) {
  Outcome r = run("trace --catalog couette --grid strip:4:65:17 --seed -3,0.4 --seed 0,-0.5 --direction both " + out_flag());
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = read_text(dir / "out" / "trace.csv");
  EXPECT_EQ(csv.rfind("trace_id,order,x,y\n", 0), 0u);
  EXPECT_EQ(result("trace.json").at("result").at("polylines").size(), 2u);
  EXPECT_EQ(run("trace --catalog couette --grid strip:4:65:17 --seed 0,3 " + out_flag()).code, 1);
  EXPECT_EQ(run("trace --catalog couette --grid strip:4:65:17 --seed 0 " + out_flag()).code, 1);
}

TEST_F(Cli, VerifySuiteSelection) {
  Outcome r = run("verify --suite margin");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("PASS [10]", 0), 0u) << r.out;
  EXPECT_EQ(run("verify --suite nope").code, 1);
}

TEST_F(Cli, ReproduceFiguresFast) {
  ASSERT_EQ(run("reproduce figure1 --fast " + out_flag()).code, 0);
  EXPECT_EQ(result("figure1_stagnation.json").at("result").at("points").size(), 1u);
  EXPECT_TRUE(fs::exists(dir / "out" / "figure1_separatrices.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "figure1_streamlines.csv"));
  ASSERT_EQ(run("reproduce figure2 --fast " + out_flag()).code, 0);
  EXPECT_EQ(result("figure2_stagnation.json").at("result").at("points").size(), 2u);
  EXPECT_EQ(result("figure2_streamlines.json").at("result").at("polylines").size(), 20u);
}
