#include "loel/io.hpp"
#include "loel/locate.hpp"
#include "loel_cli/cli.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using loel::cli::cli_dispatch;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "loel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliWorkspace : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("loel_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const nlohmann::json cfg = {{"campaign", {{"grid_spacing_mm", 40}, {"test_events", 6}, {"dtoa_noise_std_s", 0}}},
                                {"qpso", {{"particles", 6}, {"iterations", 8}}},
                                {"gp", {{"max_training_points", 40}}},
                                {"locate", {{"grid_spacing_mm", 5}}}};
    std::ofstream(dir_ / "config.json") << cfg.dump(2);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string config() const { return path("config.json"); }

  fs::path dir_;
};

}  // namespace

TEST(Cli, UnknownSubcommandIsAUsageError) {
  const CliRun r = run({"frobnicate"});
  EXPECT_EQ(r.code, loel::cli::kUsage);
  EXPECT_NE(r.err.find("unknown subcommand 'frobnicate'"), std::string::npos);
  EXPECT_NE(r.err.find("sweep"), std::string::npos);
}

TEST(Cli, MissingSubcommandAndMissingOptionAreUsageErrors) {
  EXPECT_EQ(run({}).code, loel::cli::kUsage);
  EXPECT_EQ(run({"train"}).code, loel::cli::kUsage);
  EXPECT_EQ(run({"sweep", "--workers", "many"}).code, loel::cli::kUsage);
}

TEST(Cli, HelpExitsCleanly) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("synth"), std::string::npos);
}

TEST_F(CliWorkspace, MalformedTableReportsTheLine) {
  std::ofstream(path("bad.csv")) << "event_id,x_mm,y_mm,dtoa_0_1\na,1,2,0\nb,1,2,oops\n";
  const CliRun r = run({"locate", "--events", path("bad.csv"), "--method", "deltat", "--training", path("bad.csv")});
  EXPECT_EQ(r.code, loel::cli::kDataError);
  EXPECT_NE(r.err.find("bad.csv:3:"), std::string::npos) << r.err;
}

TEST_F(CliWorkspace, InvalidConfigIsADataError) {
  std::ofstream(path("neg.json")) << R"({"campaign": {"grid_spacing_mm": -5}})";
  const CliRun r = run({"synth", "--config", path("neg.json"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, loel::cli::kDataError);
  EXPECT_NE(r.err.find("neg.json"), std::string::npos) << r.err;
}

TEST_F(CliWorkspace, SynthTrainLocateEvalRoundTrip) {
  const std::string out = path("data");
  ASSERT_EQ(run({"synth", "--config", config(), "--out-dir", out}).code, 0);
  const auto training = loel::io::read_event_table(fs::path(out) / "training.csv");
  const auto tests = loel::io::read_event_table(fs::path(out) / "test.csv");
  EXPECT_EQ(tests.events.size(), 6u);
  EXPECT_EQ(training.pairs.size(), 28u);

  const CliRun tr = run({"train", "--config", config(), "--events", out + "/training.csv", "--out", path("bank.json")});
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_EQ(loel::locate::bank_from_json(loel::io::read_json_file(path("bank.json"))).size(), 28u);

  const CliRun lo = run({"locate", "--config", config(), "--events", out + "/test.csv", "--model", path("bank.json"),
                      "--out", path("pred.jsonl")});
  ASSERT_EQ(lo.code, 0) << lo.err;
  std::ifstream pin(path("pred.jsonl"));
  const auto preds = loel::io::read_predictions(pin);
  ASSERT_EQ(preds.size(), 6u);
  for (std::size_t i = 0; i < preds.size(); ++i) EXPECT_EQ(preds[i].event_id, tests.events[i].id);

  const CliRun ev = run({"eval", "--predictions", path("pred.jsonl"), "--truth", out + "/test.csv"});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_EQ(ev.out.substr(0, 15), "rmse_mm,events\n");
  EXPECT_NE(ev.out.find(",6\n"), std::string::npos);

  const CliRun dt = run({"locate", "--config", config(), "--events", out + "/test.csv", "--method", "deltat",
                      "--training", out + "/training.csv"});
  ASSERT_EQ(dt.code, 0) << dt.err;
  EXPECT_EQ(line_count(dt.out), 6u);
}

TEST_F(CliWorkspace, MapHasOneRowPerGridPoint) {
  const std::string out = path("data");
  ASSERT_EQ(run({"synth", "--config", config(), "--out-dir", out}).code, 0);
  ASSERT_EQ(run({"train", "--config", config(), "--events", out + "/training.csv", "--out", path("bank.json")}).code, 0);
  const CliRun m = run({"map", "--config", config(), "--model", path("bank.json"), "--events", out + "/test.csv",
                     "--grid-spacing", "8", "--pgm", path("map.pgm")});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto grid = loel::locate::make_predictive_grid(loel::default_geometry(), 8.0);
  EXPECT_EQ(line_count(m.out), grid.points.size() + 1);
  EXPECT_EQ(slurp(path("map.pgm")).substr(0, 3), "P5\n");
  EXPECT_EQ(run({"map", "--model", path("bank.json"), "--events", out + "/test.csv", "--event-id", "nope"}).code,
            loel::cli::kDataError);
}

TEST_F(CliWorkspace, WaveformsPickBackToTheSyntheticDtoa) {
  const std::string out = path("data");
  ASSERT_EQ(run({"synth", "--config", config(), "--out-dir", out, "--waveforms", path("waves"), "--snr", "60"}).code, 0);
  const CliRun p = run({"pick", "--input", path("waves"), "--out", path("picked.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto picked = loel::io::read_event_table(fs::path(path("picked.csv")));
  const auto truth = loel::io::read_event_table(fs::path(out) / "test.csv");
  ASSERT_EQ(picked.events.size(), truth.events.size());
  EXPECT_EQ(picked.pairs.pairs(), truth.pairs.pairs());
  for (std::size_t i = 0; i < picked.events.size(); ++i) {
    EXPECT_EQ(picked.events[i].id, truth.events[i].id);
    EXPECT_FALSE(picked.events[i].origin.has_value());
    for (std::size_t j = 0; j < truth.pairs.size(); ++j) {
      EXPECT_NEAR(picked.events[i].dtoa[j], truth.events[i].dtoa[j], 10.0 / 5e6);  // a few samples either side
    }
  }
}

TEST_F(CliWorkspace, SweepIsReproducible) {
  const std::vector<std::string> args{"sweep", "--config", config(), "--spacings", "30,40", "--methods", "truth,deltat",
                                      "--test-sets", "2", "--events-per-set", "5"};
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(line_count(a.out), 5u);
  std::vector<std::string> seeded = args;
  seeded.insert(seeded.end(), {"--seed", "9"});
  EXPECT_NE(run(seeded).out, a.out);
}
