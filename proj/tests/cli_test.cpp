#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string command = std::string(QMGG_CLI_PATH) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"), pclose);
  std::string output;
  char buf[4096];
  while (const std::size_t n = fread(buf, 1, sizeof buf, pipe.get())) output.append(buf, n);
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(CliTest, HelpListsDefaults) {
  const auto r = run("learn --help");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* flag : {"--game", "--agent", "--opponent", "--learning-matches", "--reps", "--seed",
                           "--out", "--alpha", "--gamma", "--epsilon", "--window", "--jobs"}) {
    EXPECT_TRUE(contains(r.output, flag)) << flag;
  }
  for (const char* value : {"[0.1]", "[0.9]", "[cosine:0.5:0]", "[50000]", "[playouts:200]"}) {
    EXPECT_TRUE(contains(r.output, value)) << value;
  }
}

TEST(CliTest, UsageErrors) {
  EXPECT_NE(run("").exit_code, 0);
  EXPECT_NE(run("learn --out /tmp/x").exit_code, 0);
  EXPECT_NE(run("learn --game chess:8x8 --out /tmp/qmgg_cli_bad").exit_code, 0);
  EXPECT_NE(run("tournament --game tictactoe:3x3:3 --agents random").exit_code, 0);
  EXPECT_NE(run("tournament --game tictactoe:3x3:3 --agents random,qplayer").exit_code, 0);
  EXPECT_NE(run("oracle --game tictactoe:3x3:3 --mode guess").exit_code, 0);
  EXPECT_NE(run("oracle --game tictactoe:5x5 --mode enumerate").exit_code, 0);
  EXPECT_NE(run("bogus").exit_code, 0);
}

TEST(CliTest, OracleFacts) {
  auto r = run("oracle --game tictactoe:3x3:3 --mode minimax");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(contains(r.output, "first=50 second=50 (draw)")) << r.output;
  r = run("oracle --game hex:3x3 --mode minimax");
  EXPECT_TRUE(contains(r.output, "first=100 second=0")) << r.output;
  r = run("oracle --game tictactoe:3x3:3 --mode enumerate");
  EXPECT_TRUE(contains(r.output, "reachable states: 5478")) << r.output;
  r = run("oracle --game tictactoe:3x3:3 --moves 0");
  EXPECT_TRUE(contains(r.output, "optimal moves: 4")) << r.output;
}

TEST(CliTest, LearnWritesOutputsAndIsReproducible) {
  const auto a = fresh_dir("qmgg_cli_a");
  const auto b = fresh_dir("qmgg_cli_b");
  const std::string common = "learn --game tictactoe:3x3:3 --learning-matches 2000 --reps 2 --seed 3 --window 100 ";
  auto r = run(common + "--out " + a.string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "convergence win rate:"));
  r = run(common + "--jobs 2 --out " + b.string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* file : {"series_rep0.csv", "series_rep1.csv", "aggregate.csv",
                           "qtable_rep0.role0.qtable", "qtable_rep1.role1.qtable"}) {
    std::ifstream fa(a / file, std::ios::binary), fb(b / file, std::ios::binary);
    ASSERT_TRUE(fa && fb) << file;
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb) << file;
  }
  std::ifstream meta(a / "metadata.json");
  const auto j = nlohmann::json::parse(meta);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["config"]["window"], 100);

  // The learned snapshot plays in a tournament.
  const auto t = fresh_dir("qmgg_cli_t");
  r = run("tournament --game tictactoe:3x3:3 --matches 50 --out " + t.string() +
          " --agents random,qplayer@" + (a / "qtable_rep0").string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(t / "matrix.csv"));
  EXPECT_TRUE(fs::exists(t / "matrix.json"));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(t);
}

TEST(CliTest, UntrainedLearnWarns) {
  const auto d = fresh_dir("qmgg_cli_0");
  const auto r = run("learn --game tictactoe:3x3:3 --learning-matches 0 --reps 1 --baseline-matches 500 --out " +
                     d.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "warning")) << r.output;
  fs::remove_all(d);
}

TEST(CliTest, ConfigFileAndEpsilonComparison) {
  const auto d = fresh_dir("qmgg_cli_cfg");
  fs::create_directories(d);
  std::ofstream(d / "exp.ini") << "game = tictactoe:3x3:3\nlearning_matches = 1000\nrepetitions = 1\n"
                                  "window = 100\n[learner]\nkind = qplayer\n";
  auto r = run("learn --config " + (d / "exp.ini").string() + " --out " + (d / "run").string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(d / "run" / "series_rep0.csv"));
  r = run("learn --game tictactoe:3x3:3 --learning-matches 1000 --reps 1 --window 100 "
          "--compare-epsilon cosine:0.5:0,fixed:0.1 --out " + (d / "cmp").string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "fixed:0.1"));
  EXPECT_TRUE(fs::exists(d / "cmp" / "epsilon_1" / "aggregate.csv"));
  fs::remove_all(d);
}

TEST(CliTest, PlayAndCompete) {
  auto r = run("play --game connectfour:4x4 --agent mcs:playouts:200 --seed 2");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "goals:"));
  r = run("compete --game hex:3x3 --agent mcs:playouts:100 --opponent random --matches 20");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "W/D/L"));
}
