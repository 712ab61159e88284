#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
  json report() const {
    std::istringstream lines(out);
    std::string line, last;
    while (std::getline(lines, line)) {
      if (!line.empty()) last = line;
    }
    return json::parse(last);
  }
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(SPARSENLE_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(testing::TempDir()) /
           ("sparsenle_cli_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PlanStandard) {
  const auto r = cli("plan --k 80 --n 65536 --q 2");
  ASSERT_EQ(r.code, 0);
  const auto j = r.report();
  EXPECT_EQ(j["params"]["h"], 2);
  EXPECT_EQ(j["params"]["t"], 8);
  EXPECT_EQ(j["params"]["L"], 16);
  EXPECT_EQ(j["feasible"], true);
}

TEST_F(Cli, PlanInfeasibleIsDomainFailure) {
  const auto r = cli("plan --k 8 --n 1000000000");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report()["error"], "Infeasible");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("no-such-command").code, 1);
  EXPECT_EQ(cli("gen-dense --dim 4").code, 1);
  EXPECT_EQ(cli("gen-dense --dim 4 --m 3 --out " + path("x") + " --error nope").code, 1);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST_F(Cli, CountAndEnumerate) {
  auto r = cli("count-preimage --h 2 --q 2 --k 3 --weight 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.report()["count"], 12);
  r = cli("enum-preimage --h 1 --q 2 --k 2 --b 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.report()["tuples"], json::parse("[[0,0],[1,1]]"));
  r = cli("margin --h 2 --q 2 --k 80 --t 8");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.report()["within_bound"], true);
}

TEST_F(Cli, PipelineAndDeterminism) {
  ASSERT_EQ(cli("gen-dense --h 1 --t 3 --m 200 --seed 5 --out " + path("d.jsonl") + " --secret " +
                path("s.json"))
                .code,
            0);
  const std::string reduce = "reduce --in " + path("d.jsonl") + " --h 1 --t 3 --k 4 --relax-gates --seed 9";
  auto r1 = cli(reduce + " --out " + path("a.jsonl") + " --mask " + path("z.json"));
  auto r2 = cli(reduce + " --threads 3 --out " + path("b.jsonl"));
  ASSERT_EQ(r1.code, 0);
  ASSERT_EQ(r2.code, 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  auto j1 = r1.report(), j2 = r2.report();
  j1.erase("wall_time_s");
  j2.erase("wall_time_s");
  EXPECT_EQ(j1, j2);
  EXPECT_EQ(j1["kept"], j1["successes"]);  // m1 <= 0 keeps everything when relaxed

  ASSERT_EQ(cli("reduce --in " + path("d.jsonl") + " --h 1 --t 3 --k 4 --out " + path("c.jsonl")).code, 2);

  const auto bf = cli("bruteforce --in " + path("a.jsonl") + " --max-weight 0");
  ASSERT_EQ(bf.code, 0);
  EXPECT_GE(bf.report()["hits"].get<int>(), 1);

  const auto v = cli("verify --seed 3");
  ASSERT_EQ(v.code, 0);
  EXPECT_EQ(v.report()["pass"], true);
}

TEST_F(Cli, TensorizeAndFolklore) {
  ASSERT_EQ(cli("gen-sparse --n 8 --k 2 --m 400 --seed 2 --out " + path("s.jsonl") + " --secret " +
                path("sec.json"))
                .code,
            0);
  auto f = cli("folklore --in " + path("s.jsonl"));
  ASSERT_EQ(f.code, 0);
  EXPECT_EQ(f.report()["verdict"], "PLANTED");
  auto t = cli("tensorize --in " + path("s.jsonl") + " --out " + path("t.jsonl") + " --variant complex --secret " +
               path("sec.json"));
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(t.report()["diagnostics"]["bound_violations"], 0);

  ASSERT_EQ(cli("gen-sparse --n 1000 --k 5 --m 5 --out " + path("few.jsonl")).code, 0);
  EXPECT_EQ(cli("folklore --in " + path("few.jsonl")).code, 2);
}
