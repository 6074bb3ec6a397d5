#if AMATCH_HAVE_CLI

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amatch/feature_io.hpp"
#include "amatch/io.hpp"
#include "cli.hpp"
#include "helpers.hpp"

namespace amatch {
namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, FlopsCsvAndTable) {
  const auto csv = run({"flops", "1", "1", "1"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out, "model,n,k,c,flops\namatformer,1,1,1,8\nsgmnet,1,1,1,20\nsuperglue,1,1,1,7\n");

  const auto table = run({"flops", "1000", "128", "128", "--format", "table"});
  ASSERT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("73,924,608"), std::string::npos) << table.out;
  EXPECT_NE(table.out.find("449,536,000"), std::string::npos) << table.out;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"flops", "0", "1", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  test::TempDir dir("usage");
  const auto r = run({"train", "--out", (dir / "m.ckpt").string(), "--anchors", "0"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"flops", "--help"}).code, 0);
}

TEST(Cli, CorruptFilesGiveFormatExit) {
  test::TempDir dir("corrupt");
  atomic_write(dir / "bad.ckpt", "NOPE0000");
  atomic_write(dir / "bad.amft", "AMFX");
  const auto s = generate_problem(SynthConfig{}, 1);
  write_features(dir / "good.amft", s.problem.source);
  const auto r = run({"match", (dir / "good.amft").string(), (dir / "good.amft").string(), "--checkpoint",
                      (dir / "bad.ckpt").string()});
  EXPECT_EQ(r.code, cli::kFormat);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(run({"eval", (dir / "missing").string(), "--baseline"}).code, cli::kFormat);
}

TEST(Cli, EvalOfEmptyDirectory) {
  test::TempDir dir("empty");
  const auto r = run({"eval", dir.path().string(), "--baseline"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("no problems"), std::string::npos) << r.err;
}

TEST(Cli, GenTrainMatchEval) {
  test::TempDir dir("flow");
  const auto gen = run({"gen", "--out", (dir / "data").string(), "--count", "3", "--seed", "500", "--json"});
  ASSERT_EQ(gen.code, 0) << gen.err;
  ASSERT_TRUE(std::filesystem::exists(dir / "data" / "problem_0002" / "gt.json"));
  ASSERT_TRUE(std::filesystem::exists(dir / "data" / "problem_0000" / "source.json"));

  const std::string ckpt = (dir / "m.ckpt").string();
  const auto tr = run({"train", "--out", ckpt, "--steps", "400", "--seed", "3"});
  ASSERT_EQ(tr.code, 0) << tr.err;
  const auto summary = nlohmann::json::parse(tr.out);
  EXPECT_EQ(summary.at("steps"), 400);
  const std::string metrics = read_file(ckpt + ".metrics.csv");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "step,loss,l_m,l_anchor,precision");
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 401);

  // Matching an image against itself recovers the identity.
  const std::string src = (dir / "data" / "problem_0000" / "source.amft").string();
  const auto self = run({"match", src, src, "--checkpoint", ckpt});
  ASSERT_EQ(self.code, 0) << self.err;
  std::istringstream lines(self.out);
  std::string line;
  std::getline(lines, line);
  int diagonal = 0;
  while (std::getline(lines, line)) {
    const auto a = line.find(','), b = line.find(',', a + 1);
    if (line.substr(0, a) == line.substr(a + 1, b - a - 1)) ++diagonal;
  }
  EXPECT_GE(diagonal, 58) << self.out;

  const auto model = run({"eval", (dir / "data").string(), "--checkpoint", ckpt, "--jobs", "2"});
  ASSERT_EQ(model.code, 0) << model.err;
  const auto report = nlohmann::json::parse(model.out);
  EXPECT_EQ(report.at("problems"), 3);
  EXPECT_GE(report.at("precision").get<double>(), 0.5);
  EXPECT_LE(report.at("precision").get<double>(), 1.0);

  const auto base = run({"eval", (dir / "data").string(), "--baseline"});
  ASSERT_EQ(base.code, 0) << base.err;
  EXPECT_EQ(nlohmann::json::parse(base.out).at("problems"), 3);

  // Same seed, same bytes.
  const std::string again = (dir / "again.ckpt").string();
  ASSERT_EQ(run({"train", "--out", again, "--steps", "400", "--seed", "3"}).code, 0);
  EXPECT_EQ(read_file(ckpt), read_file(again));

  // Resume continues from the stored step.
  const std::string resumed = (dir / "resumed.ckpt").string();
  const auto rs = run({"train", "--out", resumed, "--resume", ckpt, "--steps", "402"});
  ASSERT_EQ(rs.code, 0) << rs.err;
  EXPECT_EQ(nlohmann::json::parse(rs.out).at("steps"), 402);
}

}  // namespace
}  // namespace amatch

#endif
