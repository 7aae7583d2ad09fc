#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "helpers.hpp"

using namespace coflow;
using namespace testing_support;

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("forge_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string at(const std::string& name) const { return (dir / name).string(); }

  int forge(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " + FORGE_PATH + " " + args + " >" + at("stdout") + " 2>" + at("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string err() const { return slurp(at("stderr")); }
  std::string out() const { return slurp(at("stdout")); }
};

}  // namespace

TEST_F(Cli, GenerateWritesValidInstance) {
  ASSERT_EQ(forge("generate --n 25 --cores 5 --ports 10 --deg 3 --p 1 --seed 7 -o " + at("inst.doc")), 0) << err();
  const auto inst = read_instance(slurp(at("inst.doc")));
  EXPECT_TRUE(validate_instance(inst).ok());
  EXPECT_EQ(inst.coflows.size(), 25u);
  ASSERT_EQ(forge("generate --n 25 --cores 5 --ports 10 --deg 3 --p 1 --seed 7 -o " + at("again.doc")), 0);
  EXPECT_EQ(slurp(at("inst.doc")), slurp(at("again.doc")));
}

TEST_F(Cli, SeedIsMandatory) {
  EXPECT_EQ(forge("generate --n 5"), 2);
  EXPECT_EQ(forge("bench --sweep n --values 5"), 2);
}

TEST_F(Cli, BadFlagsAreUsageErrors) {
  EXPECT_EQ(forge(""), 2);
  EXPECT_EQ(forge("frobnicate"), 2);
  EXPECT_EQ(forge("order x.doc --min-flows 3"), 2);
  EXPECT_EQ(forge("generate --seed 1 --density thick"), 2);
  ASSERT_EQ(forge("generate --seed 1 --n 4 --ports 4 -o " + at("i.doc")), 0);
  EXPECT_EQ(forge("order " + at("i.doc") + " --alg weaver"), 2);
  EXPECT_EQ(forge("order " + at("i.doc") + " --kappa 0"), 2);
  EXPECT_EQ(forge("ingest t.txt --weights uniform"), 2);
}

TEST_F(Cli, EvalReportsRatioAtLeastOne) {
  ASSERT_EQ(forge("generate --n 12 --cores 2 --ports 6 --seed 3 -o " + at("inst.doc")), 0);
  ASSERT_EQ(forge("eval " + at("inst.doc") + " --alg fdls --kappa 0.5 -o " + at("out.csv")), 0) << err();
  const auto report = parse_report_csv(slurp(at("out.csv")));
  ASSERT_EQ(report.records.size(), 1u);
  EXPECT_EQ(report.records[0].instance, "inst");
  EXPECT_GE(report.records[0].ratio, 1 - 1e-9);
  EXPECT_GT(report.records[0].bound, 1.0);
}

TEST_F(Cli, EvalJobsAndSummary) {
  ASSERT_EQ(forge("generate --n 4 --ports 5 --cores 2 --jobs 3 --seed 3 -o " + at("jobs.doc")), 0);
  ASSERT_EQ(forge("eval " + at("jobs.doc") + " --alg jobs --alg fdls --format summary"), 0) << err();
  EXPECT_NE(out().find("jobs: runs=1"), std::string::npos);
  EXPECT_NE(out().find("fdls: runs=1"), std::string::npos);
}

TEST_F(Cli, OrderAndSchedule) {
  ASSERT_EQ(forge("generate --n 8 --cores 2 --ports 5 --seed 1 -o " + at("inst.doc")), 0);
  ASSERT_EQ(forge("order " + at("inst.doc") + " --alg cdls --emit-dual -o " + at("order.json")), 0) << err();
  const Json doc = Json::parse(slurp(at("order.json")));
  EXPECT_EQ(doc.at("order").size(), 8u);
  EXPECT_EQ(dual_from_json(doc.at("dual")).kind, DualKind::coflow_level);

  ASSERT_EQ(forge("schedule " + at("inst.doc") + " --alg fdls -o " + at("s.json")), 0) << err();
  const Json s = Json::parse(slurp(at("s.json")));
  const auto inst = read_instance(slurp(at("inst.doc")));
  const auto schedule = schedule_from_json(s.at("schedule"));
  const auto assignment = assignment_from_json(s.at("assignment"));
  EXPECT_TRUE(verify_schedule(schedule, inst, assignment).ok());
}

TEST_F(Cli, IngestMalformedTraceNamesLine) {
  std::ofstream(at("bad.txt")) << "9 1\n1 100 2 1 2 9:100\n";
  EXPECT_EQ(forge("ingest " + at("bad.txt") + " --min-flows 10 --seed 1 -o " + at("real.doc")), 1);
  EXPECT_NE(err().find("trace line 2"), std::string::npos) << err();
}

TEST_F(Cli, IngestSample) {
  const std::string trace = std::string(GOLDEN_DIR) + "/../../data/sample_trace.txt";
  ASSERT_EQ(forge("ingest " + trace + " --min-flows 10 --seed 1 --releases arrival -o " + at("real.doc")), 0)
      << err();
  const auto inst = read_instance(slurp(at("real.doc")));
  EXPECT_FALSE(inst.coflows.empty());
  for (const auto& c : inst.coflows) EXPECT_GE(c.flows.size(), 10u);
}

TEST_F(Cli, MissingFileIsDataError) { EXPECT_EQ(forge("order " + at("nope.doc")), 1); }

TEST_F(Cli, BenchIsThreadCountInvariant) {
  const std::string args = "bench --sweep p --values 0.5 2 --seeds 0..5 --n 10 --ports 6 --cores 2";
  ASSERT_EQ(forge(args + " -o " + at("one.csv"), "COFLOW_FORGE_THREADS=1"), 0) << err();
  ASSERT_EQ(forge(args + " --threads 4 -o " + at("four.csv")), 0) << err();
  EXPECT_EQ(slurp(at("one.csv")), slurp(at("four.csv")));
  EXPECT_EQ(parse_report_csv(slurp(at("one.csv"))).records.size(), 24u);
}

TEST_F(Cli, BenchThresholdNeedsTrace) {
  EXPECT_EQ(forge("bench --sweep threshold --values 1 --seeds 0"), 2);
  const std::string trace = std::string(GOLDEN_DIR) + "/../../data/sample_trace.txt";
  ASSERT_EQ(forge("bench --sweep threshold --values 1 20 --seeds 0..1 --cores 3 --trace " + trace), 0) << err();
  EXPECT_GE(parse_report_csv(out()).records.size(), 4u);
}
