#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dqt/experiment.hpp"

using namespace dqt::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dqt_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Params, TypedAccessAndStrings) {
  Params p(json{{"N", "12"}, {"gamma", 0.5}, {"xs", "0:1:0.25"}, {"Ns", "4,8"}, {"input", "1.5,0.25"}});
  EXPECT_EQ(p.count("N", 1, 2), 12U);
  EXPECT_DOUBLE_EQ(p.positive("gamma", 1.0), 0.5);
  EXPECT_EQ(p.grid("xs", "0:0:1").size(), 5U);
  EXPECT_EQ(p.counts("Ns", {}), (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(p.reals("input", {}), (std::vector<double>{1.5, 0.25}));
  EXPECT_DOUBLE_EQ(p.real("absent", 7.0), 7.0);
  EXPECT_NO_THROW(p.finish());
}

TEST(Params, Validation) {
  EXPECT_THROW(Params(json::array()), config_error);
  Params unknown(json{{"typo", 1}});
  EXPECT_THROW(unknown.finish(), config_error);
  Params small(json{{"N", 1}});
  EXPECT_THROW(small.count("N", 4, 2), config_error);
  Params neg(json{{"gamma", -1}});
  EXPECT_THROW(neg.positive("gamma", 1), config_error);
  Params bad(json{{"x", "abc"}});
  EXPECT_THROW(bad.real("x", 0), config_error);
  Params grid(json{{"g", "0:1"}});
  EXPECT_THROW(grid.grid("g", ""), config_error);
  Params frac(json{{"Ns", {1.5}}});
  EXPECT_THROW(frac.counts("Ns", {}), config_error);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(fmt(0.1), "0.1");
  EXPECT_EQ(fmt(1e-300), "1e-300");
  Table t{{"a", "b"}, {}};
  t.add(std::vector<double>{1, 2.5});
  EXPECT_EQ(t.csv(), "a,b\n1,2.5\n");
  EXPECT_THROW(t.add(std::vector<double>{1}), std::logic_error);
}

TEST(Experiments, TimerWritesExpectedColumns) {
  const auto dir = scratch("timer");
  const auto out = run_experiment("timer", {{"N", 64}, {"x-grid", "-1:1:0.5"}}, {dir, 1, 0});
  ASSERT_EQ(out.files.size(), 1U);
  const auto csv = slurp(dir / "timer.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,deviation,one_minus_Phi,remainder");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  fs::remove_all(dir);
}

TEST(Experiments, OutputIndependentOfThreadCount) {
  const json params{{"N-list", "16,64,256"}, {"x-grid", "-3:3:0.1"}};
  const auto a = scratch("one"), b = scratch("four");
  run_experiment("cutoff-profile", params, {a, 1, 0});
  run_experiment("cutoff-profile", params, {b, 4, 0});
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiments, UnknownNamesAndParameters) {
  EXPECT_THROW(run_experiment("nope", json::object(), {}), config_error);
  EXPECT_THROW(run_experiment("timer", {{"bogus", 1}}, {scratch("x"), 1, 0}), config_error);
  EXPECT_THROW(run_experiment("transfer", {{"n", 4}}, {scratch("x"), 1, 0}), config_error);
}

TEST(Experiments, OracleSuiteSmall) {
  const auto dir = scratch("oracle");
  const auto out = run_experiment("oracle-suite", {{"max-qubits", 3}}, {dir, 1, 0});
  EXPECT_TRUE(out.ok);
  EXPECT_TRUE(out.summary["all_passed"].get<bool>());
  EXPECT_GE(out.summary["checks"].get<std::size_t>(), 5U);
  fs::remove_all(dir);
}

TEST(Config, ParseAndReject) {
  const auto c = parse_config({{"experiment", "timer"}, {"params", {{"N", 8}}}, {"seed", 3}, {"out_dir", "x"}});
  EXPECT_EQ(c.experiment, "timer");
  EXPECT_EQ(c.seed, 3U);
  EXPECT_EQ(c.out_dir, "x");
  EXPECT_THROW(parse_config({{"experiment", "timer"}, {"extra", 1}}), config_error);
  EXPECT_THROW(parse_config({{"experiment", "missing"}}), config_error);
  EXPECT_THROW(parse_config({{"params", json::object()}}), config_error);
  EXPECT_THROW(load_config("/nonexistent/config.json"), config_error);
}

TEST(Build, NamedGeneratorsRoundTrip) {
  const auto j = build_named("timer", Params(json{{"N", 4}}));
  const auto L = dqt::liouvillian_from_json(j);
  EXPECT_EQ(L.size(), 3U);
  const auto t = build_named("transfer-compressed", Params(json{{"n", 5}}));
  EXPECT_EQ(t["stages"].size(), 9U);
  EXPECT_THROW(build_named("unknown", Params(json::object())), config_error);
}
