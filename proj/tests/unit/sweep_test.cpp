#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "dtqw/error.hpp"
#include "dtqw/observables.hpp"
#include "dtqw/sweep.hpp"

namespace dtqw {
namespace {

SweepGrid phi_row(double phi) {
  SweepGrid g;
  g.theta_axis = default_theta_axis();
  g.second_axis_kind = SecondAxis::phi;
  g.second_axis = {phi};
  return g;
}

void expect_interval(const Interval& got, double lo, double hi, double tol = 0.5) {
  EXPECT_NEAR(got.lo, lo, tol);
  EXPECT_NEAR(got.hi, hi, tol);
}

TEST(Axes, Defaults) {
  const auto theta = default_theta_axis();
  ASSERT_EQ(theta.size(), 450u);
  EXPECT_NEAR(theta.front(), 0.1, 1e-12);
  EXPECT_NEAR(theta.back(), 89.9, 1e-9);
  const auto phi = default_phi_axis();
  ASSERT_EQ(phi.size(), 401u);
  EXPECT_DOUBLE_EQ(phi.back(), std::numbers::pi);
  EXPECT_EQ(pitched_axis(0.0, 0.2, 0.1).size(), 3u);
  EXPECT_THROW(pitched_axis(1.0, 0.0, 0.1), DomainError);
}

TEST(SweepGrid, Validation) {
  SweepGrid g;
  g.theta_axis = {10, 20};
  g.second_axis = {0.0};
  EXPECT_NO_THROW(g.validate());
  g.theta_axis = {};
  EXPECT_THROW(g.validate(), DomainError);
  g.theta_axis = {20, 10};
  EXPECT_THROW(g.validate(), DomainError);
  g.theta_axis = {10, 10};
  EXPECT_THROW(g.validate(), DomainError);
  g.theta_axis = {10, 200};
  EXPECT_THROW(g.validate(), DomainError);
  g.theta_axis = {10};
  g.second_axis_kind = SecondAxis::gamma;
  g.second_axis = {-0.1, 0.0};
  EXPECT_THROW(g.validate(), DomainError);
}

TEST(RunSweep, SingleCellBallistic) {
  SweepGrid g;
  g.theta_axis = {0.0};
  g.second_axis = {0.0};
  auto r = run_sweep(g, 1);
  EXPECT_NEAR(r.s_e.at(0, 0), 0.0, 1e-10);
  EXPECT_NEAR(r.ipr.at(0, 0), 1.0, 1e-10);

  g.second_axis = {std::numbers::pi / 4};
  r = run_sweep(g, 1);
  EXPECT_NEAR(r.s_e.at(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(r.ipr.at(0, 0), 0.5, 1e-9);
  EXPECT_NEAR(r.survival.at(0, 0), 1.0, 1e-12);
}

TEST(RunSweep, ThreadCountDoesNotChangeResults) {
  SweepGrid g;
  g.theta_axis = pitched_axis(1.0, 89.0, 4.0);
  g.second_axis_kind = SecondAxis::gamma;
  g.second_axis = {0.0, 0.05, 0.1, 0.2, 0.4};
  g.fixed.phi = 0.3;
  const auto one = run_sweep(g, 1);
  const auto many = run_sweep(g, 7);
  EXPECT_EQ(one.s_e, many.s_e);
  EXPECT_EQ(one.ipr, many.ipr);
  EXPECT_EQ(one.survival, many.survival);

  // Any cell recomputed standalone is bit-identical.
  const auto obs = measure(evolve(g.params_at(3, 11)));
  EXPECT_EQ(one.s_e.at(3, 11), obs.entropy.s_e);
  EXPECT_EQ(one.ipr.at(3, 11), obs.ipr);
  EXPECT_EQ(one.survival.at(3, 11), obs.survival);
}

TEST(RunSweep, LossSuppressesEntanglementAtIdentityCoin) {
  SweepGrid g;
  g.theta_axis = {0.0};
  g.second_axis_kind = SecondAxis::gamma;
  g.second_axis = {0.0, 0.1, 0.2};
  g.fixed.phi = std::numbers::pi / 4;
  const auto r = run_sweep(g);
  EXPECT_GT(r.s_e.at(0, 0), r.s_e.at(1, 0));
  EXPECT_GT(r.s_e.at(1, 0), r.s_e.at(2, 0));
  EXPECT_LT(r.ipr.at(0, 0), r.ipr.at(1, 0));
  EXPECT_LT(r.ipr.at(1, 0), r.ipr.at(2, 0));
  // Frozen from an independent numpy evaluation.
  EXPECT_NEAR(r.s_e.at(1, 0), 0.2384538965859383, 1e-12);
  EXPECT_NEAR(r.ipr.at(2, 0), 0.9966879010816982, 1e-12);
}

TEST(RunSweep, DegenerateCellNamesCoordinates) {
  SweepGrid g;
  g.theta_axis = {90.0};
  g.second_axis_kind = SecondAxis::gamma;
  g.second_axis = {800.0};
  // cos(90 deg) is ~6e-17 in floating point; H decays by that factor per step.
  g.steps = 16;
  try {
    run_sweep(g);
    FAIL() << "expected DegenerateStateError";
  } catch (const DegenerateStateError& e) {
    EXPECT_NE(std::string(e.what()).find("theta = 90"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("gamma = 800"), std::string::npos) << e.what();
  }
}

TEST(ThresholdIntervals, MidpointEndpoints) {
  const std::vector<double> axis{0, 1, 2, 3, 4, 5};
  const std::vector<double> vals{0.1, 0.9, 0.9, 0.1, 0.1, 0.9};
  const auto above = threshold_intervals(axis, vals, 0.5, Direction::above);
  ASSERT_EQ(above.size(), 2u);
  EXPECT_EQ(above[0], (Interval{0.5, 2.5}));
  EXPECT_EQ(above[1], (Interval{4.5, 5.0}));
  const auto below = threshold_intervals(axis, vals, 0.5, Direction::below);
  ASSERT_EQ(below.size(), 2u);
  EXPECT_EQ(below[0], (Interval{0.0, 0.5}));
  EXPECT_EQ(below[1], (Interval{2.5, 4.5}));
  EXPECT_TRUE(threshold_intervals(axis, vals, 0.0, Direction::below).empty());
  EXPECT_EQ(threshold_intervals(axis, vals, 0.0, Direction::above).size(), 1u);
}

TEST(ThresholdRegions, AsymmetricInitialStateEntropyWindows) {
  const auto r = run_sweep(phi_row(0.0));
  const auto rows = threshold_regions(r, Quantity::s_e, 0.95, Direction::above);
  ASSERT_EQ(rows.size(), 1u);
  const auto& iv = rows[0].intervals;
  // The three windows below 72 deg, plus a fourth near 79-80.6 deg whose peak
  // is only 0.959.
  ASSERT_EQ(iv.size(), 4u);
  expect_interval(iv[0], 47.3, 48.7);
  expect_interval(iv[1], 56.9, 60.8);
  expect_interval(iv[2], 67.3, 72.0);
  expect_interval(iv[3], 78.8, 80.6, 0.11);

  const auto ipr_rows = threshold_regions(r, Quantity::ipr, 0.18, Direction::below);
  ASSERT_EQ(ipr_rows[0].intervals.size(), 1u);
  expect_interval(ipr_rows[0].intervals[0], 36.9, 68.2);
}

TEST(ThresholdRegions, SymmetricInitialState) {
  const auto r = run_sweep(phi_row(std::numbers::pi / 4));
  const auto s = threshold_regions(r, Quantity::s_e, 0.95, Direction::above)[0].intervals;
  ASSERT_EQ(s.size(), 1u);
  expect_interval(s[0], 0.0, 20.4);

  const auto i = threshold_regions(r, Quantity::ipr, 0.18, Direction::below)[0].intervals;
  ASSERT_EQ(i.size(), 2u);
  expect_interval(i[0], 11.6, 19.4, 0.11);
  expect_interval(i[1], 21.9, 70.7);
}

TEST(ExportCsv, LayoutAndDeterminism) {
  SweepGrid g;
  g.theta_axis = {10.0, 20.0, 30.0};
  g.second_axis_kind = SecondAxis::gamma;
  g.second_axis = {0.0, 0.1};
  const auto r = run_sweep(g);
  std::ostringstream a, b;
  write_csv(r, a);
  write_csv(r, b);
  EXPECT_EQ(a.str(), b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kSweepCsvHeader);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].rfind("10,gamma,0,16,", 0), 0u) << rows[0];
  EXPECT_EQ(rows[2].rfind("30,gamma,0,16,", 0), 0u) << rows[2];
  EXPECT_EQ(rows[3].rfind("10,gamma,0.1,16,", 0), 0u) << rows[3];

  SweepGrid one;
  one.theta_axis = {45.0};
  one.second_axis = {0.0};
  std::ostringstream single;
  write_csv(run_sweep(one), single);
  const std::string text = single.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(ExportCsv, UnwritablePathNamesPath) {
  SweepGrid g;
  g.theta_axis = {45.0};
  g.second_axis = {0.0};
  try {
    export_csv(run_sweep(g), "/nonexistent-dir/sweep.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/sweep.csv"), std::string::npos);
  }
}

TEST(ReadSweepCsv, RoundTripsThresholds) {
  SweepGrid g;
  g.theta_axis = pitched_axis(0.1, 89.9, 0.2);
  g.second_axis = {0.0, std::numbers::pi / 4};
  const auto r = run_sweep(g);
  std::stringstream csv;
  write_csv(r, csv);
  const auto table = read_sweep_csv(csv, "ipr");
  ASSERT_EQ(table.row_values.size(), 2u);
  EXPECT_EQ(table.second_axis_name, "phi");
  for (std::size_t row = 0; row < 2; ++row) {
    const auto direct = threshold_intervals(g.theta_axis, r.ipr.row(row), 0.18, Direction::below);
    const auto parsed =
        threshold_intervals(table.theta[row], table.values[row], 0.18, Direction::below);
    ASSERT_EQ(direct.size(), parsed.size());
    for (std::size_t k = 0; k < direct.size(); ++k) {
      EXPECT_NEAR(direct[k].lo, parsed[k].lo, 1e-9);
      EXPECT_NEAR(direct[k].hi, parsed[k].hi, 1e-9);
    }
  }
}

TEST(ReadSweepCsv, MissingColumn) {
  std::istringstream csv("theta_deg,second_axis_name,second_axis_value,steps,ipr\n1,phi,0,16,0.5\n");
  EXPECT_THROW(read_sweep_csv(csv, "s_e"), ConfigError);
  std::istringstream bad("theta_deg,second_axis_name,second_axis_value,s_e\n1,phi,zero,0.5\n");
  EXPECT_THROW(read_sweep_csv(bad, "s_e"), ConfigError);
}

TEST(GridFromJson, ParsesArraysAndRanges) {
  const auto doc = nlohmann::json::parse(R"({
    "theta_axis": {"start": 0.1, "stop": 89.9, "pitch": 0.2},
    "second_axis_kind": "phi",
    "second_axis": {"start": 0, "stop": 1, "pitch": 0.0025, "times_pi": true},
    "steps": 12,
    "fixed": {"gamma": 0.1}
  })");
  const auto g = grid_from_json(doc);
  EXPECT_EQ(g.theta_axis.size(), 450u);
  EXPECT_EQ(g.second_axis.size(), 401u);
  EXPECT_NEAR(g.second_axis.back(), std::numbers::pi, 1e-12);
  EXPECT_EQ(g.steps, 12);
  EXPECT_DOUBLE_EQ(g.fixed.gamma, 0.1);

  const auto round = grid_from_json(grid_to_json(g));
  EXPECT_EQ(round.theta_axis, g.theta_axis);
  EXPECT_EQ(round.second_axis, g.second_axis);
}

TEST(GridFromJson, ErrorsNameTheKey) {
  auto expect_key = [](const char* text, const char* key) {
    try {
      grid_from_json(nlohmann::json::parse(text));
      FAIL() << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
  };
  expect_key(R"({"second_axis_kind": "phi", "second_axis": [0]})", "theta_axis");
  expect_key(R"({"theta_axis": [], "second_axis_kind": "phi", "second_axis": [0]})", "theta_axis");
  expect_key(R"({"theta_axis": [1], "second_axis_kind": "psi", "second_axis": [0]})",
             "second_axis_kind");
  expect_key(R"({"theta_axis": [1], "second_axis_kind": "phi", "second_axis": "x"})",
             "second_axis");
  expect_key(R"({"theta_axis": [1], "second_axis_kind": "phi", "second_axis": [0],
                 "fixed": {"omega": 1}})",
             "fixed.omega");
}

}  // namespace
}  // namespace dtqw
