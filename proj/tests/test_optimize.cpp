#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ambspindle/amb_optimize.hpp"
#include "ambspindle/config.hpp"
#include "ambspindle/moga.hpp"
#include "oracles.hpp"

using namespace ambspindle;

namespace {

MogaProblem schaffer() {
  MogaProblem p;
  p.lower = {-4.0};
  p.upper = {4.0};
  p.evaluate = [](const std::vector<double>& x) {
    return Evaluation{{x[0] * x[0], (x[0] - 2) * (x[0] - 2)}, 0.0, {}};
  };
  return p;
}

GASettings small(std::uint64_t seed, int workers = 0) {
  GASettings s;
  s.population = 60;
  s.max_generations = 100;
  s.max_stall_generations = 100;
  s.rng_seed = seed;
  s.workers = workers;
  return s;
}

DesignVariables case_point() { return {27.1e-3, 9.1e-3, 8.4e-3, 4.7e-3, 8.6e-3, 1.5e-3, 8e-3, 7e-3, 2.98}; }

OptimizerConfig fixture_optimizer() {
  return *load_config(std::string(AMBSPINDLE_FIXTURES) + "/case_study.yaml").optimizer;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

}  // namespace

TEST(Moga, AnalyticFrontMatchesBruteForce) {
  const auto res = run_moga(small(3), schaffer());
  const auto front = oracle::schaffer_front();
  ASSERT_GT(front.size(), 1000u);
  ASSERT_FALSE(res.front.empty());
  for (const auto& ind : res.front)
    EXPECT_LT(oracle::distance_to(front, ind.eval.objectives[0], ind.eval.objectives[1]), 1e-2);
  double lo = 1e9, hi = -1e9;
  for (const auto& ind : res.front) {
    lo = std::min(lo, ind.x[0]);
    hi = std::max(hi, ind.x[0]);
  }
  EXPECT_LT(lo, 0.2);
  EXPECT_GT(hi, 1.8);
}

TEST(Moga, SameSeedIsBitIdentical) {
  const auto a = run_moga(small(9), schaffer());
  const auto b = run_moga(small(9), schaffer());
  EXPECT_EQ(a.front, b.front);
  EXPECT_EQ(a.spread_history, b.spread_history);
  EXPECT_EQ(a.hypervolume_history, b.hypervolume_history);
  const auto c = run_moga(small(10), schaffer());
  EXPECT_NE(a.front, c.front);
}

TEST(Moga, WorkerCountDoesNotChangeResult) {
  const auto cfg = fixture_optimizer();
  auto s1 = cfg.settings;
  s1.max_generations = 30;
  s1.workers = 1;
  auto s4 = s1;
  s4.workers = 4;
  const auto problem = make_amb_problem(cfg.bounds, cfg.fixed);
  const auto a = run_moga(s1, problem);
  const auto b = run_moga(s4, problem);
  EXPECT_EQ(a.front, b.front);
  EXPECT_EQ(a.hypervolume_history, b.hypervolume_history);
}

TEST(Moga, ArchiveHypervolumeNeverDecreases) {
  const auto cfg = fixture_optimizer();
  const auto res = run_moga(cfg.settings, make_amb_problem(cfg.bounds, cfg.fixed));
  ASSERT_GE(res.hypervolume_history.size(), 2u);
  for (std::size_t g = 1; g < res.hypervolume_history.size(); ++g)
    EXPECT_GE(res.hypervolume_history[g], res.hypervolume_history[g - 1]) << g;
}

TEST(Moga, AmbFrontFeasibleAndNonDominated) {
  const auto cfg = fixture_optimizer();
  const auto res = run_moga(cfg.settings, make_amb_problem(cfg.bounds, cfg.fixed));
  ASSERT_FALSE(res.front.empty());
  for (const auto& a : res.front) {
    EXPECT_TRUE(a.eval.feasible());
    for (const auto& b : res.front) EXPECT_FALSE(dominates(b.eval.objectives, a.eval.objectives));
    // Re-check each design through the magnetics checklist directly.
    const auto v = DesignVariables::from_vector(a.x);
    EXPECT_TRUE(geometry_violations(v).empty());
    const auto d = design_from_variables(v, cfg.fixed);
    EXPECT_TRUE(radial_constraint_checks(d, v.i_c, cfg.fixed.limits).pass());
    EXPECT_NEAR(-a.eval.objectives[0], radial_static_capacity(d, v.i_c, cfg.fixed.limits.flux_limit).force, 1e-12);
  }
  for (std::size_t i = 1; i < res.front.size(); ++i)
    EXPECT_LE(res.front[i - 1].eval.objectives[0], res.front[i].eval.objectives[0]);
}

TEST(Moga, NoFeasibleStartReportsConstraints) {
  MogaProblem p = schaffer();
  p.constraint_names = {"always"};
  p.evaluate = [](const std::vector<double>& x) { return Evaluation{{x[0], -x[0]}, 1.0, {1.0}}; };
  try {
    run_moga(small(1), p);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("always"), std::string::npos);
  }
}

TEST(Moga, InvalidSettingsRejected) {
  auto s = small(1);
  s.population = 7;
  EXPECT_THROW(run_moga(s, schaffer()), ValidationError);
}

TEST(Candidate, CaseStudyPointFeasibleNearTargetCapacity) {
  const auto cfg = fixture_optimizer();
  const auto o = evaluate_candidate(case_point(), cfg.fixed);
  EXPECT_TRUE(o.feasible);
  EXPECT_NEAR(o.static_capacity, 13.88, 0.15 * 13.88);
  EXPECT_GT(o.volume, 3.06e-6);
  EXPECT_LT(o.volume, 3.06e-4);
}

TEST(Candidate, OverSaturatedIsInfeasible) {
  const auto cfg = fixture_optimizer();
  auto v = case_point();
  // Bias about 0.70 T plus 0.5 T of control density exceeds the 1 T limit.
  v.i_c = 0.5 / (4e-7 * kPi * 30 / (cfg.fixed.factors.k_c * cfg.fixed.airgap));
  const auto o = evaluate_candidate(v, cfg.fixed);
  EXPECT_FALSE(o.feasible);
  EXPECT_GT(o.violation, 0.0);
}

TEST(Candidate, ZeroControlCurrentHasNoCapacity) {
  auto v = case_point();
  v.i_c = 0;
  const auto o = evaluate_candidate(v, fixture_optimizer().fixed);
  EXPECT_TRUE(o.feasible);
  EXPECT_EQ(o.static_capacity, 0.0);
}

TEST(Candidate, ImpossibleGeometryIsInfeasibleNotThrown) {
  auto v = case_point();
  v.p_r = v.s_ir + 1e-3;
  const auto o = evaluate_candidate(v, fixture_optimizer().fixed);
  EXPECT_FALSE(o.feasible);
  EXPECT_EQ(o.violation, kGeometryViolation);
}

TEST(Volume, ScalesWithCube) {
  const auto v = case_point();
  auto w = v;
  const double s = 1.7;
  for (double* p : {&w.s_ir, &w.s_rt, &w.p_l, &w.p_w, &w.p_r, &w.pm_t, &w.pm_w, &w.pm_l}) *p *= s;
  EXPECT_NEAR(amb_volume(w), s * s * s * amb_volume(v), 1e-12 * amb_volume(w));
}

TEST(Volume, ZeroMagnetLeavesIronAndCopper) {
  auto v = case_point();
  const auto full = amb_volume_breakdown(v);
  v.pm_t = v.pm_w = v.pm_l = 0;
  const auto bare = amb_volume_breakdown(v);
  EXPECT_EQ(bare.magnets, 0.0);
  EXPECT_EQ(bare.connectors, 0.0);
  EXPECT_EQ(bare.rings, full.rings);
  EXPECT_NEAR(bare.total(), full.total() - full.magnets - full.connectors, 1e-18);
}

TEST(Volume, UpperBoundHolds) {
  const auto cfg = fixture_optimizer();
  const auto res = run_moga(cfg.settings, make_amb_problem(cfg.bounds, cfg.fixed));
  const double ub = volume_upper_bound(cfg.bounds);
  for (const auto& ind : res.front) EXPECT_LT(ind.eval.objectives[1], ub);
  EXPECT_LT(amb_volume(case_point()), ub);
}

TEST(Spread, DegenerateAndHandComputedValues) {
  const std::vector<double> ideal{0, 0}, nadir{1, 1};
  EXPECT_EQ(moga::spread_metric({{0.3, 0.3}}, ideal, nadir), 0.0);
  EXPECT_NEAR(moga::spread_metric({{0, 1}, {1, 0}}, ideal, nadir), std::sqrt(2.0), 1e-15);
  // Gaps 0.25 sqrt2 and 0.75 sqrt2: mean 0.5 sqrt2, deviation 0.25 sqrt2.
  EXPECT_NEAR(moga::spread_metric({{0, 1}, {0.25, 0.75}, {1, 0}}, ideal, nadir), std::sqrt(2.0) + 0.5, 1e-15);
  EXPECT_NEAR(moga::spread_metric({{0, 2}, {2, 0}}, ideal, {2, 2}), std::sqrt(2.0), 1e-15);
}

TEST(Spread, IdenticalFrontsDoNotChange) {
  EXPECT_EQ(moga::average_spread_change({0.7, 0.7, 0.7}, 2), 0.0);
  EXPECT_NEAR(moga::average_spread_change({1.0, 1.1}, 5), 0.1, 1e-12);
}

TEST(Output, FrontAndHistoryCsv) {
  const auto cfg = fixture_optimizer();
  auto s = cfg.settings;
  s.max_generations = 3;
  const auto res = run_moga(s, make_amb_problem(cfg.bounds, cfg.fixed));
  std::ostringstream f, h;
  write_front_csv(f, res.front);
  write_history_csv(h, res);
  EXPECT_EQ(f.str().substr(0, f.str().find('\n')),
            "capacity_N,volume_m3,s_ir_m,s_rt_m,p_l_m,p_w_m,p_r_m,pm_t_m,pm_w_m,pm_l_m,i_c_A");
  const std::string hist = h.str();
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 1 + 4);
  EXPECT_EQ(hist.substr(0, 30), "generation,spread,hypervolume\n");
}
