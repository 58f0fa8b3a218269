#pragma once

// Two-objective NSGA-II with feasibility-first constrained domination, SBX
// crossover, polynomial mutation, and an external non-dominated archive capped
// at pareto_fraction * population. All objectives are minimized.
//
// Determinism: every stochastic draw comes from a generator seeded by
// (rng_seed, generation, slot), so results do not depend on how evaluations
// are spread over worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ambspindle/error.hpp"
#include "ambspindle/parallel.hpp"

namespace ambspindle {

enum class CrowdingSpace { Objective, Variable };

struct GASettings {
  int max_generations = 1800;
  int population = 200;
  int max_stall_generations = 100;
  double pareto_fraction = 0.35;
  double function_tolerance = 1e-4;
  CrowdingSpace crowding = CrowdingSpace::Variable;
  std::uint64_t rng_seed = 1;
  double crossover_probability = 0.9;
  double crossover_index = 15.0;     // SBX eta_c
  double mutation_index = 20.0;      // polynomial eta_m
  double mutation_probability = 0.0; // per variable; 0 = 1/n
  int workers = 0;                   // 0 = resolve from environment

  bool operator==(const GASettings&) const = default;
};

inline std::vector<std::string> ga_violations(const GASettings& s) {
  std::vector<std::string> out;
  if (s.population < 4 || s.population % 2 != 0) out.push_back("optimizer: population must be even and >= 4");
  if (s.max_generations < 1) out.push_back("optimizer: max_generations must be >= 1");
  if (s.max_stall_generations < 1) out.push_back("optimizer: max_stall_generations must be >= 1");
  if (!(s.pareto_fraction > 0.0 && s.pareto_fraction <= 1.0)) out.push_back("optimizer: pareto_fraction must be in (0, 1]");
  if (!(s.function_tolerance > 0.0)) out.push_back("optimizer: function_tolerance must be > 0");
  if (!(s.crossover_probability >= 0.0 && s.crossover_probability <= 1.0))
    out.push_back("optimizer: crossover_probability must be in [0, 1]");
  if (!(s.crossover_index >= 0.0) || !(s.mutation_index >= 0.0))
    out.push_back("optimizer: distribution indices must be >= 0");
  if (!(s.mutation_probability >= 0.0 && s.mutation_probability <= 1.0))
    out.push_back("optimizer: mutation_probability must be in [0, 1]");
  return out;
}

struct Evaluation {
  std::vector<double> objectives;  // minimized
  double violation = 0.0;          // 0 = feasible
  std::vector<double> excess;      // per named constraint, for diagnostics

  bool feasible() const { return violation == 0.0; }
  bool operator==(const Evaluation&) const = default;
};

struct MogaProblem {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> constraint_names;
  std::function<Evaluation(const std::vector<double>&)> evaluate;
  std::vector<double> reference_point;  // hypervolume reference; empty = derive from the first population
};

struct Individual {
  std::vector<double> x;
  Evaluation eval;

  bool operator==(const Individual&) const = default;
};

struct MogaResult {
  std::vector<Individual> front;  // feasible, mutually non-dominated, sorted by objective 0
  std::vector<double> spread_history;
  std::vector<double> hypervolume_history;
  std::vector<double> reference_point;
  std::vector<double> ideal_point;
  int generations = 0;
  std::string stop_reason;
  std::uint64_t seed = 0;
};

namespace moga {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t slot) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ generation) ^ slot));
}

inline double uniform01(std::mt19937_64& g) { return std::generate_canonical<double, 64>(g); }

inline bool pareto_dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

/// Feasible beats infeasible; infeasible compare by violation; feasible by
/// Pareto dominance.
inline bool constrained_dominates(const Evaluation& a, const Evaluation& b) {
  if (a.feasible() != b.feasible()) return a.feasible();
  if (!a.feasible()) return a.violation < b.violation;
  return pareto_dominates(a.objectives, b.objectives);
}

/// Fronts as index lists, best first. Order inside a front follows input order.
inline std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<Individual>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (constrained_dominates(pop[i].eval, pop[j].eval)) {
        dominated[i].push_back(j);
        ++count[j];
      } else if (constrained_dominates(pop[j].eval, pop[i].eval)) {
        dominated[j].push_back(i);
        ++count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] == 0) fronts[0].push_back(i);
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts[f])
      for (std::size_t j : dominated[i])
        if (--count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

/// Crowding distance of each member of `front` over the chosen coordinates.
inline std::vector<double> crowding_distance(const std::vector<Individual>& pop, const std::vector<std::size_t>& front,
                                             CrowdingSpace space, const std::vector<double>& lower,
                                             const std::vector<double>& upper) {
  const std::size_t n = front.size();
  std::vector<double> d(n, 0.0);
  if (n == 0) return d;
  auto coord = [&](std::size_t member, std::size_t k) {
    const auto& ind = pop[front[member]];
    if (space == CrowdingSpace::Objective) return ind.eval.objectives[k];
    return (ind.x[k] - lower[k]) / (upper[k] - lower[k]);
  };
  const std::size_t dims =
      space == CrowdingSpace::Objective ? pop[front[0]].eval.objectives.size() : pop[front[0]].x.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < dims; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coord(a, k) < coord(b, k); });
    const double lo = coord(order.front(), k);
    const double hi = coord(order.back(), k);
    d[order.front()] = d[order.back()] = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) d[order[i]] += (coord(order[i + 1], k) - coord(order[i - 1], k)) / (hi - lo);
  }
  return d;
}

/// Exact 2-D hypervolume dominated by `points` and bounded by `ref`.
inline double hypervolume2d(std::vector<std::vector<double>> points, const std::vector<double>& ref) {
  std::erase_if(points, [&](const auto& p) { return !(p[0] < ref[0] && p[1] < ref[1]); });
  std::sort(points.begin(), points.end());
  double hv = 0.0;
  double last_f1 = ref[1];
  for (const auto& p : points) {
    if (p[1] < last_f1) {
      hv += (ref[0] - p[0]) * (last_f1 - p[1]);
      last_f1 = p[1];
    }
  }
  return hv;
}

/// Non-dominated, objective-unique subset of feasible individuals, sorted by
/// objective 0 then 1.
inline std::vector<Individual> nondominated_feasible(std::vector<Individual> pool) {
  std::erase_if(pool, [](const Individual& i) { return !i.eval.feasible(); });
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Individual& a, const Individual& b) { return a.eval.objectives < b.eval.objectives; });
  std::vector<Individual> out;
  for (auto& cand : pool) {
    if (!out.empty() && out.back().eval.objectives == cand.eval.objectives) continue;
    bool dominated = false;
    for (const auto& kept : out)
      if (pareto_dominates(kept.eval.objectives, cand.eval.objectives)) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(std::move(cand));
  }
  return out;
}

/// Greedy truncation: repeatedly drop the member with the smallest exclusive
/// hypervolume contribution (members outside the reference box go first).
inline std::vector<Individual> truncate_by_contribution(std::vector<Individual> front, std::size_t cap,
                                                        const std::vector<double>& ref) {
  while (front.size() > cap) {
    // `front` is sorted by f0 ascending, hence f1 descending.
    std::size_t worst = 0;
    double worst_c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < front.size(); ++i) {
      const auto& p = front[i].eval.objectives;
      double c = 0.0;
      if (p[0] < ref[0] && p[1] < ref[1]) {
        const double right = i + 1 < front.size() ? std::min(front[i + 1].eval.objectives[0], ref[0]) : ref[0];
        const double up = i > 0 ? std::min(front[i - 1].eval.objectives[1], ref[1]) : ref[1];
        c = (right - p[0]) * (up - p[1]);
      }
      if (c < worst_c) {
        worst_c = c;
        worst = i;
      }
    }
    front.erase(front.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  return front;
}

inline std::vector<std::vector<double>> objectives_of(const std::vector<Individual>& v) {
  std::vector<std::vector<double>> out;
  out.reserve(v.size());
  for (const auto& i : v) out.push_back(i.eval.objectives);
  return out;
}

/// Archive update that never loses hypervolume: the greedy truncation is
/// compared with a set built from dominators of the previous archive, and the
/// larger hypervolume wins.
inline std::vector<Individual> update_archive(const std::vector<Individual>& archive,
                                              const std::vector<Individual>& population, std::size_t cap,
                                              const std::vector<double>& ref) {
  std::vector<Individual> pool = archive;
  pool.insert(pool.end(), population.begin(), population.end());
  std::vector<Individual> merged = nondominated_feasible(std::move(pool));
  if (merged.size() <= cap) return merged;

  std::vector<Individual> greedy = truncate_by_contribution(merged, cap, ref);
  const double hv_old = hypervolume2d(objectives_of(archive), ref);
  if (hypervolume2d(objectives_of(greedy), ref) >= hv_old) return greedy;

  // Keep one weak dominator per old member, then add by largest contribution.
  std::vector<char> taken(merged.size(), 0);
  for (const auto& old : archive) {
    for (std::size_t j = 0; j < merged.size(); ++j) {
      const auto& m = merged[j].eval.objectives;
      if (m == old.eval.objectives || pareto_dominates(m, old.eval.objectives)) {
        taken[j] = 1;
        break;
      }
    }
  }
  auto chosen = [&] {
    std::vector<Individual> s;
    for (std::size_t j = 0; j < merged.size(); ++j)
      if (taken[j]) s.push_back(merged[j]);
    return s;
  };
  std::size_t count = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), 1));
  while (count < cap) {
    const double base = hypervolume2d(objectives_of(chosen()), ref);
    std::size_t best = merged.size();
    double best_gain = -1.0;
    for (std::size_t j = 0; j < merged.size(); ++j) {
      if (taken[j]) continue;
      taken[j] = 1;
      const double gain = hypervolume2d(objectives_of(chosen()), ref) - base;
      taken[j] = 0;
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best == merged.size()) break;
    taken[best] = 1;
    ++count;
  }
  return chosen();
}

/// Extent plus distribution of a front in normalized objective space:
/// diagonal of its bounding box plus the coefficient of variation of the gaps
/// between neighbours (sorted by objective 0). A single point scores 0.
inline double spread_metric(const std::vector<std::vector<double>>& front, const std::vector<double>& ideal,
                            const std::vector<double>& nadir) {
  if (front.size() < 2) return 0.0;
  std::vector<std::vector<double>> pts;
  for (const auto& p : front) {
    std::vector<double> q(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double span = nadir[k] - ideal[k];
      q[k] = span > 0.0 ? (p[k] - ideal[k]) / span : 0.0;
    }
    pts.push_back(std::move(q));
  }
  std::sort(pts.begin(), pts.end());
  double extent2 = 0.0;
  for (std::size_t k = 0; k < pts[0].size(); ++k) {
    double lo = pts[0][k], hi = pts[0][k];
    for (const auto& p : pts) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    extent2 += (hi - lo) * (hi - lo);
  }
  std::vector<double> gaps;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double g2 = 0.0;
    for (std::size_t k = 0; k < pts[i].size(); ++k) g2 += (pts[i][k] - pts[i - 1][k]) * (pts[i][k] - pts[i - 1][k]);
    gaps.push_back(std::sqrt(g2));
  }
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gaps.size());
  const double cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  return std::sqrt(extent2) + cv;
}

/// Mean relative change of the spread over the last `window` generations.
inline double average_spread_change(const std::vector<double>& history, std::size_t window) {
  if (history.size() < 2) return std::numeric_limits<double>::infinity();
  const std::size_t w = std::min(window, history.size() - 1);
  double sum = 0.0;
  for (std::size_t i = history.size() - w; i < history.size(); ++i) {
    const double prev = history[i - 1];
    const double change = std::abs(history[i] - prev);
    sum += prev > 0.0 ? change / prev : change;
  }
  return sum / static_cast<double>(w);
}

inline void sbx(std::vector<double>& a, std::vector<double>& b, const std::vector<double>& lo,
                const std::vector<double>& hi, double eta, std::mt19937_64& g) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double swap_draw = uniform01(g);
    const double u = uniform01(g);
    if (swap_draw > 0.5 || std::abs(a[k] - b[k]) < 1e-14) continue;
    const double y1 = std::min(a[k], b[k]);
    const double y2 = std::max(a[k], b[k]);
    const double span = y2 - y1;
    auto child = [&](double beta_bound) {
      const double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                              : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    const double bq1 = child(1.0 + 2.0 * (y1 - lo[k]) / span);
    const double bq2 = child(1.0 + 2.0 * (hi[k] - y2) / span);
    const double c1 = std::clamp(0.5 * ((y1 + y2) - bq1 * span), lo[k], hi[k]);
    const double c2 = std::clamp(0.5 * ((y1 + y2) + bq2 * span), lo[k], hi[k]);
    const bool flip = uniform01(g) < 0.5;
    a[k] = flip ? c2 : c1;
    b[k] = flip ? c1 : c2;
  }
}

inline void polynomial_mutation(std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi,
                                double eta, double prob, std::mt19937_64& g) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double apply = uniform01(g);
    const double u = uniform01(g);
    if (apply >= prob) continue;
    const double span = hi[k] - lo[k];
    const double d1 = (x[k] - lo[k]) / span;
    const double d2 = (hi[k] - x[k]) / span;
    const double p = 1.0 / (eta + 1.0);
    double dq;
    if (u < 0.5) {
      const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(v, p) - 1.0;
    } else {
      const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(v, p);
    }
    x[k] = std::clamp(x[k] + dq * span, lo[k], hi[k]);
  }
}

}  // namespace moga

/// Runs the optimizer. `on_generation`, if set, sees the archive after each
/// generation (used by tests to audit elitism).
inline MogaResult run_moga(const GASettings& s, const MogaProblem& problem,
                           const std::function<void(int, const std::vector<Individual>&)>& on_generation = {}) {
  using namespace moga;
  if (auto v = ga_violations(s); !v.empty()) throw ValidationError(std::move(v));
  const std::size_t n_var = problem.lower.size();
  if (n_var == 0 || problem.upper.size() != n_var) throw DomainError("run_moga: bounds must be non-empty and matched");
  for (std::size_t k = 0; k < n_var; ++k)
    if (!(std::isfinite(problem.lower[k]) && std::isfinite(problem.upper[k]) && problem.lower[k] < problem.upper[k]))
      throw DomainError(fmt::format("run_moga: bounds of variable {} must be finite with lower < upper", k));

  const auto pop_size = static_cast<std::size_t>(s.population);
  const std::size_t cap = static_cast<std::size_t>(std::ceil(s.pareto_fraction * s.population - 1e-9));
  const double p_mut = s.mutation_probability > 0.0 ? s.mutation_probability : 1.0 / static_cast<double>(n_var);
  const unsigned workers = resolve_workers(s.workers);

  auto evaluate_all = [&](std::vector<Individual>& v) {
    parallel_for(v.size(), workers, [&](std::size_t i) {
      v[i].eval = problem.evaluate(v[i].x);
      if (v[i].eval.objectives.size() != 2) throw DomainError("run_moga: problems must have exactly two objectives");
    });
  };

  std::vector<Individual> pop(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    auto g = stream(s.rng_seed, 0, i);
    pop[i].x.resize(n_var);
    for (std::size_t k = 0; k < n_var; ++k)
      pop[i].x[k] = problem.lower[k] + uniform01(g) * (problem.upper[k] - problem.lower[k]);
  }
  evaluate_all(pop);

  const auto feasible_count = std::count_if(pop.begin(), pop.end(), [](const auto& i) { return i.eval.feasible(); });
  if (feasible_count == 0) {
    std::string msg = fmt::format("run_moga: no feasible individual among {} initial candidates", pop_size);
    for (std::size_t c = 0; c < problem.constraint_names.size(); ++c) {
      std::size_t violated = 0;
      double least = std::numeric_limits<double>::infinity();
      for (const auto& ind : pop) {
        if (c < ind.eval.excess.size() && ind.eval.excess[c] > 0.0) ++violated;
        if (c < ind.eval.excess.size()) least = std::min(least, ind.eval.excess[c]);
      }
      msg += fmt::format("\n  {}: violated by {}/{}, smallest excess {:.4g}", problem.constraint_names[c], violated,
                         pop_size, least);
    }
    throw DomainError(msg);
  }

  MogaResult res;
  res.seed = s.rng_seed;
  res.ideal_point = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  std::vector<double> worst{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& ind : pop) {
    if (!ind.eval.feasible()) continue;
    for (std::size_t k = 0; k < 2; ++k) {
      res.ideal_point[k] = std::min(res.ideal_point[k], ind.eval.objectives[k]);
      worst[k] = std::max(worst[k], ind.eval.objectives[k]);
    }
  }
  if (!problem.reference_point.empty()) {
    res.reference_point = problem.reference_point;
  } else {
    res.reference_point.resize(2);
    for (std::size_t k = 0; k < 2; ++k) {
      const double span = worst[k] - res.ideal_point[k];
      res.reference_point[k] = worst[k] + 0.1 * (span > 0.0 ? span : std::max(1.0, std::abs(worst[k])));
    }
  }
  const auto& ref = res.reference_point;
  const auto& ideal = res.ideal_point;

  std::vector<Individual> archive = update_archive({}, pop, cap, ref);
  auto record = [&](int gen) {
    res.spread_history.push_back(spread_metric(objectives_of(archive), ideal, ref));
    res.hypervolume_history.push_back(hypervolume2d(objectives_of(archive), ref));
    if (on_generation) on_generation(gen, archive);
  };
  record(0);

  std::vector<int> rank(pop_size);
  std::vector<double> crowd(pop_size);
  auto rank_population = [&] {
    const auto fronts = nondominated_sort(pop);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      const auto d = crowding_distance(pop, fronts[f], s.crowding, problem.lower, problem.upper);
      for (std::size_t m = 0; m < fronts[f].size(); ++m) {
        rank[fronts[f][m]] = static_cast<int>(f);
        crowd[fronts[f][m]] = d[m];
      }
    }
  };
  rank_population();

  res.stop_reason = "max_generations";
  int gen = 1;
  for (; gen <= s.max_generations; ++gen) {
    std::vector<Individual> kids(pop_size);
    for (std::size_t pair = 0; pair < pop_size / 2; ++pair) {
      auto g = stream(s.rng_seed, static_cast<std::uint64_t>(gen), pair);
      auto tournament = [&] {
        const auto a = static_cast<std::size_t>(uniform01(g) * pop_size) % pop_size;
        const auto b = static_cast<std::size_t>(uniform01(g) * pop_size) % pop_size;
        if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
        return crowd[b] > crowd[a] ? b : a;
      };
      const std::size_t pa = tournament();
      const std::size_t pb = tournament();
      std::vector<double> c1 = pop[pa].x, c2 = pop[pb].x;
      if (uniform01(g) < s.crossover_probability) sbx(c1, c2, problem.lower, problem.upper, s.crossover_index, g);
      polynomial_mutation(c1, problem.lower, problem.upper, s.mutation_index, p_mut, g);
      polynomial_mutation(c2, problem.lower, problem.upper, s.mutation_index, p_mut, g);
      kids[2 * pair].x = std::move(c1);
      kids[2 * pair + 1].x = std::move(c2);
    }
    evaluate_all(kids);

    std::vector<Individual> combined = pop;
    combined.insert(combined.end(), kids.begin(), kids.end());
    const auto fronts = nondominated_sort(combined);
    std::vector<Individual> next;
    next.reserve(pop_size);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= pop_size) {
        for (std::size_t i : front) next.push_back(combined[i]);
        continue;
      }
      const auto d = crowding_distance(combined, front, s.crowding, problem.lower, problem.upper);
      std::vector<std::size_t> order(front.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
      for (std::size_t m = 0; next.size() < pop_size; ++m) next.push_back(combined[front[order[m]]]);
      break;
    }
    pop = std::move(next);
    rank_population();

    archive = update_archive(archive, combined, cap, ref);
    record(gen);

    if (gen >= s.max_stall_generations &&
        average_spread_change(res.spread_history, static_cast<std::size_t>(s.max_stall_generations)) <
            s.function_tolerance) {
      res.stop_reason = "spread_stall";
      break;
    }
  }
  res.generations = std::min(gen, s.max_generations);
  res.front = archive;
  return res;
}

}  // namespace ambspindle
