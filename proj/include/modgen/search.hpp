#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgen/cluster.hpp"
#include "modgen/genops.hpp"
#include "modgen/interp.hpp"
#include "modgen/rng.hpp"

namespace modgen {

struct SearchConfig {
  int populationSize = 50;
  double budgetSeconds = 10.0;
  uint64_t seed = 1;
  double mutationRate = 0.0;  // 0 means adaptive 1/length
  double crossoverRate = 0.75;
  int tournamentSize = 4;
  int eliteCount = 2;
  int maxTestLength = 40;  // initial length drawn uniformly from [1, this]
  ClusterMode mode = ClusterMode::Strict;
  bool attributedFitness = false;

  // Deterministic stop for tests: when >= 0, run exactly this many
  // generations and ignore the wall clock.
  long long maxGenerations = -1;
  double sampleEverySeconds = 1.0;
  // Stop once every goal is covered instead of idling out the budget.
  bool stopOnFullCoverage = true;
  long long stepLimit = 100000;
};

// EMOTE fitness is attributed by definition; STRICT cannot produce
// non-target roots, so the flag is pinned off. WHOLE keeps it togglable.
inline SearchConfig normalizedConfig(SearchConfig config) {
  if (config.mode == ClusterMode::Emote) config.attributedFitness = true;
  if (config.mode == ClusterMode::Strict) config.attributedFitness = false;
  return config;
}

struct Individual {
  TestCase test;
  double fitness = 0.0;
  std::set<BranchGoalId> coveredGoals;
  int evalCount = 0;
};

struct TimelineSample {
  double tSeconds = 0.0;
  int coveredCount = 0;
  double coveragePct = 0.0;
};

struct GoalLedger {
  std::vector<BranchGoalId> goals;
  std::map<BranchGoalId, double> bestDistance;  // normalized, in [0,1]
  std::map<BranchGoalId, std::string> coveredBy;  // first covering test, serialized

  int coveredCount() const {
    int n = 0;
    for (const auto& [goal, d] : bestDistance)
      if (d == 0.0) ++n;
    return n;
  }
  double coveragePct() const {
    if (goals.empty()) return 100.0;
    return 100.0 * coveredCount() / static_cast<double>(goals.size());
  }
  bool fullyCovered() const { return coveredCount() == static_cast<int>(goals.size()); }
};

struct SearchResult {
  GoalLedger ledger;
  std::vector<TimelineSample> timeline;
  std::vector<TestCase> bestSuite;  // one archived test per covered goal, deduplicated
  long long evaluations = 0;
  long long generations = 0;
  std::vector<std::string> diagnostics;
  bool saturated = false;
};

struct FitnessEval {
  double fitness = 0.0;
  std::set<BranchGoalId> covered;
  std::map<BranchGoalId, double> perGoal;  // normalized distance per goal
  ExecutionTrace trace;
};

// Per-goal distance over one execution: 0 when an event takes the goal's
// arm, 0.5 + 0.5*d/(d+1) over the best opposite-arm event at the same
// predicate, 1 when the predicate is never reached. Fitness is the sum.
inline FitnessEval evaluateFitness(const CheckedProgram& prog, const TestCase& test,
                                   const std::string& targetQualified,
                                   const std::vector<BranchGoalId>& goals, bool attributed,
                                   long long stepLimit = 100000) {
  FitnessEval out;
  ExecLimits limits;
  limits.stepLimit = stepLimit;
  out.trace = executeTest(prog, test, limits);
  const std::vector<BranchEvent> attributedOnly =
      attributed ? attributedEvents(out.trace, targetQualified) : std::vector<BranchEvent>{};
  const std::vector<BranchEvent>& events = attributed ? attributedOnly : out.trace.events;

  for (const auto& goal : goals) {
    bool taken = false;
    double best = -1.0;
    for (const auto& ev : events) {
      if (ev.goalTaken.method != goal.method ||
          ev.goalTaken.predicateIndex != goal.predicateIndex)
        continue;
      if (ev.goalTaken.arm == goal.arm) {
        taken = true;
        break;
      }
      if (best < 0.0 || ev.oppositeDistance < best) best = ev.oppositeDistance;
    }
    double d;
    if (taken) {
      d = 0.0;
      out.covered.insert(goal);
    } else if (best >= 0.0) {
      d = 0.5 + 0.5 * (best / (best + 1.0));
    } else {
      d = 1.0;
    }
    out.perGoal[goal] = d;
    out.fitness += d;
  }
  return out;
}

// Tournament selection: lowest fitness wins, ties broken by shorter test,
// remaining ties by coin flip.
inline const Individual& selectParent(const std::vector<Individual>& population,
                                      const SearchConfig& config, Rng& rng) {
  const Individual* best = &population[rng.index(population.size())];
  for (int i = 1; i < config.tournamentSize; ++i) {
    const Individual& cand = population[rng.index(population.size())];
    if (cand.fitness < best->fitness ||
        (cand.fitness == best->fitness &&
         (cand.test.size() < best->test.size() ||
          (cand.test.size() == best->test.size() && rng.coin()))))
      best = &cand;
  }
  return *best;
}

// One random test: grow to a uniformly drawn length by repeated insertion.
inline std::optional<TestCase> randomTest(const TestCluster& cluster, const SearchConfig& config,
                                          Rng& rng) {
  int wanted = static_cast<int>(rng.intIn(1, std::max(1, config.maxTestLength)));
  TestCase test;
  while (test.size() < wanted) {
    std::optional<TestCase> grown = randomStatementInsertion(test, cluster, rng);
    if (!grown) {
      if (test.empty()) return std::nullopt;  // saturated cluster
      break;
    }
    test = *grown;
  }
  if (cluster.mode == ClusterMode::Emote) return enforceTargetSuffix(test, cluster, rng);
  return test;
}

class Search {
 public:
  Search(const CheckedProgram& prog, std::string targetClass, std::string targetMethod,
         SearchConfig config)
      : prog_(prog),
        config_(normalizedConfig(config)),
        rng_(config.seed),
        cluster_(buildCluster(prog, targetClass, targetMethod, config.mode)) {}

  SearchResult run() {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(Clock::now() - start).count();
    };

    SearchResult res;
    res.ledger.goals = cluster_.target->branchGoals;
    for (const auto& g : res.ledger.goals) res.ledger.bestDistance[g] = 1.0;

    std::vector<Individual> population;
    for (int i = 0; i < config_.populationSize; ++i) {
      std::optional<TestCase> test = randomTest(cluster_, config_, rng_);
      if (!test) {
        res.saturated = true;
        res.diagnostics.push_back("cluster saturated: no statement can be generated for " +
                                  cluster_.targetQualified());
        return res;
      }
      population.push_back(evaluate(std::move(*test), res));
    }
    sample(res, elapsed());

    double nextSample = config_.sampleEverySeconds;
    bool budgetLeft = true;
    auto timeUp = [&] {
      if (config_.maxGenerations >= 0) return res.generations >= config_.maxGenerations;
      return elapsed() >= config_.budgetSeconds;
    };

    while (budgetLeft && !timeUp() &&
           !(config_.stopOnFullCoverage && res.ledger.fullyCovered())) {
      std::vector<Individual> next = elites(population);
      while (static_cast<int>(next.size()) < config_.populationSize) {
        const Individual& p1 = selectParent(population, config_, rng_);
        const Individual& p2 = selectParent(population, config_, rng_);
        TestCase c1 = p1.test;
        TestCase c2 = p2.test;
        if (rng_.chance(config_.crossoverRate))
          std::tie(c1, c2) = crossoverTests(c1, c2, cluster_, rng_);
        c1 = mutateTest(c1, cluster_, config_.mutationRate, rng_);
        c2 = mutateTest(c2, cluster_, config_.mutationRate, rng_);
        next.push_back(evaluate(std::move(c1), res));
        if (static_cast<int>(next.size()) < config_.populationSize)
          next.push_back(evaluate(std::move(c2), res));
        if (config_.maxGenerations < 0 && elapsed() >= config_.budgetSeconds) {
          budgetLeft = false;  // budget ran out mid-generation
          break;
        }
      }
      if (static_cast<int>(next.size()) == config_.populationSize) {
        population = std::move(next);
        ++res.generations;
      }
      while (config_.maxGenerations < 0 && elapsed() >= nextSample &&
             nextSample <= config_.budgetSeconds) {
        sample(res, nextSample);
        nextSample += config_.sampleEverySeconds;
      }
    }

    if (res.generations > 0 || res.evaluations > static_cast<long long>(population.size()))
      sample(res, elapsed());
    collectSuite(res);
    return res;
  }

  const TestCluster& cluster() const { return cluster_; }

 private:
  Individual evaluate(TestCase test, SearchResult& res) {
    FitnessEval ev = evaluateFitness(prog_, test, cluster_.targetQualified(), res.ledger.goals,
                                     config_.attributedFitness, config_.stepLimit);
    ++res.evaluations;
    for (const auto& [goal, d] : ev.perGoal) {
      double& best = res.ledger.bestDistance[goal];
      if (d < best) best = d;
      if (d == 0.0 && !res.ledger.coveredBy.count(goal)) {
        res.ledger.coveredBy[goal] = test.render();
        coveredTests_.push_back(test);
      }
    }
    Individual ind;
    ind.test = std::move(test);
    ind.fitness = ev.fitness;
    ind.coveredGoals = std::move(ev.covered);
    ind.evalCount = 1;
    return ind;
  }

  std::vector<Individual> elites(const std::vector<Individual>& population) const {
    std::vector<const Individual*> ranked;
    ranked.reserve(population.size());
    for (const auto& ind : population) ranked.push_back(&ind);
    std::stable_sort(ranked.begin(), ranked.end(), [](const Individual* a, const Individual* b) {
      if (a->fitness != b->fitness) return a->fitness < b->fitness;
      return a->test.size() < b->test.size();
    });
    std::vector<Individual> out;
    for (int i = 0; i < config_.eliteCount && i < static_cast<int>(ranked.size()); ++i)
      out.push_back(*ranked[static_cast<size_t>(i)]);
    return out;
  }

  void sample(SearchResult& res, double t) const {
    TimelineSample s;
    s.tSeconds = t;
    s.coveredCount = res.ledger.coveredCount();
    s.coveragePct = res.ledger.coveragePct();
    res.timeline.push_back(s);
  }

  void collectSuite(SearchResult& res) const {
    std::set<std::string> seen;
    for (const auto& test : coveredTests_) {
      std::string key = test.render();
      if (seen.insert(key).second) res.bestSuite.push_back(test);
    }
  }

  const CheckedProgram& prog_;
  SearchConfig config_;
  Rng rng_;
  TestCluster cluster_;
  std::vector<TestCase> coveredTests_;
};

inline SearchResult evolve(const CheckedProgram& prog, const std::string& targetClass,
                           const std::string& targetMethod, const SearchConfig& config) {
  return Search(prog, targetClass, targetMethod, config).run();
}

}  // namespace modgen
