// Whole-suite evolutionary search: fitness, selection, archiving,
// determinism, and mode normalization.

#include "testutil.hpp"

namespace modgen {
namespace {

using test::construct;
using test::goal;
using test::invoke;
using test::loadChecked;
using test::makeTest;

// --------------------------------------------------------------------------
// Fitness
// --------------------------------------------------------------------------

TEST(Fitness, EmptyTestScoresOnePerGoal) {
  CheckedProgram prog = loadChecked("counter.moo");
  std::vector<BranchGoalId> goals = {
      goal("Counter.phase", 0, Arm::True), goal("Counter.phase", 0, Arm::False),
      goal("Counter.phase", 1, Arm::True), goal("Counter.phase", 1, Arm::False)};
  FitnessEval ev = evaluateFitness(prog, TestCase{}, "Counter.phase", goals, false);
  EXPECT_DOUBLE_EQ(ev.fitness, 4.0);
  EXPECT_TRUE(ev.covered.empty());
  for (const auto& [g, d] : ev.perGoal) EXPECT_DOUBLE_EQ(d, 1.0);
}

TEST(Fitness, HandComputedDistancesOnFreshCounter) {
  CheckedProgram prog = loadChecked("counter.moo");
  std::vector<BranchGoalId> goals = {
      goal("Counter.phase", 0, Arm::True), goal("Counter.phase", 0, Arm::False),
      goal("Counter.phase", 1, Arm::True), goal("Counter.phase", 1, Arm::False)};
  // value == 0 takes TRUE with |0-0|+1 = 1 toward FALSE; the second
  // predicate is never reached.
  TestCase t = makeTest(prog, {construct("v0", "Counter"), invoke("v1", "v0", "phase")});
  FitnessEval ev = evaluateFitness(prog, t, "Counter.phase", goals, false);
  EXPECT_EQ(ev.covered.size(), 1u);
  EXPECT_TRUE(ev.covered.count(goals[0]));
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[0]], 0.0);
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[1]], 0.5 + 0.5 * (1.0 / 2.0));
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[2]], 1.0);
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[3]], 1.0);
  EXPECT_DOUBLE_EQ(ev.fitness, 0.0 + 0.75 + 1.0 + 1.0);
}

TEST(Fitness, HandComputedDistancesAfterOneTick) {
  CheckedProgram prog = loadChecked("counter.moo");
  std::vector<BranchGoalId> goals = {
      goal("Counter.phase", 0, Arm::True), goal("Counter.phase", 0, Arm::False),
      goal("Counter.phase", 1, Arm::True), goal("Counter.phase", 1, Arm::False)};
  // value = 1: 1 == 0 misses TRUE by |1-0|+1 = 2; 1 < 3 misses FALSE by
  // 3-1+1 = 3.
  TestCase t = makeTest(prog, {construct("v0", "Counter"), invoke("", "v0", "tick"),
                               invoke("v1", "v0", "phase")});
  FitnessEval ev = evaluateFitness(prog, t, "Counter.phase", goals, false);
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[0]], 0.5 + 0.5 * (2.0 / 3.0));
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[1]], 0.0);
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[2]], 0.0);
  EXPECT_DOUBLE_EQ(ev.perGoal[goals[3]], 0.5 + 0.5 * (3.0 / 4.0));
  EXPECT_DOUBLE_EQ(ev.fitness, 0.5 + 0.5 * (2.0 / 3.0) + 0.5 + 0.5 * (3.0 / 4.0));
}

TEST(Fitness, LowerFitnessMeansCloserToFullCoverage) {
  CheckedProgram prog = loadChecked("counter.moo");
  std::vector<BranchGoalId> goals = {
      goal("Counter.phase", 0, Arm::True), goal("Counter.phase", 0, Arm::False),
      goal("Counter.phase", 1, Arm::True), goal("Counter.phase", 1, Arm::False)};
  TestCase weak = makeTest(prog, {construct("v0", "Counter"), invoke("v1", "v0", "phase")});
  TestCase strong = makeTest(prog, {construct("v0", "Counter"),
                                    invoke("v1", "v0", "phase"),
                                    invoke("", "v0", "tick"),
                                    invoke("v2", "v0", "phase"),
                                    invoke("", "v0", "tick"),
                                    invoke("", "v0", "tick"),
                                    invoke("v3", "v0", "phase")});
  double weakFit = evaluateFitness(prog, weak, "Counter.phase", goals, false).fitness;
  FitnessEval strongEv = evaluateFitness(prog, strong, "Counter.phase", goals, false);
  EXPECT_LT(strongEv.fitness, weakFit);
  EXPECT_DOUBLE_EQ(strongEv.fitness, 0.0);  // all four arms taken
  EXPECT_EQ(strongEv.covered.size(), 4u);
}

TEST(Fitness, AttributedModeIgnoresForeignRoots) {
  CheckedProgram prog = loadChecked("album.moo");
  std::vector<BranchGoalId> goals = {
      goal("Album.stripString", 0, Arm::True), goal("Album.stripString", 0, Arm::False),
      goal("Album.stripString", 1, Arm::True), goal("Album.stripString", 1, Arm::False)};
  TestCase t = makeTest(
      prog, {construct("v0", "Album"),
             invoke("v1", "v0", "getPrice", {TestArg::ofLit(Value::strV("$5a"))})});

  FitnessEval plain = evaluateFitness(prog, t, "Album.stripString", goals, false);
  EXPECT_EQ(plain.covered.size(), 4u);
  EXPECT_DOUBLE_EQ(plain.fitness, 0.0);

  // Rooted at getPrice, so attributed measurement sees nothing at all.
  FitnessEval attributed = evaluateFitness(prog, t, "Album.stripString", goals, true);
  EXPECT_TRUE(attributed.covered.empty());
  EXPECT_DOUBLE_EQ(attributed.fitness, 4.0);
}

TEST(Fitness, PerGoalDistancesStayNormalized) {
  CheckedProgram prog = loadChecked("wallet.moo");
  TestCluster cl = buildCluster(prog, "Wallet", "canSpend", ClusterMode::Emote);
  std::vector<BranchGoalId> goals = cl.target->branchGoals;
  SearchConfig cfg;
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    std::optional<TestCase> t = randomTest(cl, cfg, rng);
    ASSERT_TRUE(t);
    FitnessEval ev = evaluateFitness(prog, *t, cl.targetQualified(), goals, true);
    for (const auto& [g, d] : ev.perGoal) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
    }
    EXPECT_LE(ev.covered.size(), goals.size());
  }
}

// --------------------------------------------------------------------------
// Selection
// --------------------------------------------------------------------------

Individual individualOf(const CheckedProgram& prog, std::vector<TestStatement> stmts,
                        double fitness) {
  Individual ind;
  ind.test = makeTest(prog, std::move(stmts));
  ind.fitness = fitness;
  return ind;
}

TEST(Selection, TournamentPrefersLowerFitness) {
  CheckedProgram prog = loadChecked("counter.moo");
  std::vector<Individual> pop;
  pop.push_back(individualOf(prog, {construct("v0", "Counter")}, 5.0));
  pop.push_back(individualOf(prog, {construct("v0", "Counter")}, 0.5));
  SearchConfig cfg;
  cfg.tournamentSize = 4;
  Rng rng(8);
  int lowWins = 0;
  for (int i = 0; i < 200; ++i)
    if (selectParent(pop, cfg, rng).fitness == 0.5) ++lowWins;
  // The low-fitness individual loses only when all four samples miss it.
  EXPECT_GT(lowWins, 150);
}

TEST(Selection, FitnessTiesPreferShorterTests) {
  CheckedProgram prog = loadChecked("counter.moo");
  std::vector<Individual> pop;
  pop.push_back(individualOf(prog,
                             {construct("v0", "Counter"), invoke("", "v0", "tick"),
                              invoke("", "v0", "tick")},
                             1.0));
  pop.push_back(individualOf(prog, {construct("v0", "Counter")}, 1.0));
  SearchConfig cfg;
  cfg.tournamentSize = 4;
  Rng rng(9);
  int shortWins = 0;
  for (int i = 0; i < 200; ++i)
    if (selectParent(pop, cfg, rng).test.size() == 1) ++shortWins;
  EXPECT_GT(shortWins, 150);
}

// --------------------------------------------------------------------------
// Mode normalization
// --------------------------------------------------------------------------

TEST(Modes, NormalizationPinsAttribution) {
  SearchConfig cfg;
  cfg.mode = ClusterMode::Emote;
  cfg.attributedFitness = false;
  EXPECT_TRUE(normalizedConfig(cfg).attributedFitness);

  cfg.mode = ClusterMode::Strict;
  cfg.attributedFitness = true;
  EXPECT_FALSE(normalizedConfig(cfg).attributedFitness);

  cfg.mode = ClusterMode::Whole;
  cfg.attributedFitness = true;
  EXPECT_TRUE(normalizedConfig(cfg).attributedFitness);
  cfg.attributedFitness = false;
  EXPECT_FALSE(normalizedConfig(cfg).attributedFitness);
}

TEST(Modes, StrictTestsOnlyEverRootAtTheTarget) {
  CheckedProgram prog = loadChecked("album.moo");
  TestCluster cl = buildCluster(prog, "Album", "getPrice", ClusterMode::Strict);
  SearchConfig cfg;
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    std::optional<TestCase> t = randomTest(cl, cfg, rng);
    ASSERT_TRUE(t);
    ExecutionTrace tr = executeTest(prog, *t);
    for (const auto& e : tr.events) EXPECT_EQ(e.rootMethod, "Album.getPrice");
  }
}

// --------------------------------------------------------------------------
// Search runs
// --------------------------------------------------------------------------

SearchConfig quickConfig(ClusterMode mode, uint64_t seed, long long generations) {
  SearchConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.maxGenerations = generations;
  cfg.populationSize = 24;
  return cfg;
}

TEST(Search, GenerationCapIsExact) {
  CheckedProgram prog = loadChecked("counter.moo");
  SearchResult res = evolve(prog, "Counter", "phase",
                            quickConfig(ClusterMode::Strict, 1, 7));
  EXPECT_EQ(res.generations, 7);
  EXPECT_FALSE(res.saturated);
  EXPECT_GT(res.evaluations, 0);
}

TEST(Search, StrictCannotLeavePhaseZero) {
  CheckedProgram prog = loadChecked("counter.moo");
  SearchResult res = evolve(prog, "Counter", "phase",
                            quickConfig(ClusterMode::Strict, 3, 30));
  // Without tick, only value==0 TRUE is coverable.
  EXPECT_EQ(res.ledger.coveredCount(), 1);
  EXPECT_TRUE(res.ledger.bestDistance.at(goal("Counter.phase", 0, Arm::True)) == 0.0);
}

TEST(Search, EmoteCoversCounterCompletely) {
  CheckedProgram prog = loadChecked("counter.moo");
  SearchResult res = evolve(prog, "Counter", "phase",
                            quickConfig(ClusterMode::Emote, 3, 60));
  EXPECT_TRUE(res.ledger.fullyCovered()) << res.ledger.coveredCount();
}

TEST(Search, FullCoverageStopsEarly) {
  CheckedProgram prog = loadChecked("rect.moo");
  SearchConfig cfg;
  cfg.mode = ClusterMode::Emote;
  cfg.seed = 1;
  cfg.budgetSeconds = 60.0;  // the stop condition, not the clock, must end this
  auto start = std::chrono::steady_clock::now();
  SearchResult res = evolve(prog, "Rect", "isSquare", cfg);
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_TRUE(res.ledger.fullyCovered());
  EXPECT_LT(took, 20.0);
}

TEST(Search, TimelineIsMonotoneAndConsistent) {
  CheckedProgram prog = loadChecked("wallet.moo");
  SearchResult res = evolve(prog, "Wallet", "canSpend",
                            quickConfig(ClusterMode::Emote, 5, 40));
  // One sample after the initial population, one more only if the loop ran.
  ASSERT_GE(res.timeline.size(), 1u);
  int prev = -1;
  for (const auto& s : res.timeline) {
    EXPECT_GE(s.coveredCount, prev);
    prev = s.coveredCount;
    double expectPct =
        100.0 * s.coveredCount / static_cast<double>(res.ledger.goals.size());
    EXPECT_DOUBLE_EQ(s.coveragePct, expectPct);
  }
  EXPECT_EQ(res.timeline.back().coveredCount, res.ledger.coveredCount());
}

TEST(Search, ArchivedSuiteReproducesLedgerCoverage) {
  CheckedProgram prog = loadChecked("wallet.moo");
  SearchResult res = evolve(prog, "Wallet", "canSpend",
                            quickConfig(ClusterMode::Emote, 7, 50));
  ASSERT_FALSE(res.bestSuite.empty());

  std::set<BranchGoalId> ledgerCovered;
  for (const auto& [g, d] : res.ledger.bestDistance)
    if (d == 0.0) ledgerCovered.insert(g);

  std::set<BranchGoalId> replayed;
  std::set<std::string> renders;
  for (const auto& t : res.bestSuite) {
    EXPECT_TRUE(validateTest(prog, t).empty()) << t.render();
    EXPECT_TRUE(renders.insert(t.render()).second) << "duplicate archived test";
    FitnessEval ev =
        evaluateFitness(prog, t, "Wallet.canSpend", res.ledger.goals, true);
    for (const auto& g : ev.covered) replayed.insert(g);
  }
  EXPECT_EQ(replayed, ledgerCovered);
}

TEST(Search, IdenticalSeedsProduceIdenticalResults) {
  CheckedProgram prog = loadChecked("wallet.moo");
  auto run = [&] {
    SearchResult res = evolve(prog, "Wallet", "deposit",
                              quickConfig(ClusterMode::Emote, 11, 12));
    std::string out = std::to_string(res.evaluations) + "|" +
                      std::to_string(res.ledger.coveredCount()) + "|";
    for (const auto& t : res.bestSuite) out += t.render() + ";";
    for (const auto& [g, d] : res.ledger.bestDistance)
      out += g.str() + "=" + std::to_string(d) + ",";
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Search, SaturatedClusterReportsImmediately) {
  CheckedProgram prog = loadChecked("counter.moo");
  TestCluster cl = buildCluster(prog, "Counter", "phase", ClusterMode::Strict);
  cl.generators.clear();
  SearchConfig cfg;
  Rng rng(2);
  EXPECT_FALSE(randomTest(cl, cfg, rng).has_value());
}

}  // namespace
}  // namespace modgen
