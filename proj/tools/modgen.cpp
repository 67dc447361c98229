// Command-line front end: evolve a suite for one target (run), compare
// cluster modes over a corpus (compare), or list the targets in a source
// file (list). Exit codes: 0 success, 1 source or usage diagnostics, 2 I/O
// problems.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <modgen/modgen.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;

std::uint64_t defaultSeed() {
  if (const char* env = std::getenv("MODGEN_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
  }
  return 1;
}

struct RunArgs {
  std::string file;
  std::string className;
  std::string method;
  std::string mode = "whole";
  double budgetSeconds = 10.0;
  std::uint64_t seed = defaultSeed();
  std::string attributed = "off";
  bool dumpTrace = false;
  bool fullBudget = false;
  std::string outDir = "modgen-out";
};

struct CompareArgs {
  std::string corpusDir;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  double budgetSeconds = 10.0;
  int jobs = 1;
  bool fullBudget = false;
  std::string outDir = "modgen-out";
};

const modgen::MethodDef* findTargetMethod(const modgen::Program& prog,
                                          const std::string& className,
                                          const std::string& method) {
  const modgen::ClassDef* cls = prog.findClass(className);
  if (!cls) return nullptr;
  for (const auto& m : cls->methods)
    if (m.name == method) return &m;
  return nullptr;
}

int runSubcommand(const RunArgs& args) {
  std::optional<std::string> source = modgen::readTextFile(args.file);
  if (!source) {
    std::cerr << "error: cannot read " << args.file << "\n";
    return kExitIo;
  }
  modgen::CheckedProgram prog = modgen::analyzeProgram(*source);
  if (!prog.ok()) {
    for (const auto& d : prog.diagnostics) std::cerr << d.render(args.file) << "\n";
    return kExitDiagnostics;
  }
  if (!findTargetMethod(prog.program, args.className, args.method)) {
    std::cerr << "error: unknown target " << args.className << "." << args.method
              << " in " << args.file << "\n";
    return kExitDiagnostics;
  }

  modgen::SearchConfig config;
  config.budgetSeconds = args.fullBudget ? 120.0 : args.budgetSeconds;
  config.seed = args.seed;
  config.mode = *modgen::parseMode(args.mode);
  config.attributedFitness = args.attributed == "on";

  modgen::SearchResult res =
      modgen::evolve(prog, args.className, args.method, config);

  modgen::RunRecord rec;
  rec.target = {std::filesystem::path(args.file).filename().string(), args.className,
                args.method};
  rec.mode = config.mode;
  rec.seed = config.seed;
  rec.budgetSeconds = config.budgetSeconds;
  rec.branchTotal = static_cast<int>(res.ledger.goals.size());
  rec.branchCovered = res.ledger.coveredCount();
  rec.coveragePct = res.ledger.coveragePct();
  rec.evaluations = res.evaluations;
  rec.generations = res.generations;
  rec.saturated = res.saturated;
  rec.timeline = res.timeline;
  if (!res.diagnostics.empty()) rec.note = res.diagnostics.front();

  std::filesystem::path out(args.outDir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);

  std::string suiteText;
  for (size_t i = 0; i < res.bestSuite.size(); ++i) {
    suiteText += "// test " + std::to_string(i + 1) + "\n";
    suiteText += res.bestSuite[i].render();
    suiteText += "\n";
  }
  std::string timelineText = "tSeconds,coveredCount,coveragePct\n";
  for (const auto& s : res.timeline)
    timelineText += modgen::fmt2(s.tSeconds) + "," + std::to_string(s.coveredCount) +
                    "," + modgen::fmt2(s.coveragePct) + "\n";

  bool wrote = modgen::writeTextFile(out / "run.json", modgen::toJson(rec).dump(2) + "\n") &&
               modgen::writeTextFile(out / "suite.txt", suiteText) &&
               modgen::writeTextFile(out / "timeline.csv", timelineText);
  if (wrote && args.dumpTrace) {
    std::string traceText;
    for (size_t i = 0; i < res.bestSuite.size(); ++i) {
      traceText += "// test " + std::to_string(i + 1) + "\n";
      traceText += res.bestSuite[i].render();
      modgen::ExecutionTrace trace = modgen::executeTest(prog, res.bestSuite[i]);
      traceText += trace.dump();
      traceText += "\n";
    }
    wrote = modgen::writeTextFile(out / "traces.txt", traceText);
  }
  if (!wrote) {
    std::cerr << "error: cannot write results under " << out.string() << "\n";
    return kExitIo;
  }

  std::cout << args.className << "." << args.method << " " << modgen::modeName(config.mode)
            << " seed " << config.seed << ": " << rec.branchCovered << "/"
            << rec.branchTotal << " branches (" << modgen::fmt2(rec.coveragePct)
            << "%), " << rec.generations << " generations, " << rec.evaluations
            << " evaluations\n";
  for (const auto& d : res.diagnostics) std::cout << "note: " << d << "\n";
  std::cout << "results written to " << out.string() << "\n";
  return kExitOk;
}

int compareSubcommand(const CompareArgs& args) {
  modgen::CorpusLoadResult corpus = modgen::loadCorpus(args.corpusDir);
  if (!corpus.errors.empty()) {
    for (const auto& e : corpus.errors) std::cerr << "error: " << e << "\n";
    return kExitIo;
  }
  if (!corpus.diagnostics.empty()) {
    for (const auto& d : corpus.diagnostics) std::cerr << d << "\n";
    return kExitDiagnostics;
  }

  modgen::SearchConfig config;
  config.budgetSeconds = args.fullBudget ? 120.0 : args.budgetSeconds;

  modgen::ComparisonReport report =
      modgen::compareModes(corpus.entries, args.seeds, config, args.jobs);
  std::vector<std::string> written = modgen::emitReports(args.outDir, report);
  if (written.empty()) {
    std::cerr << "error: cannot write reports under " << args.outDir << "\n";
    return kExitIo;
  }

  for (const auto& agg : report.files)
    std::cout << agg.file << ": " << agg.branchTotal << " branches, strict "
              << modgen::fmt2(agg.strictPct) << "%, emote " << modgen::fmt2(agg.emotePct)
              << "%, delta " << modgen::fmt2(agg.deltaPct) << "pp\n";
  std::cout << "TOTAL: " << report.total.branchTotal << " branches, strict "
            << modgen::fmt2(report.total.strictPct) << "%, emote "
            << modgen::fmt2(report.total.emotePct) << "%, delta "
            << modgen::fmt2(report.total.deltaPct) << "pp\n";
  for (const auto& f : report.failures) std::cout << "flagged: " << f << "\n";
  std::cout << "reports written to " << args.outDir << "\n";
  return kExitOk;
}

int listSubcommand(const std::string& file) {
  std::optional<std::string> source = modgen::readTextFile(file);
  if (!source) {
    std::cerr << "error: cannot read " << file << "\n";
    return kExitIo;
  }
  modgen::CheckedProgram prog = modgen::analyzeProgram(*source);
  if (!prog.ok()) {
    for (const auto& d : prog.diagnostics) std::cerr << d.render(file) << "\n";
    return kExitDiagnostics;
  }
  int total = 0;
  for (const auto& cls : prog.program.classes) {
    for (const auto& m : cls.methods) {
      int branches = static_cast<int>(m.branchGoals.size());
      total += branches;
      std::cout << cls.name << "." << m.name << " " << branches << " branches\n";
    }
  }
  std::cout << "total " << total << " branches\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-based test generation for MiniOO classes"};
  app.require_subcommand(1);

  RunArgs runArgs;
  CLI::App* run = app.add_subcommand("run", "Evolve a test suite for one target method");
  run->add_option("--file", runArgs.file, "MiniOO source file")->required();
  run->add_option("--class", runArgs.className, "Target class")->required();
  run->add_option("--method", runArgs.method, "Target method")->required();
  run->add_option("--mode", runArgs.mode, "Cluster mode")
      ->check(CLI::IsMember({"whole", "strict", "emote"}));
  run->add_option("--budget-secs", runArgs.budgetSeconds, "Search budget in seconds");
  run->add_option("--seed", runArgs.seed, "Random seed (default: MODGEN_SEED or 1)");
  run->add_option("--attributed", runArgs.attributed,
                  "Attributed fitness for whole mode (strict/emote fix their own)")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_flag("--dump-trace", runArgs.dumpTrace, "Dump traces of the archived suite");
  run->add_flag("--full-budget", runArgs.fullBudget, "Raise the search budget to 120 seconds");
  run->add_option("--out", runArgs.outDir, "Output directory");

  CompareArgs cmpArgs;
  CLI::App* compare =
      app.add_subcommand("compare", "Compare strict and emote modes over a corpus");
  compare->add_option("--corpus", cmpArgs.corpusDir, "Corpus directory with corpus.json")
      ->required();
  compare->add_option("--seeds", cmpArgs.seeds, "Comma-separated seed list")
      ->delimiter(',');
  compare->add_option("--budget-secs", cmpArgs.budgetSeconds,
                      "Per-run search budget in seconds");
  compare->add_option("--jobs", cmpArgs.jobs, "Worker pool width")
      ->check(CLI::PositiveNumber);
  compare->add_flag("--full-budget", cmpArgs.fullBudget, "Raise the search budget to 120 seconds");
  compare->add_option("--out", cmpArgs.outDir, "Output directory");

  std::string listFile;
  CLI::App* list = app.add_subcommand("list", "List target methods and branch counts");
  list->add_option("--file", listFile, "MiniOO source file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitDiagnostics;
  }

  try {
    if (run->parsed()) return runSubcommand(runArgs);
    if (compare->parsed()) return compareSubcommand(cmpArgs);
    if (list->parsed()) return listSubcommand(listFile);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitDiagnostics;
}
