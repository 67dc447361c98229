#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modgen/typecheck.hpp"

// Benchmark corpus loading. A corpus directory holds MiniOO source files and
// a corpus.json manifest listing each file with the structural pattern it
// exercises. Targets are the non-constructor methods of every class in a
// file, in declaration order.

namespace modgen {

enum class CorpusPattern { StateInit, IndirectCallee, PublicField, StaticUtil, Plain };

inline const char* patternName(CorpusPattern p) {
  switch (p) {
    case CorpusPattern::StateInit: return "STATE_INIT";
    case CorpusPattern::IndirectCallee: return "INDIRECT_CALLEE";
    case CorpusPattern::PublicField: return "PUBLIC_FIELD";
    case CorpusPattern::StaticUtil: return "STATIC_UTIL";
    case CorpusPattern::Plain: return "PLAIN";
  }
  return "PLAIN";
}

inline bool parsePattern(const std::string& s, CorpusPattern& out) {
  for (CorpusPattern p : {CorpusPattern::StateInit, CorpusPattern::IndirectCallee,
                          CorpusPattern::PublicField, CorpusPattern::StaticUtil,
                          CorpusPattern::Plain}) {
    if (s == patternName(p)) {
      out = p;
      return true;
    }
  }
  return false;
}

struct TargetRef {
  std::string file;  // manifest-relative file name
  std::string className;
  std::string method;

  std::string qualified() const { return className + "." + method; }
  bool operator<(const TargetRef& o) const {
    return std::tie(file, className, method) < std::tie(o.file, o.className, o.method);
  }
  bool operator==(const TargetRef& o) const {
    return file == o.file && className == o.className && method == o.method;
  }
};

struct CorpusEntry {
  std::string file;
  CorpusPattern pattern = CorpusPattern::Plain;
  CheckedProgram checked;
  std::vector<TargetRef> targets;
};

struct CorpusLoadResult {
  std::vector<CorpusEntry> entries;
  std::vector<std::string> errors;       // I/O and manifest problems
  std::vector<std::string> diagnostics;  // rendered parse/type errors across files
  bool ok() const { return errors.empty() && diagnostics.empty(); }
};

inline std::optional<std::string> readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<TargetRef> enumerateTargets(const std::string& file,
                                               const Program& prog) {
  std::vector<TargetRef> out;
  for (const auto& cls : prog.classes)
    for (const auto& m : cls.methods)
      out.push_back({file, cls.name, m.name});
  return out;
}

inline CorpusLoadResult loadCorpus(const std::filesystem::path& dir) {
  CorpusLoadResult res;
  std::filesystem::path manifest = dir / "corpus.json";
  std::optional<std::string> text = readTextFile(manifest);
  if (!text) {
    res.errors.push_back("cannot read " + manifest.string());
    return res;
  }
  nlohmann::json doc = nlohmann::json::parse(*text, nullptr, false);
  if (doc.is_discarded() || !doc.contains("entries") || !doc["entries"].is_array()) {
    res.errors.push_back(manifest.string() + ": not a corpus manifest");
    return res;
  }
  for (const auto& item : doc["entries"]) {
    CorpusEntry entry;
    entry.file = item.value("file", "");
    std::string pat = item.value("pattern", "PLAIN");
    if (entry.file.empty() || !parsePattern(pat, entry.pattern)) {
      res.errors.push_back(manifest.string() + ": bad entry for \"" + entry.file + "\"");
      continue;
    }
    std::optional<std::string> source = readTextFile(dir / entry.file);
    if (!source) {
      res.errors.push_back("cannot read " + (dir / entry.file).string());
      continue;
    }
    entry.checked = analyzeProgram(*source);
    if (!entry.checked.ok()) {
      for (const auto& d : entry.checked.diagnostics)
        res.diagnostics.push_back(d.render(entry.file));
      continue;
    }
    entry.targets = enumerateTargets(entry.file, entry.checked.program);
    res.entries.push_back(std::move(entry));
  }
  return res;
}

inline int targetBranchTotal(const CheckedProgram& prog, const TargetRef& target) {
  const ClassDef* cls = prog.program.findClass(target.className);
  if (!cls) return 0;
  for (const auto& m : cls->methods)
    if (m.name == target.method)
      return static_cast<int>(m.branchGoals.size());
  return 0;
}

}  // namespace modgen
