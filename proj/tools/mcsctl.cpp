// mcsctl — command-line driver for the multi-context system engine.
//
// Subcommands:
//   check FILE --mode weak|strong [--json]     exit 0 satisfied, 1 violated, 2 error
//   equilibria FILE [--limit N] [--json]
//   repair FILE [--max-size K] [--ops CTX:OP,...] [--mode weak|strong] [--json]
//   encode FILE --construction thm1|thm2 -o OUT
//   oracle FILE                                brute-force cross-checks
//
// The MCSCTL_LOG environment variable (quiet|info|debug) controls stderr
// chatter; results go to stdout, diagnostics to stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mcs/bruteforce.hpp"
#include "mcs/constraints.hpp"
#include "mcs/frontend.hpp"
#include "mcs/json_out.hpp"
#include "mcs/repair.hpp"

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("MCSCTL_LOG");
  if (!env) return LogLevel::Quiet;
  std::string v = env;
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  return LogLevel::Quiet;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[mcsctl] " << msg << "\n";
}

std::optional<mcs::Document> load(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream os;
  os << in.rdbuf();
  mcs::ParseResult r = mcs::parse(os.str());
  if (!r.ok()) {
    for (const auto& d : r.diagnostics) std::cerr << path << ":" << to_string(d) << "\n";
    return std::nullopt;
  }
  log_info("parsed " + path + " (" + std::to_string(r.document->mcs.size()) + " contexts, " +
           std::to_string(r.document->ics.size()) + " constraints)");
  return std::move(r.document);
}

void print_state(const mcs::MultiContextSystem& m, const mcs::BeliefState& s) {
  for (int i = 0; i < m.size(); ++i) {
    std::cout << "  " << m.contexts[static_cast<std::size_t>(i)].name << ": {";
    bool first = true;
    const mcs::BeliefSet& bs = s.perContext[static_cast<std::size_t>(i)];
    for (const mcs::Atom& a : bs.atoms) {
      if (!first) std::cout << ", ";
      std::cout << to_string(a);
      first = false;
    }
    for (const auto& t : bs.ordinary) {
      if (!first) std::cout << ", ";
      std::cout << t;
      first = false;
    }
    std::cout << "}\n";
  }
}

int run_check(const std::string& file, const std::string& mode, bool json) {
  auto doc = load(file);
  if (!doc) return 2;
  mcs::SatisfactionVerdict v = mode == "weak" ? mcs::weak_satisfies(doc->mcs, doc->ics)
                                              : mcs::strong_satisfies(doc->mcs, doc->ics);
  if (json) {
    std::cout << mcs::verdict_json(doc->mcs, v, mode).dump(2) << "\n";
  } else {
    std::cout << (v.inconsistent ? "inconsistent" : (v.holds ? "satisfied" : "violated"))
              << " (" << mode << ")\n";
    if (v.witness) {
      std::cout << (v.holds ? "witness equilibrium:\n" : "counterexample equilibrium:\n");
      print_state(doc->mcs, *v.witness);
    }
    if (v.violatedIc) std::cout << "violated constraint #" << *v.violatedIc << "\n";
  }
  return v.holds ? 0 : 1;
}

int run_equilibria(const std::string& file, std::optional<std::size_t> limit, bool json) {
  auto doc = load(file);
  if (!doc) return 2;
  mcs::EnumerationOptions opts;
  if (limit) opts.limit = *limit;
  std::vector<mcs::BeliefState> states = mcs::enumerate_equilibria(doc->mcs, opts);
  if (json) {
    std::cout << mcs::equilibria_json(doc->mcs, states).dump(2) << "\n";
  } else {
    std::cout << states.size() << " equilibria\n";
    for (std::size_t k = 0; k < states.size(); ++k) {
      std::cout << "#" << k << ":\n";
      print_state(doc->mcs, states[k]);
    }
  }
  return 0;
}

int run_repair(const std::string& file, std::size_t maxSize, const std::string& opsSpec,
               const std::string& mode, bool json) {
  auto doc = load(file);
  if (!doc) return 2;
  mcs::RepairOptions opts;
  opts.maxSize = maxSize;
  opts.mode = mode == "strong" ? mcs::RepairMode::Strong : mcs::RepairMode::Weak;
  if (!opsSpec.empty()) {
    std::map<int, std::set<std::string>> allowed;
    std::stringstream ss(opsSpec);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      auto colon = piece.find(':');
      if (colon == std::string::npos) {
        std::cerr << "error: --ops entries must look like CTX:OP, got '" << piece << "'\n";
        return 2;
      }
      std::string ctx = piece.substr(0, colon);
      auto it = doc->contextIndex.find(ctx);
      if (it == doc->contextIndex.end()) {
        std::cerr << "error: unknown context '" << ctx << "' in --ops\n";
        return 2;
      }
      allowed[it->second].insert(piece.substr(colon + 1));
    }
    opts.allowedOps = std::move(allowed);
  }
  mcs::RepairEnumeration res = mcs::enumerate_repairs(doc->mcs, doc->ics, opts);
  if (json) {
    std::cout << mcs::repairs_json(doc->mcs, res).dump(2) << "\n";
  } else {
    switch (res.status) {
      case mcs::RepairSearchStatus::AlreadyConsistent:
        std::cout << "already consistent; nothing to repair\n";
        break;
      case mcs::RepairSearchStatus::Complete:
        std::cout << res.repairs.size() << " minimal repair(s)\n";
        break;
      case mcs::RepairSearchStatus::NoneExist:
        std::cout << "no repair exists over the candidate universe\n";
        break;
      case mcs::RepairSearchStatus::BudgetExhausted:
        std::cout << "no repair of size <= " << maxSize << " (larger ones may exist)\n";
        break;
    }
    for (const auto& r : res.repairs) {
      std::cout << "  {";
      bool first = true;
      for (const auto& a : r.actions) {
        if (!first) std::cout << ", ";
        std::cout << doc->mcs.contexts[static_cast<std::size_t>(a.context)].name << ":"
                  << a.op << "(" << to_string(a.element) << ")";
        first = false;
      }
      std::cout << "}\n";
    }
  }
  const bool fixable = res.status == mcs::RepairSearchStatus::AlreadyConsistent ||
                       res.status == mcs::RepairSearchStatus::Complete;
  return fixable ? 0 : 1;
}

int run_encode(const std::string& file, const std::string& construction,
               const std::string& outPath) {
  auto doc = load(file);
  if (!doc) return 2;
  mcs::MultiContextSystem encoded = construction == "thm1"
                                        ? mcs::encode_weak(doc->mcs, doc->ics)
                                        : mcs::encode_strong(doc->mcs, doc->ics);
  std::ofstream out(outPath);
  if (!out.good()) {
    std::cerr << "error: cannot write '" << outPath << "'\n";
    return 2;
  }
  out << mcs::serialize(mcs::document_of(std::move(encoded)));
  log_info("wrote " + outPath);
  return 0;
}

int run_oracle(const std::string& file) {
  auto doc = load(file);
  if (!doc) return 2;
  int mismatches = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << name << ": " << (ok ? "ok" : "MISMATCH") << "\n";
    if (!ok) ++mismatches;
  };
  try {
    auto engine = mcs::enumerate_equilibria(doc->mcs);
    auto brute = mcs::oracle::brute_force_equilibria(doc->mcs);
    report("equilibria vs brute force",
           std::set<mcs::BeliefState>(engine.begin(), engine.end()) ==
               std::set<mcs::BeliefState>(brute.begin(), brute.end()));
    report("weak satisfaction vs brute force",
           mcs::weak_satisfies(doc->mcs, doc->ics).holds ==
               mcs::oracle::brute_force_weak(doc->mcs, doc->ics));
    report("strong satisfaction vs brute force",
           mcs::strong_satisfies(doc->mcs, doc->ics).holds ==
               mcs::oracle::brute_force_strong(doc->mcs, doc->ics));
    try {
      report("weak-flag construction",
             mcs::is_consistent(mcs::encode_weak(doc->mcs, doc->ics)).consistent ==
                 mcs::weak_satisfies(doc->mcs, doc->ics).holds);
      if (mcs::is_consistent(doc->mcs).consistent)
        report("strong-flag construction",
               mcs::strong_satisfies(doc->mcs, doc->ics).holds ==
                   !mcs::is_consistent(mcs::encode_strong(doc->mcs, doc->ics)).consistent);
    } catch (const mcs::CapabilityError& e) {
      std::cout << "flag constructions: skipped (" << e.what() << ")\n";
    }
  } catch (const mcs::CapabilityError& e) {
    std::cerr << "error: instance too large for the brute-force oracle: " << e.what()
              << "\n";
    return 2;
  }
  return mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-context system engine"};
  app.require_subcommand(1);

  std::string file, mode = "weak", opsSpec, construction, outPath;
  bool json = false;
  std::optional<std::size_t> limit;
  std::size_t maxSize = 2;

  auto* check = app.add_subcommand("check", "check constraint satisfaction");
  check->add_option("file", file)->required();
  check->add_option("--mode", mode)->check(CLI::IsMember({"weak", "strong"}))->required();
  check->add_flag("--json", json);

  auto* eq = app.add_subcommand("equilibria", "enumerate equilibria");
  eq->add_option("file", file)->required();
  eq->add_option("--limit", limit);
  eq->add_flag("--json", json);

  auto* rep = app.add_subcommand("repair", "enumerate minimal repairs");
  rep->add_option("file", file)->required();
  rep->add_option("--max-size", maxSize);
  rep->add_option("--ops", opsSpec);
  rep->add_option("--mode", mode)->check(CLI::IsMember({"weak", "strong"}));
  rep->add_flag("--json", json);

  auto* enc = app.add_subcommand("encode", "emit a flag-context consistency encoding");
  enc->add_option("file", file)->required();
  enc->add_option("--construction", construction)
      ->check(CLI::IsMember({"thm1", "thm2"}))
      ->required();
  enc->add_option("-o,--output", outPath)->required();

  auto* orc = app.add_subcommand("oracle", "run brute-force cross-checks");
  orc->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*check) return run_check(file, mode, json);
    if (*eq) return run_equilibria(file, limit, json);
    if (*rep) return run_repair(file, maxSize, opsSpec, mode, json);
    if (*enc) return run_encode(file, construction, outPath);
    if (*orc) return run_oracle(file);
  } catch (const mcs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
