// coracle: simulate games, compute Littlestone dimensions, run verification
// suites and benchmark tables.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coracle/coracle.hpp"

namespace {

using namespace coracle;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "1-4" or "1,3".
std::vector<unsigned> parse_dimensions(const std::string& s) {
  std::vector<unsigned> out;
  for (const auto& part : split_list(s)) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(detail::parse_uint(part, "d"));
      continue;
    }
    const unsigned lo = detail::parse_uint(part.substr(0, dash), "d range");
    const unsigned hi = detail::parse_uint(part.substr(dash + 1), "d range");
    for (unsigned d = lo; d <= hi; ++d) out.push_back(d);
  }
  if (out.empty()) throw ParseError("empty dimension list");
  return out;
}

struct SimulateOptions {
  std::string learner = "predict";
  std::string adversary;
  std::uint64_t cap = 1000;
  std::uint64_t seed = 0;
  std::string validate = "consistency";
  std::optional<unsigned> d;
  std::string out;
  unsigned repeat = 1;
};

int cmd_simulate(const SimulateOptions& o) {
  const LearnerSpec learner_spec = parse_learner(o.learner);
  const AdversarySpec adversary_spec = parse_adversary(o.adversary);
  std::optional<HypothesisClass> cls;
  if (adversary_spec.kind == AdversarySpec::Kind::ClassGreedy) {
    cls = read_class_file(adversary_spec.class_path);
  }
  GameConfig config;
  config.round_cap = o.cap;
  config.seed = o.seed;
  config.validation = parse_validation(o.validate);
  config.d = o.d ? o.d : declared_dimension(adversary_spec, cls);

  // Repetitions differ only in the seed: seed, seed + 1, ...
  for (unsigned rep = 0; rep < o.repeat; ++rep) {
    config.seed = o.seed + rep;
    auto learner = make_learner(learner_spec, cls);
    auto adversary = make_adversary(adversary_spec, config.seed, cls);
    const GameResult result = run_game(*learner, *adversary, config);

    if (!o.out.empty()) {
      const std::string path = o.repeat == 1 ? o.out : o.out + "." + std::to_string(rep);
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ParseError("cannot write transcript " + path);
      write_transcript(out, result.transcript);
    }
    if (o.repeat > 1) std::cout << "seed=" << config.seed << ' ';
    std::cout << "mistakes=" << result.transcript.mistake_count
              << " rounds=" << result.transcript.rounds.size()
              << " stop=" << to_string(result.stop) << " validation=pass ("
              << to_string(config.validation) << ")\n";
  }
  return 0;
}

int cmd_ldim(const std::string& path, bool certificate) {
  const HypothesisClass c = read_class_file(path);
  const int dim = ldim(c);
  std::cout << "ldim=" << dim << '\n';
  if (certificate && dim >= 1) {
    const auto tree = find_shattered_tree(c, dim);
    if (!tree || !is_shattered_by(*tree, c.hypotheses())) {
      std::cerr << "error: certificate search failed\n";
      return 1;
    }
    std::cout << "certificate (depth " << tree->depth() << "):\n" << tree->to_string();
  }
  return 0;
}

int cmd_verify(const std::string& check, std::uint64_t seed) {
  const VerifyReport report = run_verify(check, seed);
  print_report(std::cout, report);
  std::cout << (report.passed() ? "verify " + check + ": pass\n" : "verify " + check + ": FAIL\n");
  return report.passed() ? 0 : 1;
}

int cmd_validate(const std::string& path, std::optional<unsigned> d) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read transcript " + path);
  const Transcript t = read_transcript(in);
  const ValidationReport report = validate_transcript(t, d ? d : t.header.d);
  for (const auto& n : report.notices) std::cout << n << '\n';
  if (report.passed) {
    std::cout << "pass: " << t.rounds.size() << " rounds, " << t.mistake_count << " mistakes\n";
    return 0;
  }
  std::cout << "fail";
  if (report.failed_round) std::cout << " at round " << *report.failed_round;
  std::cout << ": " << report.message << '\n';
  return 1;
}

int cmd_bench(const std::string& dims, const std::string& learners, const std::string& adversaries,
              std::uint64_t seed, const std::string& out, bool timing) {
  BenchSpec spec{parse_dimensions(dims), split_list(learners), split_list(adversaries), seed};
  const auto rows = run_bench(spec);
  if (out.empty()) {
    write_bench_table(std::cout, rows, timing);
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw ParseError("cannot write table " + out);
    write_bench_table(file, rows, timing);
    std::cout << "wrote " << rows.size() << " rows to " << out << '\n';
  }
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.status == "ok"; });
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with a consistent oracle: games, dimensions, checks"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Play one learner against one adversary");
  simulate->add_option("--learner", sim.learner, "predict | create-adv:<k> | soa");
  simulate->add_option("--adversary", sim.adversary, "flood:<d> | ternary:<d> | class-greedy:<file> | free")
      ->required();
  simulate->add_option("--cap", sim.cap, "Maximum number of rounds")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Seed for randomized components");
  simulate->add_option("--validate", sim.validate, "consistency | full")
      ->check(CLI::IsMember({"consistency", "full"}));
  simulate->add_option("--d", sim.d, "Declared dimension bound (default: the adversary's)");
  simulate->add_option("--out", sim.out, "Transcript file (JSON lines)");
  simulate->add_option("--repeat", sim.repeat, "Games to play, with seeds seed, seed + 1, ...")
      ->check(CLI::PositiveNumber);

  std::string class_path;
  bool certificate = false;
  auto* ldim_cmd = app.add_subcommand("ldim", "Exact Littlestone dimension of a class file");
  ldim_cmd->add_option("classfile", class_path)->required();
  ldim_cmd->add_flag("--certificate", certificate, "Print a shattered tree of that depth");

  std::string check;
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("check", check, "advanced:<k> | prefix:<k> | lower:<d> | upper:<d> | props")
      ->required();
  verify->add_option("--seed", verify_seed);

  std::string transcript_path;
  std::optional<unsigned> validate_d;
  auto* validate = app.add_subcommand("validate", "Re-check a stored transcript");
  validate->add_option("transcript", transcript_path)->required();
  validate->add_option("--d", validate_d, "Dimension bound (default: from the header)");

  std::string bench_dims = "1-2";
  std::string bench_learners = "predict,soa";
  std::string bench_adversaries = "ternary,flood,class-greedy";
  std::string bench_out;
  std::uint64_t bench_seed = 1;
  bool no_timing = false;
  auto* bench = app.add_subcommand("bench", "Mistake counts against theoretical bounds");
  bench->add_option("--d", bench_dims, "Dimensions, e.g. 1-4 or 1,2");
  bench->add_option("--learners", bench_learners, "Comma-separated: predict, soa");
  bench->add_option("--adversaries", bench_adversaries, "Comma-separated: ternary, flood, class-greedy");
  bench->add_option("--seed", bench_seed, "Seed for the class families");
  bench->add_option("--out", bench_out, "Table file (tab-separated)");
  bench->add_flag("--no-timing", no_timing, "Write '-' instead of runtimes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*ldim_cmd) return cmd_ldim(class_path, certificate);
    if (*verify) return cmd_verify(check, verify_seed);
    if (*validate) return cmd_validate(transcript_path, validate_d);
    if (*bench) {
      return cmd_bench(bench_dims, bench_learners, bench_adversaries, bench_seed, bench_out, !no_timing);
    }
  } catch (const coracle::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
