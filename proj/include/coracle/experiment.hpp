#pragma once

// Experiment orchestration: learner/adversary selectors, class families,
// benchmark rows and the named verification suites.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "coracle/adversary.hpp"
#include "coracle/class_file.hpp"
#include "coracle/game.hpp"
#include "coracle/hypothesis.hpp"
#include "coracle/learner.hpp"
#include "coracle/littlestone.hpp"
#include "coracle/random.hpp"

namespace coracle {

namespace detail {

inline unsigned parse_uint(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used);
    if (used != text.size() || text.empty() || text[0] == '-') throw std::invalid_argument(text);
    return static_cast<unsigned>(v);
  } catch (const std::logic_error&) {
    throw ParseError("expected a non-negative integer for " + what + ", got '" + text + "'");
  }
}

inline std::pair<std::string, std::string> split_selector(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {s, ""};
  return {s.substr(0, colon), s.substr(colon + 1)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Selectors

struct LearnerSpec {
  enum class Kind { Predict, CreateAdvanced, Soa } kind = Kind::Predict;
  unsigned k = 0;
};

inline LearnerSpec parse_learner(const std::string& s) {
  auto [head, arg] = detail::split_selector(s);
  if (head == "predict" && arg.empty()) return {LearnerSpec::Kind::Predict, 0};
  if (head == "soa" && arg.empty()) return {LearnerSpec::Kind::Soa, 0};
  if (head == "create-adv") {
    return {LearnerSpec::Kind::CreateAdvanced, detail::parse_uint(arg, "create-adv level")};
  }
  throw ParseError("unknown learner '" + s + "' (predict | create-adv:<k> | soa)");
}

struct AdversarySpec {
  enum class Kind { Flood, Ternary, ClassGreedy, Free } kind = Kind::Free;
  unsigned d = 0;
  std::string class_path;
};

inline AdversarySpec parse_adversary(const std::string& s) {
  auto [head, arg] = detail::split_selector(s);
  if (head == "flood") return {AdversarySpec::Kind::Flood, detail::parse_uint(arg, "flood dimension"), {}};
  if (head == "ternary") {
    return {AdversarySpec::Kind::Ternary, detail::parse_uint(arg, "ternary dimension"), {}};
  }
  if (head == "class-greedy" && !arg.empty()) return {AdversarySpec::Kind::ClassGreedy, 0, arg};
  if (head == "free" && arg.empty()) return {AdversarySpec::Kind::Free, 0, {}};
  throw ParseError("unknown adversary '" + s +
                   "' (flood:<d> | ternary:<d> | class-greedy:<classfile> | free)");
}

inline std::unique_ptr<Learner> make_learner(const LearnerSpec& spec,
                                             const std::optional<HypothesisClass>& c) {
  switch (spec.kind) {
    case LearnerSpec::Kind::Predict:
      return make_predict_learner();
    case LearnerSpec::Kind::CreateAdvanced:
      return make_create_advanced_learner(spec.k);
    case LearnerSpec::Kind::Soa:
      if (!c) throw PreconditionViolation("the soa learner needs a class-greedy adversary's class");
      return std::make_unique<SoaLearner>(*c);
  }
  throw PreconditionViolation("unknown learner kind");
}

inline std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::uint64_t seed,
                                                 const std::optional<HypothesisClass>& c) {
  switch (spec.kind) {
    case AdversarySpec::Kind::Flood:
      return std::make_unique<FloodAdversary>(spec.d);
    case AdversarySpec::Kind::Ternary:
      return std::make_unique<TernaryAdversary>(spec.d);
    case AdversarySpec::Kind::ClassGreedy:
      if (!c) throw PreconditionViolation("class-greedy adversary needs a class");
      return std::make_unique<ClassGreedyAdversary>(*c, seed,
                                                    "class-greedy:" + spec.class_path);
    case AdversarySpec::Kind::Free:
      return std::make_unique<FreeAdversary>();
  }
  throw PreconditionViolation("unknown adversary kind");
}

// Dimension bound an adversary promises, if any.
inline std::optional<unsigned> declared_dimension(const AdversarySpec& spec,
                                                  const std::optional<HypothesisClass>& c) {
  switch (spec.kind) {
    case AdversarySpec::Kind::Flood:
    case AdversarySpec::Kind::Ternary:
      return spec.d;
    case AdversarySpec::Kind::ClassGreedy:
      return static_cast<unsigned>(ldim(*c));
    case AdversarySpec::Kind::Free:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Class families

inline std::vector<Point> iota_points(std::size_t n) {
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = i;
  return pts;
}

// The threshold x >= t on points 0..n-1, for t = 0..n.
inline Hypothesis threshold_function(std::size_t n, std::size_t t) {
  std::string bits(n, '0');
  for (std::size_t x = t; x < n; ++x) bits[x] = '1';
  return {"t" + std::to_string(t), iota_points(n), bits};
}

// Every class of thresholds on n points (every non-empty subset of the n + 1
// threshold functions) whose dimension is exactly `dimension`.
inline std::vector<HypothesisClass> threshold_classes(std::size_t n, int dimension) {
  std::vector<HypothesisClass> out;
  for (std::uint32_t mask = 1; mask < (1U << (n + 1)); ++mask) {
    std::vector<Hypothesis> hs;
    for (std::size_t t = 0; t <= n; ++t) {
      if ((mask >> t) & 1U) hs.push_back(threshold_function(n, t));
    }
    HypothesisClass c(iota_points(n), std::move(hs));
    if (ldim(c) == dimension) out.push_back(std::move(c));
  }
  return out;
}

// Random truth table with 1..max_hypotheses rows over points 0..m-1,
// 1 <= m <= max_points. Each bit is 1 with probability density_eighths / 8.
inline HypothesisClass random_class(Rng& rng, std::size_t max_hypotheses, std::size_t max_points,
                                    unsigned density_eighths = 4) {
  const std::size_t m = 1 + uniform_below(rng, max_points);
  const std::size_t n = 1 + uniform_below(rng, max_hypotheses);
  std::vector<std::string> rows(n, std::string(m, '0'));
  for (auto& row : rows) {
    for (auto& c : row) c = uniform_below(rng, 8) < density_eighths ? '1' : '0';
  }
  return HypothesisClass::from_rows(iota_points(m), rows);
}

// `count` random classes over exactly `points` points with dimension exactly
// `dimension`, alternating dense and sparse tables.
inline std::vector<HypothesisClass> random_classes_with_dimension(int dimension, std::size_t count,
                                                                  std::uint64_t seed,
                                                                  std::size_t points = 8,
                                                                  std::size_t max_hypotheses = 10) {
  Rng rng(seed);
  std::vector<HypothesisClass> out;
  for (std::uint64_t attempt = 0; out.size() < count; ++attempt) {
    const std::size_t n = 2 + uniform_below(rng, max_hypotheses - 1);
    const unsigned density = attempt % 2 == 0 ? 4 : 1;
    std::vector<std::string> rows(n, std::string(points, '0'));
    for (auto& row : rows) {
      for (auto& c : row) c = uniform_below(rng, 8) < density ? '1' : '0';
    }
    auto c = HypothesisClass::from_rows(iota_points(points), rows);
    if (ldim(c) == dimension) out.push_back(std::move(c));
  }
  return out;
}

// The family the upper-bound checks run over.
inline std::vector<HypothesisClass> upper_bound_family(unsigned d, std::uint64_t seed) {
  if (d == 1) {
    auto family = threshold_classes(8, 1);
    auto random = random_classes_with_dimension(1, 100, seed);
    family.insert(family.end(), random.begin(), random.end());
    return family;
  }
  if (d == 2) return random_classes_with_dimension(2, 30, seed, 8, 10);
  throw SizeLimitExceeded("upper-bound families exist for d = 1, 2 only");
}

// ---------------------------------------------------------------------------
// Verification suites

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  void add(std::string name, bool passed, std::string detail = {}) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  }
  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

inline void print_report(std::ostream& os, const VerifyReport& report) {
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
}

inline constexpr unsigned kVerifyMaxAdvancedLevel = 2;
inline constexpr unsigned kVerifyMaxPrefixLevel = 4;
inline constexpr unsigned kVerifyMaxLowerDimension = 6;

// Functions appended by CreateAdvanced(k) against the free adversary.
struct CreateAdvancedRun {
  GameResult game;
  std::vector<Hypothesis> active;
};

inline CreateAdvancedRun run_create_advanced_free(unsigned k) {
  auto learner = make_create_advanced_learner(k);
  FreeAdversary adversary;
  GameConfig config;
  config.round_cap = create_advanced_mistakes(k) + 16;
  config.keep_functions = false;
  CreateAdvancedRun run{run_game(*learner, adversary, config), learner->state().active.functions()};
  return run;
}

inline VerifyReport verify_advanced(unsigned k, std::uint64_t seed) {
  VerifyReport report;
  if (k > kVerifyMaxAdvancedLevel) {
    report.add("advanced:" + std::to_string(k), false,
               "size guard: levels above " + std::to_string(kVerifyMaxAdvancedLevel) +
                   " are not checked");
    return report;
  }
  const auto run = run_create_advanced_free(k);
  const auto& t = run.game.transcript;
  report.add("halts", run.game.stop == StopReason::LearnerHalted, to_string(run.game.stop));
  report.add("mistakes", t.mistake_count == create_advanced_mistakes(k),
             std::to_string(t.mistake_count) + " (expected " +
                 std::to_string(create_advanced_mistakes(k)) + ")");
  report.add("appended", run.active.size() == create_advanced_appended(k),
             std::to_string(run.active.size()) + " (expected " +
                 std::to_string(create_advanced_appended(k)) + ")");
  report.add("distinct", !has_duplicates(run.active));

  const Rational gamma{2 + static_cast<std::int64_t>(k), 2};
  const std::string gamma_text = k % 2 == 0 ? std::to_string(1 + k / 2)
                                            : std::to_string(1 + k / 2) + ".5";
  if (run.active.size() <= kExactAdvancedMaxSize) {
    const auto check = check_advanced(run.active, gamma, ExactSubsets{});
    report.add("gamma=" + gamma_text + " exact", check.advanced,
               std::to_string(check.subsets_checked) + " subsets");
  } else {
    const auto check = check_advanced(run.active, gamma, SampledSubsets{200, seed});
    report.add("gamma=" + gamma_text + " sampled", check.advanced,
               std::to_string(check.subsets_checked) + " subsets");
  }
  const int depth = required_dimension(run.active.size(), run.active.size(), gamma);
  const auto tree = find_shattered_tree(run.active, depth);
  report.add("certificate depth " + std::to_string(depth),
             tree.has_value() && is_shattered_by(*tree, run.active));
  return report;
}

inline VerifyReport verify_prefix(unsigned k) {
  VerifyReport report;
  if (k > kVerifyMaxPrefixLevel) {
    report.add("prefix:" + std::to_string(k), false,
               "size guard: levels above " + std::to_string(kVerifyMaxPrefixLevel) +
                   " are not checked");
    return report;
  }
  for (unsigned level = 0; level <= k; ++level) {
    const auto flat = flatten_create_advanced(level);
    const auto prefix = predict_schedule_prefix(flat.size());
    report.add("prefix " + std::to_string(flat.size()) + " = CreateAdvanced(" +
                   std::to_string(level) + ")",
               flat == prefix && flat.size() == create_advanced_mistakes(level));
  }
  return report;
}

// Orderings of 0..3^d-1 with out-of-range points mixed in.
inline std::vector<Point> informative_queries(unsigned d, Rng& rng) {
  const std::uint64_t n = pow3(d);
  std::vector<Point> q = iota_points(n);
  for (int i = 0; i < 3; ++i) q.push_back(n + uniform_below(rng, 2 * n));
  shuffle(q, rng);
  return q;
}

inline unsigned informative_worst_case(unsigned d, const std::vector<Bit>& labels,
                                       std::size_t orderings, std::uint64_t seed) {
  Rng rng(seed);
  unsigned worst = 0;
  for (std::uint64_t r = 0; r < pow3(d); ++r) {
    const Hypothesis target = ternary_function(r, d, labels);
    for (std::size_t o = 0; o < orderings; ++o) {
      InformativeLearner learner(d, labels);
      TargetAdversary adversary(target, informative_queries(d, rng));
      GameConfig config;
      config.round_cap = 1000;
      config.keep_functions = false;
      worst = std::max(worst, static_cast<unsigned>(
                                  run_game(learner, adversary, config).transcript.mistake_count));
    }
  }
  return worst;
}

inline VerifyReport verify_lower(unsigned d, std::uint64_t seed) {
  VerifyReport report;
  if (d < 1 || d > kVerifyMaxLowerDimension) {
    report.add("lower:" + std::to_string(d), false,
               "size guard: d must be in 1.." + std::to_string(kVerifyMaxLowerDimension));
    return report;
  }
  const std::uint64_t n3 = pow3(d);
  {
    auto learner = make_predict_learner();
    TernaryAdversary adversary(d);
    GameConfig config;
    config.d = d;
    config.round_cap = n3 + 10;
    config.validation = n3 <= kLdimValidationMaxFunctions ? Validation::Full : Validation::Consistency;
    const auto game = run_game(*learner, adversary, config);
    report.add("ternary mistakes", game.transcript.mistake_count == n3 && game.transcript.rounds.size() == n3,
               std::to_string(game.transcript.mistake_count) + " in " +
                   std::to_string(game.transcript.rounds.size()) + " rounds (expected " +
                   std::to_string(n3) + ")");
    report.add("ternary history consistency", validate_transcript(game.transcript, std::nullopt).passed);
    if (d <= 3) {
      const int dim = ldim(game.transcript.functions);
      report.add("ternary ldim", dim <= static_cast<int>(d), "ldim " + std::to_string(dim));
      const unsigned worst = informative_worst_case(d, adversary.labels(), 100, seed);
      report.add("informative learner", worst <= d,
                 "worst " + std::to_string(worst) + " mistakes over 100 orderings per f_r");
    }
  }
  {
    auto learner = make_predict_learner();
    FloodAdversary adversary(d);
    GameConfig config;
    config.round_cap = adversary.points() + 10;
    const auto game = run_game(*learner, adversary, config);
    report.add("flood mistakes", game.transcript.mistake_count == adversary.points(),
               std::to_string(game.transcript.mistake_count) + " (expected " +
                   std::to_string(adversary.points()) + ")");
    if (d <= 3) {
      const int dim = ldim(game.transcript.functions);
      report.add("flood ldim", dim <= static_cast<int>(d), "ldim " + std::to_string(dim));
    }
  }
  return report;
}

inline VerifyReport verify_upper(unsigned d, std::uint64_t seed) {
  VerifyReport report;
  if (d < 1 || d > 2) {
    report.add("upper:" + std::to_string(d), false, "size guard: d must be 1 or 2");
    return report;
  }
  const auto family = upper_bound_family(d, seed);
  const std::uint64_t bound = halting_budget(d) - 1;
  std::uint64_t worst_predict = 0;
  std::uint64_t worst_soa = 0;
  std::string error;
  for (std::size_t i = 0; i < family.size(); ++i) {
    GameConfig config;
    config.d = d;
    config.round_cap = 1000;
    config.validation = Validation::Full;
    try {
      auto learner = make_predict_learner();
      ClassGreedyAdversary adversary(family[i], seed + i);
      worst_predict = std::max(worst_predict, run_game(*learner, adversary, config).transcript.mistake_count);
      SoaLearner soa(family[i]);
      ClassGreedyAdversary again(family[i], seed + i);
      worst_soa = std::max(worst_soa, run_game(soa, again, config).transcript.mistake_count);
    } catch (const Error& e) {
      if (error.empty()) error = "class " + std::to_string(i) + ": " + e.what();
    }
  }
  report.add("family", !family.empty() && error.empty(),
             error.empty() ? std::to_string(family.size()) + " classes of ldim " + std::to_string(d)
                           : error);
  report.add("predict within bound", worst_predict <= bound,
             "max " + std::to_string(worst_predict) + " mistakes, bound " + std::to_string(bound));
  report.add("soa within ldim", worst_soa <= d, "max " + std::to_string(worst_soa) + " mistakes");
  return report;
}

inline VerifyReport verify_props(std::uint64_t seed, std::size_t classes = 200) {
  VerifyReport report;
  Rng rng(seed);
  bool size_ok = true, restriction_ok = true, certificate_ok = true, minimax_ok = true, soa_ok = true;
  std::size_t minimax_cases = 0;
  for (std::size_t i = 0; i < classes; ++i) {
    const HypothesisClass c = random_class(rng, 10, 8);
    const int dim = ldim(c);
    const auto distinct_count = distinct(c.hypotheses()).size();
    size_ok &= dim <= floor_log2(distinct_count);

    for (Point x : c.domain()) {
      std::vector<Hypothesis> zero, one;
      for (const auto& h : c.hypotheses()) (h(x) ? one : zero).push_back(h);
      if (!zero.empty() && !one.empty()) restriction_ok &= dim >= std::min(ldim(zero), ldim(one)) + 1;
    }

    if (dim >= 1) {
      const auto tree = find_shattered_tree(c, dim);
      certificate_ok &= tree.has_value() && is_shattered_by(*tree, c.hypotheses());
    }
    certificate_ok &= !find_shattered_tree(c, dim + 1).has_value();

    if (c.size() <= kMinimaxMaxHypotheses && c.domain().size() <= kMinimaxMaxPoints) {
      ++minimax_cases;
      minimax_ok &= minimax_adversary_value(c) == dim;
    }

    GameConfig config;
    config.round_cap = 100;
    SoaLearner vs_greedy(c);
    ClassGreedyAdversary greedy(c, seed + i);
    soa_ok &= run_game(vs_greedy, greedy, config).transcript.mistake_count <= static_cast<std::uint64_t>(dim);
    SoaLearner vs_random(c);
    ClassRandomAdversary random(c, seed + i);
    soa_ok &= run_game(vs_random, random, config).transcript.mistake_count <= static_cast<std::uint64_t>(dim);
  }
  const std::string n = std::to_string(classes) + " classes";
  report.add("ldim <= log2|H|", size_ok, n);
  report.add("restriction inequality", restriction_ok, n);
  report.add("certificates", certificate_ok, n);
  report.add("minimax = ldim", minimax_ok && minimax_cases > 0,
             std::to_string(minimax_cases) + " classes within the guard");
  report.add("soa <= ldim", soa_ok, "greedy and random adversaries");
  return report;
}

inline VerifyReport run_verify(const std::string& check, std::uint64_t seed) {
  auto [head, arg] = detail::split_selector(check);
  if (head == "props" && arg.empty()) return verify_props(seed);
  if (arg.empty()) throw ParseError("check '" + check + "' needs a parameter");
  const unsigned v = detail::parse_uint(arg, head);
  if (head == "advanced") return verify_advanced(v, seed);
  if (head == "prefix") return verify_prefix(v);
  if (head == "lower") return verify_lower(v, seed);
  if (head == "upper") return verify_upper(v, seed);
  throw ParseError("unknown check '" + check +
                   "' (advanced:<k> | prefix:<k> | lower:<d> | upper:<d> | props)");
}

// ---------------------------------------------------------------------------
// Benchmark table

struct BenchRow {
  unsigned d = 0;
  std::string learner;
  std::string adversary;
  std::uint64_t mistakes = 0;
  std::string bound_kind;  // "upper" or "lower"
  std::uint64_t bound = 0;
  double runtime_ms = 0;
  std::string status;  // "ok", "violated" or "error: ..."
};

struct BenchSpec {
  std::vector<unsigned> dimensions;
  std::vector<std::string> learners;     // predict | soa
  std::vector<std::string> adversaries;  // ternary | flood | class-greedy
  std::uint64_t seed = 0;
};

inline BenchRow bench_cell(unsigned d, const std::string& learner, const std::string& adversary,
                           std::uint64_t seed) {
  BenchRow row{d, learner, adversary, 0, "", 0, 0, "ok"};
  const auto start = std::chrono::steady_clock::now();
  try {
    if (adversary == "ternary" || adversary == "flood") {
      if (learner != "predict") throw PreconditionViolation(learner + " needs a class adversary");
      std::unique_ptr<Adversary> adv;
      if (adversary == "ternary") {
        if (d > kVerifyMaxLowerDimension) throw SizeLimitExceeded("ternary bench limited to d <= 6");
        adv = std::make_unique<TernaryAdversary>(d);
        row.bound = pow3(d);
      } else {
        if (d > 12) throw SizeLimitExceeded("flood bench limited to d <= 12");
        adv = std::make_unique<FloodAdversary>(d);
        row.bound = (std::uint64_t{2} << d) - 1;
      }
      row.bound_kind = "lower";
      auto l = make_predict_learner();
      GameConfig config;
      config.round_cap = row.bound + 10;
      config.keep_functions = false;
      row.mistakes = run_game(*l, *adv, config).transcript.mistake_count;
      if (row.mistakes < row.bound) row.status = "violated";
    } else if (adversary == "class-greedy") {
      if (learner != "predict" && learner != "soa") throw ParseError("unknown learner " + learner);
      row.bound_kind = "upper";
      row.bound = learner == "soa" ? d : halting_budget(d) - 1;
      const auto family = upper_bound_family(d, seed);
      for (std::size_t i = 0; i < family.size(); ++i) {
        GameConfig config;
        config.d = d;
        config.round_cap = 1000;
        ClassGreedyAdversary adv(family[i], seed + i);
        std::unique_ptr<Learner> l;
        if (learner == "soa") {
          l = std::make_unique<SoaLearner>(family[i]);
        } else {
          l = make_predict_learner();
        }
        row.mistakes = std::max(row.mistakes, run_game(*l, adv, config).transcript.mistake_count);
      }
      if (row.mistakes > row.bound) row.status = "violated";
    } else {
      throw ParseError("unknown bench adversary " + adversary);
    }
  } catch (const Error& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

inline std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  for (unsigned d : spec.dimensions) {
    for (const auto& adversary : spec.adversaries) {
      for (const auto& learner : spec.learners) {
        if (learner == "soa" && adversary != "class-greedy") continue;
        rows.push_back(bench_cell(d, learner, adversary, spec.seed));
      }
    }
  }
  return rows;
}

// Tab-separated with a header row. Without timing the runtime column is "-",
// which makes the table a pure function of its BenchSpec.
inline void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows, bool timing) {
  os << "d\tlearner\tadversary\tmistakes\tbound_kind\tbound\truntime_ms\tstatus\n";
  for (const auto& r : rows) {
    os << r.d << '\t' << r.learner << '\t' << r.adversary << '\t' << r.mistakes << '\t'
       << r.bound_kind << '\t' << r.bound << '\t';
    if (timing) {
      std::ostringstream ms;
      ms.setf(std::ios::fixed);
      ms.precision(3);
      ms << r.runtime_ms;
      os << ms.str();
    } else {
      os << '-';
    }
    os << '\t' << r.status << '\n';
  }
}

}  // namespace coracle
