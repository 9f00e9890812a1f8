// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Dimension claims are cross-checked with the brute-force oracles in
// oracles.hpp rather than with LdimSolver alone.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coracle/coracle.hpp"
#include "oracles.hpp"

using namespace coracle;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      detail = what;
    }
  }
};

// Every active list seen in any run, checked for repetitions at the end.
std::vector<std::vector<Hypothesis>> g_active_lists;

void remember_active(const MajorityVoteLearner& learner) {
  g_active_lists.push_back(learner.state().active.functions());
}

std::vector<Point> points_below(std::uint64_t n) {
  std::vector<Point> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

// Every revealed function of a transcript agrees with every earlier round,
// checked directly on the stored rows.
bool history_consistent(const Transcript& t) {
  std::map<std::string, const Hypothesis*> by_id;
  for (const auto& f : t.functions) by_id[f.id()] = &f;
  for (std::size_t r = 0; r < t.rounds.size(); ++r) {
    const auto it = by_id.find(t.rounds[r].f_id);
    if (it == by_id.end()) return false;
    for (std::size_t s = 0; s <= r; ++s) {
      if ((*it->second)(t.rounds[s].x) != t.rounds[s].y) return false;
    }
  }
  return true;
}

Outcome criterion1() {
  Outcome out;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 3; ++d) {
    auto learner = make_predict_learner();
    TernaryAdversary adversary(d);
    GameConfig config;
    config.round_cap = 1000;
    const auto game = run_game(*learner, adversary, config);
    remember_active(*learner);
    const auto& t = game.transcript;
    const std::uint64_t n = pow3(d);
    out.require(t.mistake_count == n && t.rounds.size() == n,
                "d=" + std::to_string(d) + ": " + std::to_string(t.mistake_count) +
                    " mistakes in " + std::to_string(t.rounds.size()) + " rounds");
    out.require(history_consistent(t), "d=" + std::to_string(d) + ": inconsistent f_r");
    // Revealed functions follow the digit-string rule exactly.
    std::vector<bool> labels(adversary.labels().begin(), adversary.labels().end());
    for (const auto& f : t.functions) {
      const std::uint64_t r = std::stoull(f.id().substr(1));
      for (Point x = 0; x < n + 2; ++x) {
        out.require(f(x) == oracle::reference_ternary(r, d, labels, x),
                    "f_" + std::to_string(r) + " differs from the reference at " +
                        std::to_string(x));
      }
    }
    detail << (d > 1 ? ", " : "") << "d=" << d << ": " << t.mistake_count << "/" << n;
  }
  if (out.passed) out.detail = detail.str() + " mistakes, all f_r consistent";
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 2; ++d) {
    TernaryAdversary adversary(d);
    auto learner = make_predict_learner();
    GameConfig config;
    const auto game = run_game(*learner, adversary, config);
    const int dim = oracle::brute_force_ldim(game.transcript.functions, points_below(pow3(d) + 1));
    out.require(dim <= static_cast<int>(d), "d=" + std::to_string(d) + ": brute-force ldim " +
                                                std::to_string(dim));
    detail << "brute-force ldim(d=" << d << ")=" << dim << "; ";
  }
  Rng label_rng(2);
  for (unsigned d = 1; d <= 3; ++d) {
    // The labels the adversary produced against Predict, plus random ones.
    std::vector<std::vector<Bit>> labelings;
    {
      TernaryAdversary adversary(d);
      auto learner = make_predict_learner();
      run_game(*learner, adversary, GameConfig{});
      labelings.push_back(adversary.labels());
    }
    for (int i = 0; i < 3; ++i) {
      std::vector<Bit> labels(pow3(d));
      for (auto&& b : labels) b = coin(label_rng);
      labelings.push_back(labels);
    }
    unsigned worst = 0;
    for (std::size_t i = 0; i < labelings.size(); ++i) {
      worst = std::max(worst, informative_worst_case(d, labelings[i], 100, 1000 * d + i));
    }
    out.require(worst <= d, "informative learner made " + std::to_string(worst) +
                                " mistakes at d=" + std::to_string(d));
    detail << "informative worst(d=" << d << ")=" << worst << (d < 3 ? ", " : "");
  }
  if (out.passed) out.detail = detail.str();
  return out;
}

Outcome criterion3() {
  Outcome out;
  std::ostringstream detail;
  for (unsigned d = 1; d <= 4; ++d) {
    auto learner = make_predict_learner();
    FloodAdversary adversary(d);
    GameConfig config;
    const auto game = run_game(*learner, adversary, config);
    remember_active(*learner);
    const std::uint64_t expected = (std::uint64_t{2} << d) - 1;
    out.require(game.transcript.mistake_count == expected,
                "d=" + std::to_string(d) + ": " + std::to_string(game.transcript.mistake_count) +
                    " mistakes");
    out.require(history_consistent(game.transcript), "inconsistent flood function");
    detail << (d > 1 ? ", " : "") << game.transcript.mistake_count;
    if (d <= 3) {
      const int dim =
          oracle::brute_force_ldim(game.transcript.functions, points_below(expected));
      out.require(dim <= static_cast<int>(d),
                  "d=" + std::to_string(d) + ": brute-force ldim " + std::to_string(dim));
      detail << " (ldim " << dim << ")";
    }
  }
  if (out.passed) out.detail = "mistakes " + detail.str();
  return out;
}

Outcome criterion4() {
  Outcome out;
  const auto family = upper_bound_family(1, 0);
  const std::uint64_t bound = halting_budget(1) - 1;
  std::uint64_t worst_predict = 0, worst_soa = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& c = family[i];
    out.require(oracle::brute_force_ldim(c.hypotheses(), c.domain()) == 1,
                "class " + std::to_string(i) + " does not have dimension 1");
    GameConfig config;
    config.d = 1;
    config.round_cap = 1000;
    config.validation = Validation::Full;
    auto learner = make_predict_learner();
    ClassGreedyAdversary greedy(c, i);
    worst_predict = std::max(worst_predict, run_game(*learner, greedy, config).transcript.mistake_count);
    remember_active(*learner);
    SoaLearner soa(c);
    ClassGreedyAdversary again(c, i);
    worst_soa = std::max(worst_soa, run_game(soa, again, config).transcript.mistake_count);
  }
  out.require(family.size() == 220, "family has " + std::to_string(family.size()) + " classes");
  out.require(worst_predict <= bound, "predict made " + std::to_string(worst_predict));
  out.require(worst_soa <= 1, "soa made " + std::to_string(worst_soa));
  if (out.passed) {
    out.detail = std::to_string(family.size()) + " classes; predict max " +
                 std::to_string(worst_predict) + " <= " + std::to_string(bound) +
                 ", soa max " + std::to_string(worst_soa) + " <= 1";
  }
  return out;
}

// Functions appended by CreateAdvanced(0) and (1), for criterion 6.
std::vector<Hypothesis> g_advanced0, g_advanced1;

Outcome criterion5() {
  Outcome out;
  const std::uint64_t mistakes[] = {16, 272, 4368};
  const std::uint64_t appended[] = {16, 128, 1024};
  for (unsigned k = 0; k <= 2; ++k) {
    const std::string tag = "k=" + std::to_string(k) + ": ";
    // Recursive procedures pulling rounds from the adversary.
    FreeAdversary free_recursive;
    AdversaryRounds rounds(free_recursive, 1'000'000);
    LearnerState state;
    state.oracle = rounds.oracle();
    create_advanced(state, k, rounds);
    out.require(rounds.rounds() == mistakes[k] && rounds.mistakes() == mistakes[k] &&
                    state.mistake_count() == mistakes[k],
                tag + "recursive run took " + std::to_string(rounds.rounds()) + " rounds");
    out.require(state.active.size() == appended[k],
                tag + "recursive run kept " + std::to_string(state.active.size()));
    out.require(!has_duplicates(state.active.functions()), tag + "repeated active function");
    g_active_lists.push_back(state.active.functions());

    // The same procedure through the game engine.
    auto learner = make_create_advanced_learner(k);
    FreeAdversary free_engine;
    GameConfig config;
    config.round_cap = mistakes[k] + 100;
    config.keep_functions = false;
    const auto game = run_game(*learner, free_engine, config);
    remember_active(*learner);
    out.require(game.stop == StopReason::LearnerHalted, tag + "engine run did not halt");
    out.require(game.transcript.mistake_count == mistakes[k] &&
                    game.transcript.rounds.size() == mistakes[k],
                tag + "engine run made " + std::to_string(game.transcript.mistake_count));
    const auto active = learner->state().active.functions();
    out.require(active.size() == appended[k], tag + "engine kept " + std::to_string(active.size()));
    out.require(active == state.active.functions(), tag + "engine and recursion disagree");
    if (k == 0) g_advanced0 = active;
    if (k == 1) g_advanced1 = active;
  }
  if (out.passed) out.detail = "16/16, 272/128, 4368/1024 (mistakes/appended), recursion = engine";
  return out;
}

Outcome criterion6() {
  Outcome out;
  out.require(g_advanced0.size() == 16 && g_advanced1.size() == 128, "criterion 5 inputs missing");
  if (!out.passed) return out;

  const auto exact = check_advanced(g_advanced0, {1, 1}, ExactSubsets{});
  out.require(exact.advanced && exact.subsets_checked == 65535,
              "16 functions not 1-advanced after " + std::to_string(exact.subsets_checked));

  const auto tree = find_shattered_tree(g_advanced1, 2);
  std::vector<Point> labels;
  if (tree) {
    for (std::size_t i = 0; i < tree->internal_nodes(); ++i) labels.push_back(tree->label(i));
  }
  out.require(tree && oracle::tree_is_shattered(labels, 2, g_advanced1),
              "no verified depth-2 certificate for the 128 functions");

  // The rational threshold agrees with a floating-point reading of
  // 1.5 + log16(a/128) away from exact integer boundaries.
  for (std::size_t a = 1; a <= 128; ++a) {
    const double need = 1.5 + std::log2(static_cast<double>(a) / 128.0) / 4.0;
    const int expected = std::max(0, static_cast<int>(std::ceil(need - 1e-9)));
    out.require(required_dimension(a, 128, {3, 2}) == expected,
                "threshold mismatch at |A|=" + std::to_string(a));
  }
  const auto sampled = check_advanced(g_advanced1, {3, 2}, SampledSubsets{200, 6});
  out.require(sampled.advanced && sampled.subsets_checked == 201,
              "sampled gamma=1.5 check failed after " + std::to_string(sampled.subsets_checked));
  if (out.passed) {
    out.detail = "65535 subsets at gamma=1; depth-2 certificate; 200 sampled subsets (+ full set) at gamma=1.5";
  }
  return out;
}

// Algorithm schedules written out independently of the library.
std::vector<unsigned> reference_predict_prefix(std::size_t length) {
  std::vector<unsigned> out;
  for (std::uint64_t n = 1; out.size() < length; ++n) {
    out.push_back(0);
    std::uint64_t m = n;
    for (unsigned i = 1; m % 16 == 0 && out.size() < length; ++i, m /= 16) out.push_back(3 * i + 1);
  }
  out.resize(length);
  return out;
}

void reference_flatten(unsigned k, std::vector<unsigned>& out) {
  for (int i = 0; i < 16; ++i) {
    if (k == 0) {
      out.push_back(0);
    } else {
      reference_flatten(k - 1, out);
      out.push_back(3 * k + 1);
    }
  }
}

Outcome criterion7() {
  Outcome out;
  const std::size_t lengths[] = {16, 272, 4368, 69904};
  for (unsigned k = 0; k <= 3; ++k) {
    std::vector<unsigned> reference;
    reference_flatten(k, reference);
    const auto flat = flatten_create_advanced(k);
    const auto prefix = predict_schedule_prefix(lengths[k]);
    out.require(reference.size() == lengths[k] && flat == reference,
                "flattening of CreateAdvanced(" + std::to_string(k) + ") is off");
    out.require(prefix == reference && reference_predict_prefix(lengths[k]) == reference,
                "Predict prefix of length " + std::to_string(lengths[k]) + " differs");
  }
  if (out.passed) out.detail = "prefixes 16, 272, 4368, 69904 match CreateAdvanced(0..3)";
  return out;
}

Outcome criterion8() {
  Outcome out;
  Rng rng(8);
  std::size_t minimax_cases = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = random_class(rng, 10, 8);
    const std::string tag = "class " + std::to_string(i) + ": ";
    const int dim = ldim(c);
    out.require(dim == oracle::brute_force_ldim(c.hypotheses(), c.domain()),
                tag + "solver disagrees with brute force");
    out.require(dim <= floor_log2(distinct(c.hypotheses()).size()), tag + "ldim above log2|H|");
    for (Point x : c.domain()) {
      std::vector<Hypothesis> side[2];
      for (const auto& h : c.hypotheses()) side[h(x) ? 1 : 0].push_back(h);
      if (side[0].empty() || side[1].empty()) continue;
      out.require(dim >= std::min(ldim(side[0]), ldim(side[1])) + 1,
                  tag + "restriction inequality fails at " + std::to_string(x));
    }
    if (c.size() <= kMinimaxMaxHypotheses && c.domain().size() <= kMinimaxMaxPoints) {
      ++minimax_cases;
      out.require(minimax_adversary_value(c) == dim, tag + "minimax differs from ldim");
    }
    GameConfig config;
    config.round_cap = 100;
    SoaLearner vs_greedy(c);
    ClassGreedyAdversary greedy(c, 100 + i);
    SoaLearner vs_random(c);
    ClassRandomAdversary random(c, 100 + i);
    const auto g = run_game(vs_greedy, greedy, config).transcript.mistake_count;
    const auto r = run_game(vs_random, random, config).transcript.mistake_count;
    out.require(g <= static_cast<std::uint64_t>(dim) && r <= static_cast<std::uint64_t>(dim),
                tag + "soa exceeded ldim");
  }
  out.require(minimax_cases > 0, "no class fell within the minimax guard");
  if (out.passed) {
    out.detail = "200 classes; minimax checked on " + std::to_string(minimax_cases);
  }
  return out;
}

class CorruptedAdversary final : public Adversary {
 public:
  [[nodiscard]] std::string name() const override { return "corrupted"; }
  std::optional<Point> next_point() override { return r_; }
  AdversaryAnswer answer(Point x, Bit y_hat) override {
    history_.push_back(x, !y_hat);
    if (r_++ == 5) return {!y_hat, Hypothesis("liar", {x}, std::vector<Bit>{y_hat})};
    return {!y_hat, minimal_extension_oracle(history_)};
  }

 private:
  std::uint64_t r_ = 0;
  Sample history_;
};

std::string seeded_transcript(std::uint64_t seed) {
  Rng rng(seed);
  const auto c = random_classes_with_dimension(2, 1, seed)[0];
  auto learner = make_predict_learner();
  ClassGreedyAdversary adversary(c, seed);
  GameConfig config;
  config.seed = seed;
  config.d = 2;
  config.round_cap = 300;
  config.validation = Validation::Full;
  return transcript_to_string(run_game(*learner, adversary, config).transcript);
}

Outcome criterion9() {
  Outcome out;
  std::size_t checked = 0;
  for (const auto& list : g_active_lists) {
    out.require(!has_duplicates(list), "an active list repeats a function");
    ++checked;
  }
  out.require(checked > 0, "no active lists recorded");

  bool rejected = false;
  try {
    auto learner = make_predict_learner();
    CorruptedAdversary adversary;
    run_game(*learner, adversary, GameConfig{});
  } catch (const IllegalAdversaryFunction&) {
    rejected = true;
  }
  out.require(rejected, "corrupted adversary was not rejected");

  for (std::uint64_t seed : {1, 2, 3}) {
    out.require(seeded_transcript(seed) == seeded_transcript(seed),
                "seed " + std::to_string(seed) + " is not reproducible");
  }
  out.require(seeded_transcript(1) != seeded_transcript(2), "seed has no effect");
  {
    auto learner = make_predict_learner();
    TernaryAdversary a(3);
    auto learner2 = make_predict_learner();
    TernaryAdversary b(3);
    out.require(transcript_to_string(run_game(*learner, a, GameConfig{}).transcript) ==
                    transcript_to_string(run_game(*learner2, b, GameConfig{}).transcript),
                "ternary transcripts differ");
  }
  if (out.passed) {
    out.detail = std::to_string(checked) +
                 " active lists repetition-free; corrupted adversary rejected; transcripts reproducible";
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                       criterion4, criterion5, criterion6,
                                                       criterion7, criterion8, criterion9};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << o.detail
              << " [" << timing << "]" << std::endl;
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
