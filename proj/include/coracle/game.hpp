#pragma once

// Protocol engine: drives learner/adversary rounds, enforces that every
// adversary function agrees with the whole history, optionally bounds the
// dimension of the revealed functions, and records transcripts.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coracle/hypothesis.hpp"
#include "coracle/littlestone.hpp"
#include "coracle/protocol.hpp"

namespace coracle {

enum class Validation { Consistency, Full };

// Dimension checks are exponential; they only run on at most this many
// distinct revealed functions.
inline constexpr std::size_t kLdimValidationMaxFunctions = 32;

inline std::string to_string(Validation v) {
  return v == Validation::Full ? "full" : "consistency";
}

inline Validation parse_validation(const std::string& s) {
  if (s == "full") return Validation::Full;
  if (s == "consistency") return Validation::Consistency;
  throw ParseError("validation level must be 'consistency' or 'full', got '" + s + "'");
}

struct GameConfig {
  std::optional<unsigned> d;  // declared dimension bound
  std::uint64_t round_cap = 1000;
  std::uint64_t seed = 0;
  Validation validation = Validation::Consistency;
  bool keep_functions = true;  // store revealed functions in the transcript
};

struct Round {
  std::uint64_t index = 0;
  Point x = 0;
  Bit y_hat = false;
  Bit y = false;
  bool mistake = false;
  std::string f_id;
  std::uint64_t vote_width = 0;
  std::size_t active_count = 0;
  // In-memory trace only; not persisted.
  std::vector<std::uint64_t> appended;
  std::vector<std::uint64_t> deleted;
};

struct TranscriptHeader {
  std::string learner;
  std::string adversary;
  std::optional<unsigned> d;
  std::uint64_t round_cap = 0;
  std::uint64_t seed = 0;
  Validation validation = Validation::Consistency;
};

struct Transcript {
  TranscriptHeader header;
  std::vector<Round> rounds;
  std::uint64_t mistake_count = 0;
  // Revealed functions, one per distinct id, in order of first use.
  std::vector<Hypothesis> functions;
};

enum class StopReason { AdversaryDone, LearnerHalted, RoundCapReached };

inline std::string to_string(StopReason s) {
  switch (s) {
    case StopReason::AdversaryDone: return "adversary-done";
    case StopReason::LearnerHalted: return "learner-halted";
    case StopReason::RoundCapReached: return "round-cap";
  }
  return "unknown";
}

struct GameResult {
  Transcript transcript;
  StopReason stop = StopReason::RoundCapReached;
};

/// Growing set of distinct revealed functions with a size-guarded check
/// that its dimension stays within the declared bound.
class RevealedSet {
 public:
  // Returns true if f was new.
  bool add(const Hypothesis& f) {
    auto& bucket = by_print_[f.fingerprint()];
    for (std::size_t i : bucket) {
      if (functions_[i] == f) return false;
    }
    bucket.push_back(functions_.size());
    functions_.push_back(f);
    return true;
  }

  [[nodiscard]] std::size_t size() const { return functions_.size(); }
  [[nodiscard]] bool guarded() const { return size() > kLdimValidationMaxFunctions; }
  [[nodiscard]] bool within(unsigned d) const {
    LdimSolver solver(functions_);
    return !solver.at_least(solver.all(), static_cast<int>(d) + 1);
  }

 private:
  std::vector<Hypothesis> functions_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_print_;
};

inline GameResult run_game(Learner& learner, Adversary& adversary,
                           const GameConfig& config) {
  if (config.round_cap < 1) throw PreconditionViolation("round cap must be at least 1");
  if (config.validation == Validation::Full && !config.d) {
    throw PreconditionViolation("full validation needs a dimension bound");
  }
  GameResult result;
  Transcript& t = result.transcript;
  t.header = {learner.name(), adversary.name(), config.d, config.round_cap,
              config.seed, config.validation};

  Sample history;
  RevealedSet revealed;
  std::unordered_map<std::string, bool> kept_ids;

  for (std::uint64_t r = 0;; ++r) {
    if (r == config.round_cap) {
      result.stop = StopReason::RoundCapReached;
      break;
    }
    if (learner.halted()) {
      result.stop = StopReason::LearnerHalted;
      break;
    }
    const std::optional<Point> x = adversary.next_point();
    if (!x) {
      result.stop = StopReason::AdversaryDone;
      break;
    }
    const Bit y_hat = learner.predict(*x);
    AdversaryAnswer answer = adversary.answer(*x, y_hat);
    history.push_back(*x, answer.y);
    if (!is_consistent(answer.f, history)) {
      throw IllegalAdversaryFunction("round " + std::to_string(r) + ": '" +
                                     answer.f.id() +
                                     "' disagrees with the label history");
    }
    if (config.validation == Validation::Full && revealed.add(answer.f) &&
        !revealed.guarded() && !revealed.within(*config.d)) {
      throw DimensionViolation("round " + std::to_string(r) + ": " +
                               std::to_string(revealed.size()) +
                               " revealed functions exceed dimension " +
                               std::to_string(*config.d));
    }

    learner.observe(*x, y_hat, answer.y, answer.f);
    RoundTrace trace = learner.last_trace();
    Round round;
    round.index = r;
    round.x = *x;
    round.y_hat = y_hat;
    round.y = answer.y;
    round.mistake = y_hat != answer.y;
    round.f_id = answer.f.id();
    round.vote_width = trace.vote_width;
    round.active_count = trace.active_count;
    round.appended = std::move(trace.appended);
    round.deleted = std::move(trace.deleted);
    if (round.mistake) ++t.mistake_count;
    if (config.keep_functions && kept_ids.emplace(answer.f.id(), true).second) {
      t.functions.push_back(answer.f);
    }
    t.rounds.push_back(std::move(round));
  }
  return result;
}

/// Pull-style view of an adversary for the recursive learner procedures.
/// Each revealed function is checked against the history and becomes the
/// answer of oracle(). Not copyable: oracle() refers back to this object.
class AdversaryRounds {
 public:
  AdversaryRounds(Adversary& adversary, std::uint64_t round_cap)
      : adversary_(adversary), cap_(round_cap) {}
  AdversaryRounds(const AdversaryRounds&) = delete;
  AdversaryRounds& operator=(const AdversaryRounds&) = delete;

  Point next_point() {
    if (rounds_ >= cap_) throw RoundsExhausted("round cap " + std::to_string(cap_) + " reached");
    auto x = adversary_.next_point();
    if (!x) throw RoundsExhausted(adversary_.name() + " has no more points");
    pending_ = *x;
    return *x;
  }

  Bit reveal(Bit y_hat) {
    if (!pending_) throw PreconditionViolation("reveal without a pending point");
    AdversaryAnswer answer = adversary_.answer(*pending_, y_hat);
    history_.push_back(*pending_, answer.y);
    pending_.reset();
    if (!is_consistent(answer.f, history_)) {
      throw IllegalAdversaryFunction("round " + std::to_string(rounds_) + ": '" +
                                     answer.f.id() + "' disagrees with the label history");
    }
    latest_ = std::move(answer.f);
    ++rounds_;
    if (answer.y != y_hat) ++mistakes_;
    return answer.y;
  }

  [[nodiscard]] ConsistentOracle oracle() {
    return [this](const Sample& s) {
      if (!latest_ || !is_consistent(*latest_, s)) {
        throw OracleFailure("no revealed function agrees with the sample");
      }
      return *latest_;
    };
  }

  [[nodiscard]] std::uint64_t rounds() const { return rounds_; }
  [[nodiscard]] std::uint64_t mistakes() const { return mistakes_; }
  [[nodiscard]] const Sample& history() const { return history_; }

 private:
  Adversary& adversary_;
  std::uint64_t cap_;
  std::optional<Point> pending_;
  std::optional<Hypothesis> latest_;
  Sample history_;
  std::uint64_t rounds_ = 0;
  std::uint64_t mistakes_ = 0;
};

// ---------------------------------------------------------------------------
// Transcript files: one JSON object per line. The first line is the header,
// function records precede the first round that names them, and round
// records carry exactly the per-round fields.

inline void write_transcript(std::ostream& os, const Transcript& t) {
  using nlohmann::ordered_json;
  ordered_json header;
  header["type"] = "header";
  header["learner"] = t.header.learner;
  header["adversary"] = t.header.adversary;
  header["d"] = t.header.d ? ordered_json(*t.header.d) : ordered_json(nullptr);
  header["round_cap"] = t.header.round_cap;
  header["seed"] = t.header.seed;
  header["validate"] = to_string(t.header.validation);
  os << header.dump() << '\n';

  std::unordered_map<std::string, const Hypothesis*> pending;
  for (const auto& f : t.functions) pending.emplace(f.id(), &f);

  for (const auto& r : t.rounds) {
    if (auto it = pending.find(r.f_id); it != pending.end()) {
      const Hypothesis& f = *it->second;
      ordered_json rec;
      rec["type"] = "function";
      rec["f_id"] = f.id();
      rec["domain"] = f.domain();
      rec["values"] = f.bits_over(f.domain());
      os << rec.dump() << '\n';
      pending.erase(it);
    }
    ordered_json rec;
    rec["round"] = r.index;
    rec["x"] = r.x;
    rec["y_hat"] = r.y_hat ? 1 : 0;
    rec["y"] = r.y ? 1 : 0;
    rec["mistake"] = r.mistake;
    rec["f_id"] = r.f_id;
    rec["vote_width"] = r.vote_width;
    rec["active_count"] = r.active_count;
    os << rec.dump() << '\n';
  }
}

inline std::string transcript_to_string(const Transcript& t) {
  std::ostringstream os;
  write_transcript(os, t);
  return os.str();
}

inline Transcript read_transcript(std::istream& is) {
  using nlohmann::json;
  Transcript t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      const std::string type = rec.value("type", "round");
      if (type == "header") {
        t.header.learner = rec.at("learner").get<std::string>();
        t.header.adversary = rec.at("adversary").get<std::string>();
        if (!rec.at("d").is_null()) t.header.d = rec.at("d").get<unsigned>();
        t.header.round_cap = rec.at("round_cap").get<std::uint64_t>();
        t.header.seed = rec.at("seed").get<std::uint64_t>();
        t.header.validation = parse_validation(rec.at("validate").get<std::string>());
        have_header = true;
      } else if (type == "function") {
        t.functions.emplace_back(rec.at("f_id").get<std::string>(),
                                 rec.at("domain").get<std::vector<Point>>(),
                                 rec.at("values").get<std::string>());
      } else if (type == "round") {
        Round r;
        r.index = rec.at("round").get<std::uint64_t>();
        r.x = rec.at("x").get<Point>();
        r.y_hat = rec.at("y_hat").get<int>() != 0;
        r.y = rec.at("y").get<int>() != 0;
        r.mistake = rec.at("mistake").get<bool>();
        r.f_id = rec.at("f_id").get<std::string>();
        r.vote_width = rec.at("vote_width").get<std::uint64_t>();
        r.active_count = rec.at("active_count").get<std::size_t>();
        if (r.mistake) ++t.mistake_count;
        t.rounds.push_back(std::move(r));
      } else {
        throw ParseError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("transcript line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InvalidHypothesis& e) {
      throw ParseError("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("transcript has no header record");
  return t;
}

struct ValidationReport {
  bool passed = true;
  std::optional<std::uint64_t> failed_round;
  std::string message;
  std::vector<std::string> notices;
};

/// Offline re-check of a stored transcript: per-round legality of the
/// adversary function, mistake flags and count, and (size-guarded) the
/// dimension of the revealed functions.
inline ValidationReport validate_transcript(const Transcript& t,
                                            std::optional<unsigned> d) {
  ValidationReport report;
  auto fail = [&](std::optional<std::uint64_t> round, std::string message) {
    report.passed = false;
    report.failed_round = round;
    report.message = std::move(message);
    return report;
  };

  std::unordered_map<std::string, const Hypothesis*> by_id;
  for (const auto& f : t.functions) by_id.emplace(f.id(), &f);

  Sample history;
  RevealedSet revealed;
  bool guard_noted = false;
  std::uint64_t mistakes = 0;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const Round& r = t.rounds[i];
    if (r.index != i) return fail(i, "round index " + std::to_string(r.index) + " out of sequence");
    if (r.mistake != (r.y_hat != r.y)) return fail(i, "mistake flag disagrees with y_hat and y");
    if (r.mistake) ++mistakes;
    history.push_back(r.x, r.y);
    auto it = by_id.find(r.f_id);
    if (it == by_id.end()) return fail(i, "function '" + r.f_id + "' is not recorded");
    if (!is_consistent(*it->second, history)) {
      return fail(i, "function '" + r.f_id + "' disagrees with the label history");
    }
    if (!d) continue;
    if (revealed.add(*it->second)) {
      if (revealed.guarded()) {
        if (!guard_noted) {
          report.notices.push_back(
              "SizeGuard: dimension check skipped from round " + std::to_string(i) +
              " on (" + std::to_string(revealed.size()) + " distinct functions > " +
              std::to_string(kLdimValidationMaxFunctions) + ")");
          guard_noted = true;
        }
      } else if (!revealed.within(*d)) {
        return fail(i, "revealed functions exceed dimension " + std::to_string(*d));
      }
    }
  }
  if (mistakes != t.mistake_count) {
    return fail(std::nullopt, "stored mistake count " + std::to_string(t.mistake_count) +
                                  " but rounds show " + std::to_string(mistakes));
  }
  return report;
}

}  // namespace coracle
