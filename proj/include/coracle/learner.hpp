#pragma once

// Majority-vote learner that reaches the class only through a consistent
// oracle. Predictions are majority votes over the most recent active
// functions; after a mistake the learner either asks the oracle for a new
// active function (width 1 or too few functions) or halves the voting window,
// keeping voters that agreed with its wrong prediction.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "coracle/hypothesis.hpp"
#include "coracle/littlestone.hpp"
#include "coracle/protocol.hpp"
#include "coracle/random.hpp"

namespace coracle {

// Widths are 2^k voters; this keeps 2^k representable.
inline constexpr unsigned kMaxVoteExponent = 62;

inline std::uint64_t vote_width(unsigned k) {
  if (k > kMaxVoteExponent) {
    throw PreconditionViolation("vote exponent " + std::to_string(k) +
                                " is too large");
  }
  return std::uint64_t{1} << k;
}

/// Ordered, repetition-free list g_0 ... g_{L-1} of oracle answers. Functions
/// are appended at the end; deletions keep the relative order of the rest.
/// Every appended function gets a serial number for tracing.
class ActiveList {
 public:
  struct Entry {
    std::uint64_t serial;
    Hypothesis f;
  };

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] const Hypothesis& operator[](std::size_t i) const {
    return entries_[i].f;
  }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

  [[nodiscard]] std::vector<Hypothesis> functions() const {
    std::vector<Hypothesis> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.f);
    return out;
  }

  // Throws ActiveListRepetition if an extensionally equal function is
  // already active.
  std::uint64_t append(Hypothesis f) {
    for (const auto& e : entries_) {
      if (e.f.fingerprint() == f.fingerprint() && e.f == f) {
        throw ActiveListRepetition("oracle answer '" + f.id() +
                                   "' equals active function #" +
                                   std::to_string(e.serial));
      }
    }
    const std::uint64_t serial = next_serial_++;
    entries_.push_back({serial, std::move(f)});
    return serial;
  }

  // Removes the entries at the given ascending positions; returns their
  // serials.
  std::vector<std::uint64_t> erase(const std::vector<std::size_t>& positions) {
    std::vector<std::uint64_t> serials;
    std::vector<Entry> kept;
    kept.reserve(entries_.size() - positions.size());
    auto next = positions.begin();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (next != positions.end() && *next == i) {
        serials.push_back(entries_[i].serial);
        ++next;
      } else {
        kept.push_back(std::move(entries_[i]));
      }
    }
    entries_ = std::move(kept);
    return serials;
  }

 private:
  std::vector<Entry> entries_;
  std::uint64_t next_serial_ = 0;
};

struct LearnerState {
  ActiveList active;
  Sample mistakes;  // one pair per mistake, in order
  ConsistentOracle oracle;

  [[nodiscard]] std::size_t mistake_count() const { return mistakes.size(); }
};

struct Vote {
  Bit y_hat = false;
  std::uint64_t width = 0;  // 0 when there were too few functions to vote
};

// Majority of the last 2^k active functions at x; ties predict 1. With fewer
// than 2^k active functions the prediction is 0.
inline Vote majority_vote(const ActiveList& active, unsigned k, Point x) {
  const std::uint64_t width = vote_width(k);
  if (active.size() < width) return {false, 0};
  std::uint64_t ones = 0;
  for (std::size_t i = active.size() - width; i < active.size(); ++i) {
    ones += active[i](x) ? 1 : 0;
  }
  return {2 * ones >= width, width};
}

struct MistakeEffect {
  std::vector<std::uint64_t> appended;
  std::vector<std::uint64_t> deleted;
};

/// Bookkeeping after a mistake at x (prediction y_hat, true label y) made
/// with vote exponent k.
inline MistakeEffect record_mistake(LearnerState& state, unsigned k, Point x,
                                    Bit y_hat, Bit y) {
  if (y == y_hat) throw PreconditionViolation("record_mistake without a mistake");
  const std::uint64_t width = vote_width(k);
  state.mistakes.push_back(x, y);
  MistakeEffect effect;

  if (k == 0 || state.active.size() < width) {
    Hypothesis g;
    try {
      g = state.oracle(state.mistakes);
    } catch (const NonRealizable& e) {
      throw OracleFailure(e.what());
    }
    if (!is_consistent(g, state.mistakes)) {
      throw OracleFailure("oracle answer '" + g.id() +
                          "' disagrees with the mistake sample");
    }
    effect.appended.push_back(state.active.append(std::move(g)));
    return effect;
  }

  // Keep the earliest 2^(k-1) voters that agreed with y_hat.
  const std::size_t begin = state.active.size() - width;
  const std::uint64_t half = width / 2;
  std::vector<std::size_t> doomed;
  std::uint64_t kept = 0;
  for (std::size_t i = begin; i < state.active.size(); ++i) {
    if (kept < half && state.active[i](x) == y_hat) {
      ++kept;
    } else {
      doomed.push_back(i);
    }
  }
  if (kept < half) {
    throw InsufficientAgreement(std::to_string(kept) + " of " +
                                std::to_string(width) +
                                " voters agree with the prediction");
  }
  effect.deleted = state.active.erase(doomed);
  return effect;
}

// ---------------------------------------------------------------------------
// Recursive procedures over a pull-style round source

// next_point() yields the adversary's x; reveal(y_hat) returns the true label.
template <typename R>
concept RoundSource = requires(R& r, Bit b) {
  { r.next_point() } -> std::convertible_to<Point>;
  { r.reveal(b) } -> std::convertible_to<Bit>;
};

// Plays rounds until exactly one mistake, then updates the state.
template <RoundSource R>
void vote_and_update(LearnerState& state, unsigned k, R& rounds) {
  for (;;) {
    const Point x = rounds.next_point();
    const Vote v = majority_vote(state.active, k, x);
    const Bit y = rounds.reveal(v.y_hat);
    if (y != v.y_hat) {
      record_mistake(state, k, x, v.y_hat, y);
      return;
    }
  }
}

inline unsigned procedure_exponent(unsigned level) {
  return level == 0 ? 0 : 3 * level + 1;
}

template <RoundSource R>
void create_advanced(LearnerState& state, unsigned k, R& rounds) {
  for (int i = 0; i < 16; ++i) {
    if (k == 0) {
      vote_and_update(state, 0, rounds);
    } else {
      create_advanced(state, k - 1, rounds);
      vote_and_update(state, procedure_exponent(k), rounds);
    }
  }
}

// ---------------------------------------------------------------------------
// Schedules and budgets

// Mistakes consumed by CreateAdvanced(k): 16 + 16^2 + ... + 16^(k+1). Also the
// number of VoteAndUpdate calls it makes.
inline std::uint64_t create_advanced_mistakes(unsigned k) {
  std::uint64_t r = 16;
  for (unsigned j = 1; j <= k; ++j) r = 16 * (r + 1);
  return r;
}

// Net active functions appended by a halting CreateAdvanced(k): 2 * 8^(k+1).
inline std::uint64_t create_advanced_appended(unsigned k) {
  return std::uint64_t{2} << (3 * (k + 1));
}

// Mistakes that force CreateAdvanced(2d - 1) to halt; the learner makes at
// most one fewer against dimension-d adversaries.
inline std::uint64_t halting_budget(unsigned d) {
  if (d == 0) throw PreconditionViolation("dimension bound must be at least 1");
  return create_advanced_mistakes(2 * d - 1);
}

// VoteAndUpdate exponents in the order CreateAdvanced(k) calls them.
inline std::vector<unsigned> flatten_create_advanced(unsigned k) {
  std::vector<unsigned> out;
  auto walk = [&](auto&& self, unsigned level) -> void {
    for (int i = 0; i < 16; ++i) {
      if (level == 0) {
        out.push_back(0);
      } else {
        self(self, level - 1);
        out.push_back(procedure_exponent(level));
      }
    }
  };
  walk(walk, k);
  return out;
}

class ProcedureSchedule {
 public:
  virtual ~ProcedureSchedule() = default;
  // Exponent of the next VoteAndUpdate call; nullopt when the procedure ends.
  virtual std::optional<unsigned> next() = 0;
};

class FiniteSchedule final : public ProcedureSchedule {
 public:
  explicit FiniteSchedule(std::vector<unsigned> exponents)
      : exponents_(std::move(exponents)) {}

  std::optional<unsigned> next() override {
    if (pos_ == exponents_.size()) return std::nullopt;
    return exponents_[pos_++];
  }

 private:
  std::vector<unsigned> exponents_;
  std::size_t pos_ = 0;
};

/// The d-independent order: for N = 1, 2, ... run level 0, then levels
/// 1..i where 16^i is the largest power of 16 dividing N.
class PredictSchedule final : public ProcedureSchedule {
 public:
  std::optional<unsigned> next() override {
    if (pending_.empty()) {
      pending_.push_back(procedure_exponent(0));
      std::uint64_t n = n_++;
      for (unsigned level = 1; n % 16 == 0; ++level, n /= 16) {
        pending_.push_back(procedure_exponent(level));
      }
    }
    const unsigned k = pending_.front();
    pending_.pop_front();
    return k;
  }

 private:
  std::uint64_t n_ = 1;
  std::deque<unsigned> pending_;
};

inline std::vector<unsigned> predict_schedule_prefix(std::size_t length) {
  PredictSchedule schedule;
  std::vector<unsigned> out;
  out.reserve(length);
  while (out.size() < length) out.push_back(*schedule.next());
  return out;
}

/// Runs VoteAndUpdate procedures in schedule order against the game engine.
///
/// Without an explicit oracle, the oracle answers with the adversary's most
/// recent function, which agrees with every revealed label and therefore with
/// the mistake sample. Holds a pointer to itself through that oracle, so it is
/// neither copyable nor movable.
class MajorityVoteLearner final : public Learner {
 public:
  MajorityVoteLearner(std::string name,
                      std::unique_ptr<ProcedureSchedule> schedule,
                      ConsistentOracle oracle = {})
      : name_(std::move(name)), schedule_(std::move(schedule)) {
    state_.oracle = oracle ? std::move(oracle) : ConsistentOracle(
        [this](const Sample& s) { return revealed_answer(s); });
    advance();
  }

  MajorityVoteLearner(const MajorityVoteLearner&) = delete;
  MajorityVoteLearner& operator=(const MajorityVoteLearner&) = delete;

  [[nodiscard]] std::string name() const override { return name_; }

  Bit predict(Point x) override {
    if (!current_) throw PreconditionViolation(name_ + " has halted");
    last_vote_ = majority_vote(state_.active, *current_, x);
    trace_ = {last_vote_.width, state_.active.size(), {}, {}};
    return last_vote_.y_hat;
  }

  void observe(Point x, Bit y_hat, Bit y, const Hypothesis& f) override {
    revealed_ = f;
    if (y == y_hat) return;
    MistakeEffect effect = record_mistake(state_, *current_, x, y_hat, y);
    trace_.appended = std::move(effect.appended);
    trace_.deleted = std::move(effect.deleted);
    trace_.active_count = state_.active.size();
    completed_.push_back(*current_);
    advance();
  }

  [[nodiscard]] bool halted() const override { return !current_.has_value(); }
  [[nodiscard]] RoundTrace last_trace() const override { return trace_; }

  [[nodiscard]] const LearnerState& state() const { return state_; }
  // Exponents of the VoteAndUpdate calls finished so far.
  [[nodiscard]] const std::vector<unsigned>& completed_procedures() const {
    return completed_;
  }

 private:
  void advance() {
    current_ = schedule_->next();
    if (current_ && *current_ >= 1 &&
        state_.active.size() < vote_width(*current_)) {
      throw ScheduleViolation("VoteAndUpdate(" + std::to_string(*current_) +
                              ") entered with only " +
                              std::to_string(state_.active.size()) +
                              " active functions");
    }
  }

  Hypothesis revealed_answer(const Sample& s) const {
    if (!revealed_ || !is_consistent(*revealed_, s)) {
      throw OracleFailure("no revealed function agrees with the mistake sample");
    }
    return *revealed_;
  }

  std::string name_;
  std::unique_ptr<ProcedureSchedule> schedule_;
  LearnerState state_;
  std::optional<unsigned> current_;
  std::optional<Hypothesis> revealed_;
  Vote last_vote_;
  RoundTrace trace_;
  std::vector<unsigned> completed_;
};

inline std::unique_ptr<MajorityVoteLearner> make_predict_learner(
    ConsistentOracle oracle = {}) {
  return std::make_unique<MajorityVoteLearner>(
      "predict", std::make_unique<PredictSchedule>(), std::move(oracle));
}

inline std::unique_ptr<MajorityVoteLearner> make_create_advanced_learner(
    unsigned k, ConsistentOracle oracle = {}) {
  return std::make_unique<MajorityVoteLearner>(
      "create-adv:" + std::to_string(k),
      std::make_unique<FiniteSchedule>(flatten_create_advanced(k)),
      std::move(oracle));
}

// ---------------------------------------------------------------------------
// Advanced sets: T is gamma-advanced if every non-empty A of T has
// ldim(A) >= gamma + log16(|A| / |T|).

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

// Exact test of ldim >= gamma + log16(a / t), i.e.
// t^den * 16^(ldim*den) >= a^den * 16^num.
inline bool meets_advanced_bound(int dimension, std::size_t a, std::size_t t,
                                 Rational gamma) {
  using boost::multiprecision::cpp_int;
  if (gamma.den <= 0) throw PreconditionViolation("gamma denominator must be positive");
  const auto den = static_cast<unsigned>(gamma.den);
  cpp_int lhs = boost::multiprecision::pow(cpp_int(t), den);
  cpp_int rhs = boost::multiprecision::pow(cpp_int(a), den);
  const std::int64_t lhs_exp = static_cast<std::int64_t>(dimension) * gamma.den;
  const std::int64_t shift = lhs_exp - gamma.num;  // net power of 16 on lhs
  if (shift >= 0) {
    lhs <<= static_cast<unsigned>(4 * shift);
  } else {
    rhs <<= static_cast<unsigned>(-4 * shift);
  }
  return lhs >= rhs;
}

// Smallest dimension that satisfies the bound for a subset of size a.
inline int required_dimension(std::size_t a, std::size_t t, Rational gamma) {
  int d = 0;
  while (!meets_advanced_bound(d, a, t, gamma)) ++d;
  return d;
}

struct ExactSubsets {};
struct SampledSubsets {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};
using SubsetMode = std::variant<ExactSubsets, SampledSubsets>;

inline constexpr std::size_t kExactAdvancedMaxSize = 16;

struct AdvancedCheck {
  bool advanced = true;
  std::vector<std::size_t> counterexample;  // indices into T
  std::size_t subsets_checked = 0;
};

inline AdvancedCheck check_advanced(const std::vector<Hypothesis>& t,
                                    Rational gamma, SubsetMode mode) {
  if (t.empty()) throw PreconditionViolation("advanced-set check of an empty set");
  if (has_duplicates(t)) {
    throw PreconditionViolation("advanced-set check needs distinct functions");
  }
  LdimSolver solver(t);
  AdvancedCheck result;

  auto check = [&](const RowSet& subset) {
    ++result.subsets_checked;
    const int need = required_dimension(subset.count(), t.size(), gamma);
    if (!solver.at_least(subset, need)) {
      result.advanced = false;
      result.counterexample = subset.members();
      return false;
    }
    return true;
  };

  if (std::holds_alternative<ExactSubsets>(mode)) {
    if (t.size() > kExactAdvancedMaxSize) {
      throw SizeLimitExceeded("exact advanced-set check is limited to " +
                              std::to_string(kExactAdvancedMaxSize) +
                              " functions");
    }
    for (std::uint32_t mask = 1; mask < (1U << t.size()); ++mask) {
      RowSet subset(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        if ((mask >> i) & 1U) subset.insert(i);
      }
      if (!check(subset)) break;
    }
    return result;
  }

  const auto sampled = std::get<SampledSubsets>(mode);
  if (!check(solver.all())) return result;
  Rng rng(sampled.seed);
  std::vector<std::size_t> order(t.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t n = 0; n < sampled.count; ++n) {
    const std::size_t size = 1 + uniform_below(rng, t.size());
    for (std::size_t i = 0; i < size; ++i) {
      std::swap(order[i], order[i + uniform_below(rng, t.size() - i)]);
    }
    RowSet subset(t.size());
    for (std::size_t i = 0; i < size; ++i) subset.insert(order[i]);
    if (!check(subset)) break;
  }
  return result;
}

}  // namespace coracle
