#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coracle/hypothesis.hpp"
#include "coracle/protocol.hpp"
#include "coracle/random.hpp"

namespace coracle {

// 3^d; d is limited so that 3^d fits comfortably in 64 bits.
inline std::uint64_t pow3(unsigned d) {
  if (d > 39) throw PreconditionViolation("ternary dimension " + std::to_string(d) + " is too large");
  std::uint64_t p = 1;
  for (unsigned i = 0; i < d; ++i) p *= 3;
  return p;
}

/// Length-d base-3 expansion of a value below 3^d. digit(i) is the digit
/// before 3^i; from_top(j) is the (j+1)-th most significant digit.
class TernaryExpansion {
 public:
  TernaryExpansion(std::uint64_t value, unsigned d) : digits_(d, 0) {
    if (value >= pow3(d)) {
      throw PreconditionViolation(std::to_string(value) + " has more than " +
                                  std::to_string(d) + " ternary digits");
    }
    for (unsigned i = 0; i < d; ++i, value /= 3) {
      digits_[d - 1 - i] = static_cast<std::uint8_t>(value % 3);
    }
  }

  [[nodiscard]] unsigned length() const {
    return static_cast<unsigned>(digits_.size());
  }
  [[nodiscard]] unsigned digit(unsigned i) const {
    return digits_[digits_.size() - 1 - i];
  }
  [[nodiscard]] unsigned from_top(unsigned j) const { return digits_[j]; }
  // Most significant first.
  [[nodiscard]] const std::vector<std::uint8_t>& digits() const { return digits_; }

  [[nodiscard]] std::uint64_t value() const {
    std::uint64_t v = 0;
    for (auto dgt : digits_) v = 3 * v + dgt;
    return v;
  }

 private:
  std::vector<std::uint8_t> digits_;
};

/// f_r(x) for the ternary construction: the revealed label for x <= r, the
/// digit of r at the most significant position where r and x differ for
/// r < x < 3^d, and 0 from 3^d on. labels must cover 0..r.
inline Bit ternary_value(std::uint64_t r, unsigned d,
                         const std::vector<Bit>& labels, Point x) {
  const std::uint64_t n = pow3(d);
  if (x >= n) return false;
  if (x <= r) return labels.at(x);
  const TernaryExpansion rx(r, d);
  const TernaryExpansion xx(x, d);
  for (unsigned j = 0; j < d; ++j) {
    if (rx.from_top(j) != xx.from_top(j)) return rx.from_top(j) == 1;
  }
  return false;  // unreachable: x != r
}

inline Hypothesis ternary_function(std::uint64_t r, unsigned d,
                                   const std::vector<Bit>& labels) {
  const std::uint64_t n = pow3(d);
  if (r >= n) throw PreconditionViolation("ternary index out of range");
  if (labels.size() < r + 1) {
    throw PreconditionViolation("ternary function needs labels y_0..y_r");
  }
  std::vector<Point> domain(n);
  std::vector<Bit> values(n);
  for (std::uint64_t x = 0; x < n; ++x) {
    domain[x] = x;
    values[x] = ternary_value(r, d, labels, x);
  }
  return {"f" + std::to_string(r), domain, values};
}

/// Plays 0, 1, ..., 3^d - 1, always contradicting the prediction, and answers
/// with the ternary functions f_r. Done after 3^d rounds.
class TernaryAdversary final : public Adversary {
 public:
  explicit TernaryAdversary(unsigned d) : d_(d), n_(pow3(d)) {
    if (d == 0) throw PreconditionViolation("ternary adversary needs d >= 1");
  }

  [[nodiscard]] std::string name() const override {
    return "ternary:" + std::to_string(d_);
  }

  std::optional<Point> next_point() override {
    if (r_ >= n_) return std::nullopt;
    return r_;
  }

  AdversaryAnswer answer(Point x, Bit y_hat) override {
    if (x != r_) throw PreconditionViolation("ternary adversary answered out of turn");
    labels_.push_back(!y_hat);
    AdversaryAnswer a{!y_hat, ternary_function(r_, d_, labels_)};
    ++r_;
    return a;
  }

  [[nodiscard]] const std::vector<Bit>& labels() const { return labels_; }

 private:
  unsigned d_;
  std::uint64_t n_;
  std::uint64_t r_ = 0;
  std::vector<Bit> labels_;
};

/// Contradicts every prediction on the points 0 .. 2^(d+1) - 2 and answers
/// with the minimal extension of the history.
class FloodAdversary final : public Adversary {
 public:
  explicit FloodAdversary(unsigned d) : d_(d) {
    if (d == 0 || d > 40) throw PreconditionViolation("flood adversary needs 1 <= d <= 40");
    n_ = (std::uint64_t{2} << d) - 1;
  }

  [[nodiscard]] std::string name() const override {
    return "flood:" + std::to_string(d_);
  }
  [[nodiscard]] std::uint64_t points() const { return n_; }

  std::optional<Point> next_point() override {
    if (r_ >= n_) return std::nullopt;
    return r_;
  }

  AdversaryAnswer answer(Point x, Bit y_hat) override {
    history_.push_back(x, !y_hat);
    return {!y_hat, minimal_extension_oracle(history_, "flood" + std::to_string(r_++))};
  }

 private:
  unsigned d_;
  std::uint64_t n_ = 0;
  std::uint64_t r_ = 0;
  Sample history_;
};

/// Unconstrained: fresh points 0, 1, 2, ... forever, every prediction
/// contradicted.
class FreeAdversary final : public Adversary {
 public:
  [[nodiscard]] std::string name() const override { return "free"; }

  std::optional<Point> next_point() override { return r_; }

  AdversaryAnswer answer(Point x, Bit y_hat) override {
    history_.push_back(x, !y_hat);
    return {!y_hat, minimal_extension_oracle(history_, "free" + std::to_string(r_++))};
  }

 private:
  std::uint64_t r_ = 0;
  Sample history_;
};

/// Legal adversary for a fixed class: contradicts the prediction whenever some
/// class member allows it and answers with the first consistent member.
///
/// Points come from a seeded permutation of the class domain, cycled; the
/// next point that still splits the version space is preferred.
class ClassGreedyAdversary final : public Adversary {
 public:
  ClassGreedyAdversary(HypothesisClass c, std::uint64_t seed, std::string label = "class-greedy")
      : class_(std::move(c)), order_(class_.domain()), label_(std::move(label)) {
    Rng rng(seed);
    shuffle(order_, rng);
    for (std::size_t i = 0; i < class_.size(); ++i) alive_.push_back(i);
  }

  [[nodiscard]] std::string name() const override { return label_; }

  std::optional<Point> next_point() override {
    if (order_.empty()) return std::nullopt;
    for (std::size_t step = 0; step < order_.size(); ++step) {
      const std::size_t pos = (cursor_ + step) % order_.size();
      if (splits(order_[pos])) {
        cursor_ = pos + 1;
        return order_[pos];
      }
    }
    return order_[cursor_++ % order_.size()];
  }

  AdversaryAnswer answer(Point x, Bit y_hat) override {
    const Bit y = realizable(x, !y_hat) ? !y_hat : y_hat;
    if (!realizable(x, y)) {
      throw NonRealizable("history left the class at point " + std::to_string(x));
    }
    std::erase_if(alive_, [&](std::size_t i) { return class_[i](x) != y; });
    history_.push_back(x, y);
    return {y, table_oracle(class_, history_)};
  }

  [[nodiscard]] const Sample& history() const { return history_; }

 private:
  bool realizable(Point x, Bit y) const {
    return std::any_of(alive_.begin(), alive_.end(),
                       [&](std::size_t i) { return class_[i](x) == y; });
  }
  bool splits(Point x) const { return realizable(x, false) && realizable(x, true); }

  HypothesisClass class_;
  std::vector<Point> order_;
  std::string label_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> alive_;
  Sample history_;
};

/// Legal random adversary for a fixed class: uniform domain points, a uniform
/// realizable label, and a uniform consistent member as its function.
class ClassRandomAdversary final : public Adversary {
 public:
  ClassRandomAdversary(HypothesisClass c, std::uint64_t seed)
      : class_(std::move(c)), rng_(seed) {}

  [[nodiscard]] std::string name() const override { return "class-random"; }

  std::optional<Point> next_point() override {
    if (class_.domain().empty()) return std::nullopt;
    return class_.domain()[uniform_below(rng_, class_.domain().size())];
  }

  AdversaryAnswer answer(Point x, Bit) override {
    Sample with0 = history_;
    with0.push_back(x, false);
    Sample with1 = history_;
    with1.push_back(x, true);
    const bool can0 = realizable(with0);
    const bool can1 = realizable(with1);
    if (!can0 && !can1) throw NonRealizable("history left the class");
    const Bit y = can0 && can1 ? coin(rng_) : can1;
    history_ = y ? with1 : with0;
    return {y, random_table_oracle(class_, history_, rng_)};
  }

 private:
  bool realizable(const Sample& s) const {
    return std::any_of(class_.hypotheses().begin(), class_.hypotheses().end(),
                       [&](const Hypothesis& h) { return is_consistent(h, s); });
  }

  HypothesisClass class_;
  Rng rng_;
  Sample history_;
};

/// Fixed objective function queried on a given sequence of points.
class TargetAdversary final : public Adversary {
 public:
  TargetAdversary(Hypothesis target, std::vector<Point> queries)
      : target_(std::move(target)), queries_(std::move(queries)) {}

  [[nodiscard]] std::string name() const override { return "target:" + target_.id(); }

  std::optional<Point> next_point() override {
    if (pos_ >= queries_.size()) return std::nullopt;
    return queries_[pos_++];
  }

  AdversaryAnswer answer(Point x, Bit) override { return {target_(x), target_}; }

 private:
  Hypothesis target_;
  std::vector<Point> queries_;
  std::size_t pos_ = 0;
};

/// Learner for the class {f_0, ..., f_{3^d-1}} built from a known label
/// sequence, making at most d mistakes.
///
/// After its l-th mistake it holds a witness x that is l-informative for the
/// hidden index r: the top l-1 ternary digits of x are known digits of r and
/// f_r(x) != y_x. At level d the last digit of r follows from the witness.
class InformativeLearner final : public Learner {
 public:
  InformativeLearner(unsigned d, std::vector<Bit> labels)
      : d_(d), n_(pow3(d)), labels_(std::move(labels)) {
    if (d == 0) throw PreconditionViolation("informative learner needs d >= 1");
    if (labels_.size() != n_) {
      throw PreconditionViolation("informative learner needs 3^d labels");
    }
  }

  [[nodiscard]] std::string name() const override { return "informative"; }

  Bit predict(Point z) override {
    last_z_ = z;
    last_ = decide(z);
    return last_.prediction;
  }

  void observe(Point z, Bit, Bit y, const Hypothesis&) override { update(z, y); }

  void update(Point z, Bit y) {
    if (!last_z_ || *last_z_ != z) throw PreconditionViolation("update without a prediction for this point");
    last_z_.reset();
    seen_.push_back(z, y);
    if (y == last_.prediction) return;
    ++mistakes_;
    switch (last_.kind) {
      case Kind::Determined:
        throw InconsistentOracleClass("mistake on a determined value at " + std::to_string(z));
      case Kind::FirstMistake:
        witness_ = z;
        break;
      case Kind::ZeroDigit:
        witness_ = z;
        prefix_.push_back(0);
        break;
      case Kind::WitnessDigit:
        prefix_.push_back(static_cast<std::uint8_t>(last_.a));
        break;
      case Kind::OneUnderTwo:
        witness_ = z;
        prefix_.push_back(1);
        break;
      case Kind::TwoOverOne:
        prefix_.push_back(2);
        break;
    }
    if (prefix_.size() + 1 == d_) recover();
  }

  // Mistakes so far.
  [[nodiscard]] unsigned mistakes() const { return mistakes_; }
  // l: the witness is l-informative; 0 before the first mistake.
  [[nodiscard]] unsigned level() const {
    return witness_ ? static_cast<unsigned>(prefix_.size()) + 1 : 0;
  }
  // Known most significant ternary digits of r.
  [[nodiscard]] const std::vector<std::uint8_t>& known_prefix() const { return prefix_; }
  [[nodiscard]] std::optional<Point> witness() const { return witness_; }
  [[nodiscard]] std::optional<std::uint64_t> recovered_index() const { return r_; }

 private:
  enum class Kind { Determined, FirstMistake, ZeroDigit, WitnessDigit, OneUnderTwo, TwoOverOne };
  struct Decision {
    Kind kind = Kind::Determined;
    Bit prediction = false;
    unsigned a = 0;
  };

  Decision decide(Point z) {
    if (z >= n_) return {Kind::Determined, false};
    if (r_) return {Kind::Determined, ternary_value(*r_, d_, labels_, z)};
    if (!witness_) return {Kind::FirstMistake, labels_[z]};

    const TernaryExpansion zx(z, d_);
    for (;;) {
      const auto known = static_cast<unsigned>(prefix_.size());
      for (unsigned j = 0; j < known; ++j) {
        if (zx.from_top(j) < prefix_[j]) return {Kind::Determined, labels_[z]};
        if (zx.from_top(j) > prefix_[j]) return {Kind::Determined, prefix_[j] == 1};
      }
      const unsigned a = TernaryExpansion(*witness_, d_).from_top(known);
      const unsigned b = zx.from_top(known);
      if (a == 0) {
        // r < witness forces r's next digit to be 0 as well.
        prefix_.push_back(0);
        if (prefix_.size() + 1 == d_) {
          recover();
          return {Kind::Determined, ternary_value(*r_, d_, labels_, z)};
        }
        continue;
      }
      const Bit y_witness = labels_[*witness_];
      if (b == 0) return {Kind::ZeroDigit, labels_[z], a};
      if (a <= b) return {Kind::WitnessDigit, !y_witness, a};
      // a = 2, b = 1
      if (!y_witness) return {Kind::OneUnderTwo, labels_[z], a};
      return {Kind::TwoOverOne, false, a};
    }
  }

  // The witness is d-informative: r = prefix followed by r_0.
  void recover() {
    const unsigned a = TernaryExpansion(*witness_, d_).digit(0);
    if (a == 0) throw InconsistentOracleClass("no f_r fits the observed labels");
    const unsigned r0 = a == 1 ? 0 : (labels_[*witness_] ? 0 : 1);
    std::uint64_t r = 0;
    for (auto dgt : prefix_) r = 3 * r + dgt;
    r = 3 * r + r0;
    for (const auto& [x, y] : seen_) {
      if (ternary_value(r, d_, labels_, x) != y) {
        throw InconsistentOracleClass("recovered f_" + std::to_string(r) +
                                      " contradicts the label at " + std::to_string(x));
      }
    }
    r_ = r;
  }

  unsigned d_;
  std::uint64_t n_;
  std::vector<Bit> labels_;
  std::vector<std::uint8_t> prefix_;
  std::optional<Point> witness_;
  std::optional<std::uint64_t> r_;
  std::optional<Point> last_z_;
  Decision last_;
  Sample seen_;
  unsigned mistakes_ = 0;
};

}  // namespace coracle
