#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coracle/errors.hpp"
#include "coracle/random.hpp"

namespace coracle {

// A domain element. The domain is identified with the naturals.
using Point = std::uint64_t;
using Bit = bool;

/// A total {0,1}-valued function given by a finite table; every point outside
/// the table evaluates to 0.
///
/// Hypotheses are cheap handles onto immutable shared storage, so they can be
/// copied freely between learners, adversaries and transcripts. Equality is
/// extensional: two hypotheses are equal iff they take the value 1 on exactly
/// the same points. The id takes no part in equality.
class Hypothesis {
 public:
  Hypothesis() : table_(empty_table()) {}

  Hypothesis(std::string id, const std::vector<Point>& domain,
             const std::vector<Bit>& values)
      : id_(std::move(id)) {
    if (domain.size() != values.size()) {
      throw InvalidHypothesis("'" + id_ + "': " + std::to_string(values.size()) +
                              " values for a domain of " +
                              std::to_string(domain.size()) + " points");
    }
    auto table = std::make_shared<Table>();
    table->domain = domain;
    std::sort(table->domain.begin(), table->domain.end());
    if (std::adjacent_find(table->domain.begin(), table->domain.end()) !=
        table->domain.end()) {
      throw InvalidHypothesis("'" + id_ + "': domain has a duplicate point");
    }
    table->ones.reserve(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (values[i]) table->ones.push_back(domain[i]);
    }
    std::sort(table->ones.begin(), table->ones.end());
    table->finish();
    table_ = std::move(table);
  }

  // values given as a string of '0'/'1' characters aligned with domain.
  Hypothesis(std::string id, const std::vector<Point>& domain,
             std::string_view values)
      : Hypothesis(id, domain, parse_bits(id, values)) {}

  // Same function, different name.
  [[nodiscard]] Hypothesis renamed(std::string id) const {
    Hypothesis h = *this;
    h.id_ = std::move(id);
    return h;
  }

  [[nodiscard]] const std::string& id() const { return id_; }

  // Sorted declared domain.
  [[nodiscard]] const std::vector<Point>& domain() const {
    return table_->domain;
  }
  // Sorted points where the function is 1. Always a subset of domain().
  [[nodiscard]] const std::vector<Point>& ones() const { return table_->ones; }

  [[nodiscard]] Bit operator()(Point x) const {
    return std::binary_search(table_->ones.begin(), table_->ones.end(), x);
  }

  [[nodiscard]] std::uint64_t fingerprint() const { return table_->fingerprint; }

  // '0'/'1' string over the given points.
  [[nodiscard]] std::string bits_over(const std::vector<Point>& points) const {
    std::string s;
    s.reserve(points.size());
    for (Point p : points) s.push_back((*this)(p) ? '1' : '0');
    return s;
  }

  friend bool operator==(const Hypothesis& a, const Hypothesis& b) {
    return a.table_ == b.table_ ||
           (a.table_->fingerprint == b.table_->fingerprint &&
            a.table_->ones == b.table_->ones);
  }

 private:
  struct Table {
    std::vector<Point> domain;
    std::vector<Point> ones;
    std::uint64_t fingerprint = 0;

    void finish() {
      // FNV-1a over the sorted one-points.
      std::uint64_t h = 1469598103934665603ULL;
      for (Point p : ones) {
        for (int byte = 0; byte < 8; ++byte) {
          h ^= (p >> (8 * byte)) & 0xffU;
          h *= 1099511628211ULL;
        }
      }
      fingerprint = h;
    }
  };

  static std::shared_ptr<const Table> empty_table() {
    static const auto table = [] {
      auto t = std::make_shared<Table>();
      t->finish();
      return t;
    }();
    return table;
  }

  static std::vector<Bit> parse_bits(const std::string& id,
                                     std::string_view values) {
    std::vector<Bit> bits;
    bits.reserve(values.size());
    for (char c : values) {
      if (c != '0' && c != '1') {
        throw InvalidHypothesis("'" + id + "': value character '" +
                                std::string(1, c) + "' is not 0 or 1");
      }
      bits.push_back(c == '1');
    }
    return bits;
  }

  std::string id_;
  std::shared_ptr<const Table> table_;
};

struct HypothesisHash {
  std::size_t operator()(const Hypothesis& h) const noexcept {
    return static_cast<std::size_t>(h.fingerprint());
  }
};

inline Bit evaluate(const Hypothesis& h, Point x) { return h(x); }

struct LabeledPoint {
  Point x = 0;
  Bit y = false;

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Ordered list of (point, label) pairs.
class Sample {
 public:
  Sample() = default;
  Sample(std::initializer_list<LabeledPoint> pairs) : pairs_(pairs) {}

  void push_back(Point x, Bit y) { pairs_.push_back({x, y}); }

  [[nodiscard]] const std::vector<LabeledPoint>& pairs() const { return pairs_; }
  [[nodiscard]] std::size_t size() const { return pairs_.size(); }
  [[nodiscard]] bool empty() const { return pairs_.empty(); }
  [[nodiscard]] auto begin() const { return pairs_.begin(); }
  [[nodiscard]] auto end() const { return pairs_.end(); }

  // True if some point carries both labels.
  [[nodiscard]] bool is_contradictory() const {
    std::unordered_map<Point, Bit> seen;
    for (const auto& [x, y] : pairs_) {
      auto [it, inserted] = seen.emplace(x, y);
      if (!inserted && it->second != y) return true;
    }
    return false;
  }

 private:
  std::vector<LabeledPoint> pairs_;
};

inline bool is_consistent(const Hypothesis& h, const Sample& s) {
  return std::all_of(s.begin(), s.end(),
                     [&](const LabeledPoint& p) { return h(p.x) == p.y; });
}

/// Finite non-empty class of hypotheses sharing one declared domain.
class HypothesisClass {
 public:
  HypothesisClass(std::vector<Point> domain, std::vector<Hypothesis> hypotheses)
      : domain_(std::move(domain)), hypotheses_(std::move(hypotheses)) {
    if (hypotheses_.empty()) throw EmptyClass("class has no hypotheses");
    std::vector<Point> sorted = domain_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidHypothesis("class domain has a duplicate point");
    }
    for (const auto& h : hypotheses_) {
      if (h.domain() != sorted) {
        throw InvalidHypothesis("'" + h.id() +
                                "' is not defined over the class domain");
      }
    }
  }

  // Builds hypotheses from '0'/'1' strings aligned with domain. Names default
  // to h0, h1, ...
  static HypothesisClass from_rows(std::vector<Point> domain,
                                   const std::vector<std::string>& rows) {
    std::vector<Hypothesis> hs;
    hs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      hs.emplace_back("h" + std::to_string(i), domain, rows[i]);
    }
    return {std::move(domain), std::move(hs)};
  }

  [[nodiscard]] const std::vector<Point>& domain() const { return domain_; }
  [[nodiscard]] const std::vector<Hypothesis>& hypotheses() const {
    return hypotheses_;
  }
  [[nodiscard]] std::size_t size() const { return hypotheses_.size(); }
  [[nodiscard]] const Hypothesis& operator[](std::size_t i) const {
    return hypotheses_[i];
  }

 private:
  std::vector<Point> domain_;
  std::vector<Hypothesis> hypotheses_;
};

// Removes extensional duplicates, keeping first occurrences in order.
inline std::vector<Hypothesis> distinct(const std::vector<Hypothesis>& hs) {
  std::vector<Hypothesis> out;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_print;
  for (const auto& h : hs) {
    auto& bucket = by_print[h.fingerprint()];
    const bool seen = std::any_of(bucket.begin(), bucket.end(),
                                  [&](std::size_t i) { return out[i] == h; });
    if (!seen) {
      bucket.push_back(out.size());
      out.push_back(h);
    }
  }
  return out;
}

inline bool has_duplicates(const std::vector<Hypothesis>& hs) {
  return distinct(hs).size() != hs.size();
}

// ---------------------------------------------------------------------------
// Consistent oracles

/// Given a sample, returns a hypothesis consistent with every pair. Throws
/// NonRealizable (or OracleFailure) when it cannot.
using ConsistentOracle = std::function<Hypothesis(const Sample&)>;

// First hypothesis of the class, in class order, consistent with s.
inline Hypothesis table_oracle(const HypothesisClass& c, const Sample& s) {
  for (const auto& h : c.hypotheses()) {
    if (is_consistent(h, s)) return h;
  }
  throw NonRealizable("no hypothesis in the class agrees with the " +
                      std::to_string(s.size()) + "-pair sample");
}

// Uniformly random consistent hypothesis; for adversarial stress testing.
inline Hypothesis random_table_oracle(const HypothesisClass& c, const Sample& s,
                                      Rng& rng) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (is_consistent(c[i], s)) hits.push_back(i);
  }
  if (hits.empty()) {
    throw NonRealizable("no hypothesis in the class agrees with the " +
                        std::to_string(s.size()) + "-pair sample");
  }
  return c[hits[uniform_below(rng, hits.size())]];
}

inline ConsistentOracle make_table_oracle(HypothesisClass c) {
  return [c = std::move(c)](const Sample& s) { return table_oracle(c, s); };
}

// The hypothesis defined exactly on the sample's points with the sample's
// labels, 0 elsewhere.
inline Hypothesis minimal_extension_oracle(const Sample& s,
                                           std::string id = "ext") {
  std::vector<LabeledPoint> pairs(s.begin(), s.end());
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const LabeledPoint& a, const LabeledPoint& b) { return a.x < b.x; });
  std::vector<Point> domain;
  std::vector<Bit> values;
  domain.reserve(pairs.size());
  values.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    if (!domain.empty() && domain.back() == x) {
      if (values.back() != y) {
        throw ContradictorySample("point " + std::to_string(x) +
                                  " appears with both labels");
      }
      continue;
    }
    domain.push_back(x);
    values.push_back(y);
  }
  return {std::move(id), domain, values};
}

}  // namespace coracle
