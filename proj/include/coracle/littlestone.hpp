#pragma once

// Exact Littlestone dimension, shattered-tree certificates, the Standard
// Optimal Algorithm and the exhaustive mistake game.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "coracle/hypothesis.hpp"
#include "coracle/protocol.hpp"
#include "coracle/row_set.hpp"

namespace coracle {

inline int floor_log2(std::size_t n) {
  return n == 0 ? -1 : static_cast<int>(std::bit_width(n)) - 1;
}

/// Complete binary tree of a fixed depth whose internal nodes carry points.
/// Nodes are stored in heap order: the b-child of node i is 2i + 1 + b.
class LabeledTree {
 public:
  explicit LabeledTree(int depth)
      : depth_(depth), labels_((std::size_t{1} << depth) - 1, 0) {}

  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] std::size_t internal_nodes() const { return labels_.size(); }
  [[nodiscard]] Point label(std::size_t node) const { return labels_[node]; }
  void set_label(std::size_t node, Point x) { labels_[node] = x; }

  static std::size_t child(std::size_t node, Bit b) { return 2 * node + 1 + b; }

  // The partial assignment of every leaf, leaves ordered left (0) to right.
  [[nodiscard]] std::vector<Sample> leaf_samples() const {
    std::vector<Sample> out;
    out.reserve(std::size_t{1} << depth_);
    for (std::size_t leaf = 0; leaf < (std::size_t{1} << depth_); ++leaf) {
      Sample s;
      std::size_t node = 0;
      for (int level = 0; level < depth_; ++level) {
        const Bit b = (leaf >> (depth_ - 1 - level)) & 1U;
        s.push_back(labels_[node], b);
        node = child(node, b);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  // Nested text: each internal node prints as "x=<point>", its children
  // indented below it behind "0:" and "1:".
  [[nodiscard]] std::string to_string() const {
    std::ostringstream os;
    if (depth_ > 0) print(os, 0, 0, "");
    return os.str();
  }

 private:
  void print(std::ostringstream& os, std::size_t node, int level,
             const std::string& prefix) const {
    os << std::string(static_cast<std::size_t>(2 * level), ' ') << prefix
       << "x=" << labels_[node] << '\n';
    if (level + 1 < depth_) {
      print(os, child(node, false), level + 1, "0: ");
      print(os, child(node, true), level + 1, "1: ");
    }
  }

  int depth_;
  std::vector<Point> labels_;
};

// Every leaf's assignment is realized by some member of hs.
inline bool is_shattered_by(const LabeledTree& tree,
                            const std::vector<Hypothesis>& hs) {
  for (const auto& leaf : tree.leaf_samples()) {
    const bool realized = std::any_of(hs.begin(), hs.end(), [&](const auto& h) {
      return is_consistent(h, leaf);
    });
    if (!realized) return false;
  }
  return true;
}

/// Memoized Littlestone-dimension solver over the subsets of a fixed finite
/// set of functions.
///
/// Functions are deduplicated into rows; subsets are RowSets over those rows.
/// Splitting points are the points where at least one function is 1, since
/// every other point puts the whole set on the 0 side. The memo stores, per
/// subset, the tightest known [lo, hi] bounds on its dimension and is shared
/// by every query made through the same solver.
class LdimSolver {
 public:
  explicit LdimSolver(const std::vector<Hypothesis>& functions) {
    if (functions.empty()) throw EmptyClass("no functions");
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_print;
    row_of_.reserve(functions.size());
    for (const auto& h : functions) {
      auto& bucket = by_print[h.fingerprint()];
      auto hit = std::find_if(bucket.begin(), bucket.end(), [&](std::size_t r) {
        return rows_[r] == h;
      });
      if (hit != bucket.end()) {
        row_of_.push_back(*hit);
      } else {
        bucket.push_back(rows_.size());
        row_of_.push_back(rows_.size());
        rows_.push_back(h);
      }
    }

    for (const auto& h : rows_) {
      points_.insert(points_.end(), h.ones().begin(), h.ones().end());
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());

    columns_.assign(points_.size(), RowSet(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (Point p : rows_[r].ones()) {
        const auto c = static_cast<std::size_t>(
            std::lower_bound(points_.begin(), points_.end(), p) - points_.begin());
        columns_[c].insert(r);
      }
    }
  }

  // Distinct functions, in first-occurrence order.
  [[nodiscard]] const std::vector<Hypothesis>& rows() const { return rows_; }
  // Row of each input function.
  [[nodiscard]] const std::vector<std::size_t>& row_of() const { return row_of_; }

  [[nodiscard]] RowSet all() const { return RowSet::full(rows_.size()); }

  [[nodiscard]] RowSet rows_of(const std::vector<std::size_t>& inputs) const {
    RowSet s(rows_.size());
    for (auto i : inputs) s.insert(row_of_.at(i));
    return s;
  }

  // Members of s whose value at x is y.
  [[nodiscard]] RowSet restrict(const RowSet& s, Point x, Bit y) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it == points_.end() || *it != x) return y ? RowSet(rows_.size()) : s;
    const auto& col = columns_[static_cast<std::size_t>(it - points_.begin())];
    return y ? (s & col) : (s - col);
  }

  // ldim(s) >= t. False for the empty set, whose dimension is undefined.
  bool at_least(const RowSet& s, int t) {
    const std::size_t n = s.count();
    if (n == 0) return false;
    if (t <= 0) return true;
    if (t > floor_log2(n)) return false;
    if (t == 1) return true;  // two distinct functions split somewhere

    Bounds& bounds = lookup(s, n);
    if (t <= bounds.lo) return true;
    if (t > bounds.hi) return false;

    const std::size_t need = std::size_t{1} << (t - 1);
    for (const auto& col : columns_) {
      RowSet ones = s & col;
      const std::size_t n1 = ones.count();
      if (n1 < need || n - n1 < need) continue;
      RowSet zeros = s - col;
      const bool ones_smaller = n1 <= n - n1;
      const RowSet& small = ones_smaller ? ones : zeros;
      const RowSet& large = ones_smaller ? zeros : ones;
      if (at_least(small, t - 1) && at_least(large, t - 1)) {
        bounds.lo = std::max(bounds.lo, t);
        return true;
      }
    }
    bounds.hi = std::min(bounds.hi, t - 1);
    return false;
  }

  // Exact dimension of a non-empty subset.
  int ldim(const RowSet& s) {
    if (s.empty()) throw EmptyClass("ldim of the empty set is undefined");
    int t = 0;
    while (at_least(s, t + 1)) ++t;
    return t;
  }

  int ldim() { return ldim(all()); }

  // A depth-`depth` tree shattered by s, if one exists.
  std::optional<LabeledTree> shattered_tree(const RowSet& s, int depth) {
    if (!at_least(s, depth)) return std::nullopt;
    LabeledTree tree(depth);
    build(tree, 0, s, depth);
    return tree;
  }

 private:
  struct Bounds {
    int lo;
    int hi;
  };

  Bounds& lookup(const RowSet& s, std::size_t n) {
    auto it = memo_.find(s);
    if (it == memo_.end()) {
      it = memo_.emplace(s, Bounds{n >= 2 ? 1 : 0, floor_log2(n)}).first;
    }
    return it->second;
  }

  void build(LabeledTree& tree, std::size_t node, const RowSet& s, int t) {
    if (t == 0) return;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      RowSet ones = s & columns_[c];
      RowSet zeros = s - columns_[c];
      if (at_least(zeros, t - 1) && at_least(ones, t - 1)) {
        tree.set_label(node, points_[c]);
        build(tree, LabeledTree::child(node, false), zeros, t - 1);
        build(tree, LabeledTree::child(node, true), ones, t - 1);
        return;
      }
    }
    throw Error("internal: dimension bound without a splitting point");
  }

  std::vector<Hypothesis> rows_;
  std::vector<std::size_t> row_of_;
  std::vector<Point> points_;
  std::vector<RowSet> columns_;
  std::unordered_map<RowSet, Bounds, RowSetHash> memo_;
};

inline int ldim(const std::vector<Hypothesis>& functions) {
  if (functions.empty()) throw EmptyClass("class has no hypotheses");
  return LdimSolver(functions).ldim();
}

inline int ldim(const HypothesisClass& c) { return ldim(c.hypotheses()); }

inline std::optional<LabeledTree> find_shattered_tree(
    const std::vector<Hypothesis>& functions, int depth) {
  if (functions.empty()) throw EmptyClass("class has no hypotheses");
  if (depth < 1) throw PreconditionViolation("tree depth must be at least 1");
  LdimSolver solver(functions);
  return solver.shattered_tree(solver.all(), depth);
}

inline std::optional<LabeledTree> find_shattered_tree(const HypothesisClass& c,
                                                      int depth) {
  return find_shattered_tree(c.hypotheses(), depth);
}

// ---------------------------------------------------------------------------
// Version spaces and the Standard Optimal Algorithm

/// The members of a class consistent with a history. Restrictions share one
/// solver, so a lineage of version spaces belongs to a single game.
class VersionSpace {
 public:
  explicit VersionSpace(const HypothesisClass& c)
      : solver_(std::make_shared<LdimSolver>(c.hypotheses())),
        members_(solver_->all()) {}

  [[nodiscard]] std::size_t size() const { return members_.count(); }
  [[nodiscard]] bool empty() const { return members_.empty(); }

  [[nodiscard]] std::vector<Hypothesis> members() const {
    std::vector<Hypothesis> out;
    members_.for_each([&](std::size_t r) { out.push_back(solver_->rows()[r]); });
    return out;
  }

  [[nodiscard]] VersionSpace restricted(Point x, Bit y) const {
    VersionSpace v = *this;
    v.members_ = solver_->restrict(members_, x, y);
    return v;
  }

  // Dimension of the restriction to f(x) = y; -1 when that restriction is
  // empty.
  [[nodiscard]] int restriction_score(Point x, Bit y) const {
    RowSet part = solver_->restrict(members_, x, y);
    return part.empty() ? -1 : solver_->ldim(part);
  }

  [[nodiscard]] int ldim() const { return solver_->ldim(members_); }

 private:
  std::shared_ptr<LdimSolver> solver_;
  RowSet members_;
};

// Label whose restriction has the larger dimension; ties go to 0.
inline Bit soa_predict(const VersionSpace& v, Point x) {
  if (v.empty()) throw EmptyVersionSpace("SOA needs a non-empty version space");
  return v.restriction_score(x, true) > v.restriction_score(x, false);
}

inline VersionSpace soa_update(const VersionSpace& v, Point x, Bit y) {
  VersionSpace next = v.restricted(x, y);
  if (next.empty()) {
    throw IllegalLabel("no remaining hypothesis has value " +
                       std::to_string(int{y}) + " at " + std::to_string(x));
  }
  return next;
}

class SoaLearner final : public Learner {
 public:
  explicit SoaLearner(const HypothesisClass& c) : space_(c) {}

  [[nodiscard]] std::string name() const override { return "soa"; }
  Bit predict(Point x) override { return soa_predict(space_, x); }
  void observe(Point x, Bit, Bit y, const Hypothesis&) override {
    space_ = soa_update(space_, x, y);
  }
  [[nodiscard]] const VersionSpace& version_space() const { return space_; }

 private:
  VersionSpace space_;
};

// ---------------------------------------------------------------------------
// Exhaustive mistake game

inline constexpr std::size_t kMinimaxMaxHypotheses = 6;
inline constexpr std::size_t kMinimaxMaxPoints = 5;

/// Value of the mistake game on c: the adversary picks a point, the learner
/// predicts, the adversary picks any label that keeps the version space
/// non-empty. Points that do not split the version space have a forced label
/// and cost a knowing learner nothing, so only splitting points count.
inline int minimax_adversary_value(const HypothesisClass& c) {
  if (c.size() > kMinimaxMaxHypotheses || c.domain().size() > kMinimaxMaxPoints) {
    throw SizeLimitExceeded(
        "minimax is limited to " + std::to_string(kMinimaxMaxHypotheses) +
        " hypotheses over " + std::to_string(kMinimaxMaxPoints) + " points");
  }
  std::vector<unsigned> ones_at;
  for (Point x : c.domain()) {
    unsigned mask = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i](x)) mask |= 1U << i;
    }
    ones_at.push_back(mask);
  }

  std::map<unsigned, int> memo;
  auto value = [&](auto&& self, unsigned space) -> int {
    if (std::popcount(space) <= 1) return 0;
    if (auto it = memo.find(space); it != memo.end()) return it->second;
    int best = 0;
    for (unsigned col : ones_at) {
      const unsigned one = space & col;
      const unsigned zero = space & ~col;
      if (one == 0 || zero == 0) continue;
      const int v0 = self(self, zero);
      const int v1 = self(self, one);
      const int guess0 = std::max(v0, 1 + v1);
      const int guess1 = std::max(1 + v0, v1);
      best = std::max(best, std::min(guess0, guess1));
    }
    memo[space] = best;
    return best;
  };
  return value(value, (1U << c.size()) - 1);
}

}  // namespace coracle
