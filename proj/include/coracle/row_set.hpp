#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

namespace coracle {

/// Fixed-capacity bitset over hypothesis indices; the canonical key for a
/// subset of a class.
class RowSet {
 public:
  RowSet() = default;
  explicit RowSet(std::size_t capacity)
      : capacity_(capacity), words_((capacity + 63) / 64, 0) {}

  static RowSet full(std::size_t capacity) {
    RowSet s(capacity);
    for (std::size_t i = 0; i < capacity; ++i) s.insert(i);
    return s;
  }

  void insert(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void erase(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  [[nodiscard]] bool contains(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1U;
  }

  [[nodiscard]] std::size_t capacity() const { return capacity_; }

  [[nodiscard]] std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  [[nodiscard]] bool empty() const {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  // Index of the lowest member, or capacity() when empty.
  [[nodiscard]] std::size_t first() const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k] != 0) {
        return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
      }
    }
    return capacity_;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w != 0) {
        f(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  [[nodiscard]] std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  friend RowSet operator&(const RowSet& a, const RowSet& b) {
    RowSet r = a;
    for (std::size_t k = 0; k < r.words_.size(); ++k) r.words_[k] &= b.words_[k];
    return r;
  }

  // a \ b
  friend RowSet operator-(const RowSet& a, const RowSet& b) {
    RowSet r = a;
    for (std::size_t k = 0; k < r.words_.size(); ++k) r.words_[k] &= ~b.words_[k];
    return r;
  }

  friend bool operator==(const RowSet&, const RowSet&) = default;

  [[nodiscard]] std::size_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::size_t capacity_ = 0;
  std::vector<std::uint64_t> words_;
};

struct RowSetHash {
  std::size_t operator()(const RowSet& s) const noexcept { return s.hash(); }
};

}  // namespace coracle
