#pragma once

// The narrow round interface every learner and adversary speaks:
// adversary supplies x, learner answers y_hat, adversary reveals y and f.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coracle/hypothesis.hpp"

namespace coracle {

// What the learner did in the most recent round.
struct RoundTrace {
  std::uint64_t vote_width = 0;  // number of voters; 0 for the default guess
  std::size_t active_count = 0;
  std::vector<std::uint64_t> appended;  // serials of new active functions
  std::vector<std::uint64_t> deleted;
};

class Learner {
 public:
  virtual ~Learner() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  virtual Bit predict(Point x) = 0;
  // f is the adversary's function for this round; it agrees with every label
  // revealed so far, including (x, y).
  virtual void observe(Point x, Bit y_hat, Bit y, const Hypothesis& f) = 0;
  // A learner that has finished its procedure stops the game.
  [[nodiscard]] virtual bool halted() const { return false; }
  [[nodiscard]] virtual RoundTrace last_trace() const { return {}; }
};

struct AdversaryAnswer {
  Bit y = false;
  Hypothesis f;
};

class Adversary {
 public:
  virtual ~Adversary() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  // Next point to query, or nullopt once the adversary is done.
  virtual std::optional<Point> next_point() = 0;
  virtual AdversaryAnswer answer(Point x, Bit y_hat) = 0;
};

}  // namespace coracle
