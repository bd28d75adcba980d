// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_ENV_HPP
#define SEERL_ENV_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "seerl/errors.hpp"
#include "seerl/rng.hpp"

namespace seerl {

struct DiscreteSpace {
  int num_actions = 0;
};

struct ContinuousSpace {
  int dim = 0;
  std::vector<double> low;
  std::vector<double> high;
};

using ActionSpace = std::variant<DiscreteSpace, ContinuousSpace>;

/// Action value: discrete index or real vector.
struct Action {
  int index = 0;
  std::vector<double> values;
  bool is_discrete() const { return values.empty(); }
};

struct MdpSpec {
  int state_dim = 0;
  ActionSpace action_space;
  double gamma = 0.99;
  std::uint64_t horizon = 0;
};

struct Transition {
  std::vector<double> state;
  Action action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// A toy MDP. Instances are stateful and single-threaded; all randomness
/// comes from the instance's own counter-based generator seeded at reset.
class Env {
public:
  virtual ~Env() = default;

  virtual const MdpSpec& spec() const = 0;
  virtual const std::string& id() const = 0;

  /// Start a new episode; identical seed yields the identical state.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;

  virtual Transition step(const Action& action) = 0;

  /// Out-of-range continuous actions are clipped into [low, high] by
  /// default; with clipping disabled they raise OutOfBoundsAction instead.
  void set_clip_actions(bool clip) { clip_actions_ = clip; }

protected:
  void require_alive() const {
    if (done_) throw StepAfterDone("step() called on a finished episode");
  }

  std::vector<double> clip_continuous(const std::vector<double>& a,
                                      const ContinuousSpace& space) const {
    if (static_cast<int>(a.size()) != space.dim)
      throw DimensionMismatch("action dim " + std::to_string(a.size()) +
                              ", expected " + std::to_string(space.dim));
    std::vector<double> out = a;
    for (int d = 0; d < space.dim; ++d) {
      if (out[d] < space.low[d] || out[d] > space.high[d]) {
        if (!clip_actions_)
          throw OutOfBoundsAction("action component " + std::to_string(d) +
                                  " outside bounds");
        out[d] = std::min(std::max(out[d], space.low[d]), space.high[d]);
      }
    }
    return out;
  }

  bool done_ = true;
  bool clip_actions_ = true;
  std::uint64_t step_count_ = 0;
};

/// 5x5 grid, one-hot 25-dim state, 4 actions (up, right, down, left).
/// Start (0,0), goal (4,4). Reaching the goal pays +1 and ends the
/// episode; every other step costs -0.01. Walls are absorbing (bumping
/// stays in place). Horizon 100.
class GridWorld final : public Env {
public:
  static constexpr int kSide = 5;

  GridWorld() {
    spec_.state_dim = kSide * kSide;
    spec_.action_space = DiscreteSpace{4};
    spec_.gamma = 0.99;
    spec_.horizon = 100;
  }

  const MdpSpec& spec() const override { return spec_; }
  const std::string& id() const override { return id_; }

  std::vector<double> reset(std::uint64_t /*seed*/) override {
    row_ = 0;
    col_ = 0;
    step_count_ = 0;
    done_ = false;
    return encode();
  }

  Transition step(const Action& action) override {
    require_alive();
    if (!action.is_discrete() || action.index < 0 || action.index >= 4)
      throw OutOfBoundsAction("gridworld expects a discrete action in [0,4)");
    Transition tr;
    tr.state = encode();
    tr.action = action;

    int r = row_, c = col_;
    switch (action.index) {
      case 0: r -= 1; break; // up
      case 1: c += 1; break; // right
      case 2: r += 1; break; // down
      case 3: c -= 1; break; // left
    }
    if (r >= 0 && r < kSide && c >= 0 && c < kSide) {
      row_ = r;
      col_ = c;
    }
    ++step_count_;
    const bool at_goal = row_ == kSide - 1 && col_ == kSide - 1;
    tr.reward = at_goal ? 1.0 : -0.01;
    done_ = at_goal || step_count_ >= spec_.horizon;
    tr.next_state = encode();
    tr.done = done_;
    return tr;
  }

private:
  std::vector<double> encode() const {
    std::vector<double> s(kSide * kSide, 0.0);
    s[row_ * kSide + col_] = 1.0;
    return s;
  }

  MdpSpec spec_;
  std::string id_ = "gridworld";
  int row_ = 0, col_ = 0;
};

/// Classic pole-balance dynamics on a 4-dim state (x, x_dot, theta,
/// theta_dot), two actions (push left / push right), +1 per surviving
/// step, horizon 500. Euler integration with dt = 0.02.
class CartPoleLite final : public Env {
public:
  CartPoleLite() {
    spec_.state_dim = 4;
    spec_.action_space = DiscreteSpace{2};
    spec_.gamma = 0.99;
    spec_.horizon = 500;
  }

  const MdpSpec& spec() const override { return spec_; }
  const std::string& id() const override { return id_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    for (double& v : state_) v = rng_.uniform(-0.05, 0.05);
    step_count_ = 0;
    done_ = false;
    return {state_.begin(), state_.end()};
  }

  Transition step(const Action& action) override {
    require_alive();
    if (!action.is_discrete() || action.index < 0 || action.index >= 2)
      throw OutOfBoundsAction("cartpole-lite expects a discrete action in [0,2)");
    Transition tr;
    tr.state = {state_.begin(), state_.end()};
    tr.action = action;

    const double force = action.index == 1 ? kForce : -kForce;
    double x = state_[0], x_dot = state_[1];
    double theta = state_[2], theta_dot = state_[3];

    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    state_[0] = x + kDt * x_dot;
    state_[1] = x_dot + kDt * x_acc;
    state_[2] = theta + kDt * theta_dot;
    state_[3] = theta_dot + kDt * theta_acc;

    ++step_count_;
    const bool failed = std::abs(state_[0]) > kXLimit ||
                        std::abs(state_[2]) > kThetaLimit;
    tr.reward = 1.0;
    done_ = failed || step_count_ >= spec_.horizon;
    tr.next_state = {state_.begin(), state_.end()};
    tr.done = done_;
    return tr;
  }

private:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kTotalMass = kCartMass + kPoleMass;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kPoleMassLength = kPoleMass * kHalfLength;
  static constexpr double kForce = 10.0;
  static constexpr double kDt = 0.02;
  static constexpr double kXLimit = 2.4;
  static constexpr double kThetaLimit = 12.0 * 3.14159265358979323846 / 180.0;

  MdpSpec spec_;
  std::string id_ = "cartpole-lite";
  std::array<double, 4> state_{};
  Rng rng_{0};
};

/// Point mass on the plane: state (px, py, vx, vy), continuous action in
/// [-1,1]^2 interpreted as the commanded velocity. Position integrates
/// the action (x + dt*a) plus small Gaussian process noise; reward is the
/// negative squared distance to the origin. Episode ends within 0.05 of
/// the goal or at horizon 200.
class PointMass2D final : public Env {
public:
  static constexpr double kDt = 0.1;
  static constexpr double kNoiseSigma = 0.005;
  static constexpr double kGoalRadius = 0.05;

  PointMass2D() {
    spec_.state_dim = 4;
    spec_.action_space = ContinuousSpace{2, {-1.0, -1.0}, {1.0, 1.0}};
    spec_.gamma = 0.99;
    spec_.horizon = 200;
  }

  const MdpSpec& spec() const override { return spec_; }
  const std::string& id() const override { return id_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    pos_[0] = rng_.uniform(-1.0, 1.0);
    pos_[1] = rng_.uniform(-1.0, 1.0);
    vel_[0] = vel_[1] = 0.0;
    step_count_ = 0;
    done_ = false;
    return encode();
  }

  Transition step(const Action& action) override {
    require_alive();
    if (action.is_discrete())
      throw OutOfBoundsAction("pointmass2d expects a continuous action");
    const auto& space = std::get<ContinuousSpace>(spec_.action_space);
    const std::vector<double> a = clip_continuous(action.values, space);

    Transition tr;
    tr.state = encode();
    tr.action.values = a;

    for (int d = 0; d < 2; ++d) {
      pos_[d] += kDt * a[d] + rng_.normal(0.0, kNoiseSigma);
      vel_[d] = a[d];
    }
    ++step_count_;
    const double dist2 = pos_[0] * pos_[0] + pos_[1] * pos_[1];
    tr.reward = -dist2;
    done_ = dist2 < kGoalRadius * kGoalRadius || step_count_ >= spec_.horizon;
    tr.next_state = encode();
    tr.done = done_;
    return tr;
  }

private:
  std::vector<double> encode() const {
    return {pos_[0], pos_[1], vel_[0], vel_[1]};
  }

  MdpSpec spec_;
  std::string id_ = "pointmass2d";
  std::array<double, 2> pos_{};
  std::array<double, 2> vel_{};
  Rng rng_{0};
};

inline std::unique_ptr<Env> make_env(const std::string& env_id) {
  if (env_id == "gridworld") return std::make_unique<GridWorld>();
  if (env_id == "cartpole-lite") return std::make_unique<CartPoleLite>();
  if (env_id == "pointmass2d") return std::make_unique<PointMass2D>();
  throw ConfigError("unknown env id: " + env_id);
}

} // namespace seerl

#endif // SEERL_ENV_HPP
