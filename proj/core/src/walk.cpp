#include "dtqw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "dtqw/error.hpp"

namespace dtqw {

namespace {

void require_finite(std::span<const Amplitude> amps, const char* what) {
  for (const auto& z : amps) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw DomainError(fmt::format("{}: non-finite amplitude", what));
    }
  }
}

void check_theta(double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
    throw DomainError(fmt::format("theta = {} deg outside [0, 180]", theta_deg));
  }
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw DomainError(fmt::format("gamma = {} must be finite and >= 0", gamma));
  }
}

}  // namespace

void WalkParams::validate() const {
  check_theta(theta_deg);
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
    throw DomainError(fmt::format("phi = {} rad outside [0, pi]", phi));
  }
  check_gamma(gamma);
  if (steps < 0) {
    throw DomainError(fmt::format("steps = {} must be non-negative", steps));
  }
}

CoinMatrix CoinMatrix::from_degrees(double theta_deg) {
  check_theta(theta_deg);
  const double rad = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  return CoinMatrix{c, s, s, -c};
}

WalkerState::WalkerState(int capacity)
    : capacity_(capacity),
      h_(static_cast<std::size_t>(2 * capacity + 1)),
      v_(static_cast<std::size_t>(2 * capacity + 1)) {
  if (capacity < 0) {
    throw DomainError(fmt::format("lattice capacity {} must be >= 0", capacity));
  }
}

WalkerState WalkerState::from_amplitudes(int step, std::vector<Amplitude> h,
                                         std::vector<Amplitude> v) {
  if (h.size() != v.size() || h.size() % 2 == 0) {
    throw DomainError(fmt::format(
        "amplitude arrays must share an odd length (got {} and {})", h.size(),
        v.size()));
  }
  if (step < 0) throw DomainError("step must be non-negative");
  require_finite(h, "from_amplitudes");
  require_finite(v, "from_amplitudes");

  WalkerState state(static_cast<int>(h.size() / 2));
  state.step_ = step;
  state.h_ = std::move(h);
  state.v_ = std::move(v);
  state.refresh_norm();
  return state;
}

std::size_t WalkerState::index(int x) const {
  if (x < -capacity_ || x > capacity_) {
    throw DomainError(
        fmt::format("position {} outside lattice [-{}, {}]", x, capacity_, capacity_));
  }
  return static_cast<std::size_t>(x + capacity_);
}

double WalkerState::recompute_squared_norm() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < h_.size(); ++i) sum += std::norm(h_[i]) + std::norm(v_[i]);
  return sum;
}

void WalkerState::refresh_norm() { squared_norm_ = recompute_squared_norm(); }

WalkerState initial_state(double phi, int capacity) {
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
    throw DomainError(fmt::format("phi = {} rad outside [0, pi]", phi));
  }
  WalkerState state(capacity);
  const auto origin = static_cast<std::size_t>(capacity);
  state.h_[origin] = Amplitude(std::cos(phi), 0.0);
  state.v_[origin] = Amplitude(0.0, std::sin(phi));
  state.refresh_norm();
  return state;
}

WalkerState apply_coin(WalkerState state, double theta_deg) {
  return apply_coin(std::move(state), CoinMatrix::from_degrees(theta_deg));
}

WalkerState apply_coin(WalkerState state, const CoinMatrix& coin) {
  for (std::size_t i = 0; i < state.h_.size(); ++i) {
    const Amplitude a = state.h_[i];
    const Amplitude b = state.v_[i];
    state.h_[i] = coin.hh * a + coin.hv * b;
    state.v_[i] = coin.vh * a + coin.vv * b;
  }
  state.refresh_norm();
  return state;
}

WalkerState apply_loss(WalkerState state, double gamma) {
  check_gamma(gamma);
  if (gamma == 0.0) return state;
  const double factor = std::exp(-gamma);
  for (auto& b : state.v_) b *= factor;
  state.refresh_norm();
  return state;
}

WalkerState apply_shift(WalkerState state) {
  if (state.step_ >= state.capacity_) {
    throw CapacityError(fmt::format(
        "cannot shift past step {}: lattice allocated for {} steps", state.step_,
        state.capacity_));
  }
  if (state.h_.back() != Amplitude{} || state.v_.front() != Amplitude{}) {
    throw CapacityError("shift would push amplitude off the lattice edge");
  }
  std::shift_right(state.h_.begin(), state.h_.end(), 1);
  state.h_.front() = Amplitude{};
  std::shift_left(state.v_.begin(), state.v_.end(), 1);
  state.v_.back() = Amplitude{};
  ++state.step_;
  return state;
}

WalkerState step(WalkerState state, const WalkParams& params) {
  return apply_shift(apply_loss(apply_coin(std::move(state), params.theta_deg), params.gamma));
}

WalkerState evolve(const WalkParams& params) {
  params.validate();
  const CoinMatrix coin = CoinMatrix::from_degrees(params.theta_deg);
  WalkerState state = initial_state(params.phi, params.steps);
  for (int t = 0; t < params.steps; ++t) {
    state = apply_shift(apply_loss(apply_coin(std::move(state), coin), params.gamma));
  }
  return state;
}

}  // namespace dtqw
