#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dtqw {

using Amplitude = std::complex<double>;

/// Parameters of one deterministic walk.
///
/// The coin angle is in degrees, the initial-state angle in radians; both
/// follow the conventions under which the walk is usually quoted.
struct WalkParams {
  double theta_deg = 0.0;  // [0, 180]
  double phi = 0.0;        // [0, pi]
  double gamma = 0.0;      // >= 0
  int steps = 16;          // >= 0

  /// Throws DomainError when any field is out of range.
  void validate() const;
};

/// Real reflection-type coin (cos, sin; sin, -cos).
struct CoinMatrix {
  double hh = 1.0;
  double hv = 0.0;
  double vh = 0.0;
  double vv = -1.0;

  static CoinMatrix from_degrees(double theta_deg);

  double determinant() const { return hh * vv - hv * vh; }
};

/// H and V amplitudes on a fixed lattice x in [-capacity, capacity].
///
/// Amplitudes are kept unnormalized; under loss the squared norm is the
/// probability that the walker survived every attenuation so far.
class WalkerState {
 public:
  /// Empty lattice (all amplitudes zero) able to absorb `capacity` shifts.
  explicit WalkerState(int capacity);

  /// Builds a state from explicit amplitude arrays of length 2*capacity+1,
  /// index 0 corresponding to x = -capacity.
  static WalkerState from_amplitudes(int step, std::vector<Amplitude> h,
                                     std::vector<Amplitude> v);

  int step() const { return step_; }
  int capacity() const { return capacity_; }
  int min_position() const { return -capacity_; }
  int max_position() const { return capacity_; }
  std::size_t sites() const { return h_.size(); }

  Amplitude h(int x) const { return h_[index(x)]; }
  Amplitude v(int x) const { return v_[index(x)]; }

  std::span<const Amplitude> h_amplitudes() const { return h_; }
  std::span<const Amplitude> v_amplitudes() const { return v_; }

  double squared_norm() const { return squared_norm_; }

  /// Sum of |h|^2 + |v|^2, recomputed from scratch.
  double recompute_squared_norm() const;

  friend WalkerState apply_coin(WalkerState state, double theta_deg);
  friend WalkerState apply_coin(WalkerState state, const CoinMatrix& coin);
  friend WalkerState apply_loss(WalkerState state, double gamma);
  friend WalkerState apply_shift(WalkerState state);
  friend WalkerState initial_state(double phi, int capacity);

  bool operator==(const WalkerState&) const = default;

 private:
  std::size_t index(int x) const;
  void refresh_norm();

  int step_ = 0;
  int capacity_ = 0;
  std::vector<Amplitude> h_;
  std::vector<Amplitude> v_;
  double squared_norm_ = 0.0;
};

/// cos(phi)|H> + i sin(phi)|V> at the origin, on a lattice sized for
/// `capacity` steps.
WalkerState initial_state(double phi, int capacity = 0);

WalkerState apply_coin(WalkerState state, double theta_deg);
WalkerState apply_coin(WalkerState state, const CoinMatrix& coin);

/// Attenuates the V component by exp(-gamma); H is untouched.
WalkerState apply_loss(WalkerState state, double gamma);

/// H moves to x+1, V moves to x-1. Advances the step counter.
WalkerState apply_shift(WalkerState state);

/// One step: coin, then loss, then shift.
WalkerState step(WalkerState state, const WalkParams& params);

/// initial_state(phi) advanced by params.steps steps.
WalkerState evolve(const WalkParams& params);

}  // namespace dtqw
