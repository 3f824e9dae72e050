#include "dtqw/observables.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dtqw/error.hpp"

namespace dtqw {

namespace {

constexpr double kDegenerateNorm = 1e-300;
constexpr double kEigenSlack = 1e-10;

double checked_norm(const WalkerState& state) {
  const double norm = state.squared_norm();
  if (!(norm > kDegenerateNorm)) {
    throw DegenerateStateError(fmt::format(
        "state at step {} is fully attenuated (squared norm {})", state.step(), norm));
  }
  return norm;
}

std::size_t offset_of(const PositionDistribution& d, int x) {
  if (x < d.first_position || x > d.last_position()) {
    throw DomainError(fmt::format("position {} outside distribution [{}, {}]", x,
                                  d.first_position, d.last_position()));
  }
  return static_cast<std::size_t>(x - d.first_position);
}

double clamp_eigenvalue(double lambda) {
  if (lambda < -kEigenSlack || lambda > 1.0 + kEigenSlack) {
    throw NumericalError(fmt::format("eigenvalue {} outside [0, 1]", lambda));
  }
  return std::clamp(lambda, 0.0, 1.0);
}

}  // namespace

double PositionDistribution::total_at(int x) const { return p_total[offset_of(*this, x)]; }
double PositionDistribution::h_at(int x) const { return p_h[offset_of(*this, x)]; }
double PositionDistribution::v_at(int x) const { return p_v[offset_of(*this, x)]; }

int PositionDistribution::argmax() const {
  const auto it = std::max_element(p_total.begin(), p_total.end());
  return first_position + static_cast<int>(it - p_total.begin());
}

double PositionDistribution::max() const {
  return *std::max_element(p_total.begin(), p_total.end());
}

void ReducedDensityMatrix::validate() const {
  if (std::abs(alpha + beta - 1.0) > 1e-10) {
    throw NumericalError(fmt::format("trace {} != 1", alpha + beta));
  }
  if (alpha < -1e-10 || beta < -1e-10 || determinant() < -1e-12) {
    throw NumericalError(fmt::format(
        "density matrix not positive semidefinite (alpha {}, beta {}, |chi|^2 {})", alpha,
        beta, std::norm(chi)));
  }
}

PositionDistribution position_distribution(const WalkerState& state) {
  const double norm = checked_norm(state);
  PositionDistribution dist;
  dist.step = state.step();
  dist.first_position = state.min_position();
  const auto h = state.h_amplitudes();
  const auto v = state.v_amplitudes();
  dist.p_h.resize(h.size());
  dist.p_v.resize(h.size());
  dist.p_total.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    dist.p_h[i] = std::norm(h[i]) / norm;
    dist.p_v[i] = std::norm(v[i]) / norm;
    dist.p_total[i] = dist.p_h[i] + dist.p_v[i];
  }
  return dist;
}

double ipr(const PositionDistribution& dist) {
  double sum = 0.0;
  for (double p : dist.p_total) sum += p * p;
  return sum;
}

ReducedDensityMatrix reduced_density_matrix(const WalkerState& state) {
  const double norm = checked_norm(state);
  const auto h = state.h_amplitudes();
  const auto v = state.v_amplitudes();
  double alpha = 0.0;
  double beta = 0.0;
  std::complex<double> chi{};
  for (std::size_t i = 0; i < h.size(); ++i) {
    alpha += std::norm(h[i]);
    beta += std::norm(v[i]);
    chi += h[i] * std::conj(v[i]);
  }
  return ReducedDensityMatrix{alpha / norm, beta / norm, chi / norm};
}

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

EntropyValue entanglement_entropy(const ReducedDensityMatrix& rho) {
  rho.validate();
  double discriminant = 1.0 - 4.0 * rho.determinant();
  if (discriminant < -kEigenSlack) {
    throw NumericalError(fmt::format("negative eigenvalue discriminant {}", discriminant));
  }
  discriminant = std::max(discriminant, 0.0);
  const double root = std::sqrt(discriminant);
  EntropyValue out;
  out.lambda1 = clamp_eigenvalue((1.0 + root) / 2.0);
  out.lambda2 = clamp_eigenvalue((1.0 - root) / 2.0);
  out.s_e = std::clamp(entropy_term(out.lambda1) + entropy_term(out.lambda2), 0.0, 1.0);
  return out;
}

Observables measure(const WalkerState& state) {
  Observables out;
  out.distribution = position_distribution(state);
  out.rho = reduced_density_matrix(state);
  out.entropy = entanglement_entropy(out.rho);
  out.ipr = ipr(out.distribution);
  out.survival = state.squared_norm();
  return out;
}

}  // namespace dtqw
