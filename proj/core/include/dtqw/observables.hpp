#pragma once

#include <complex>
#include <vector>

#include "dtqw/walk.hpp"

namespace dtqw {

/// Normalized per-site detection probabilities, split by polarization.
struct PositionDistribution {
  int step = 0;
  int first_position = 0;  // x of element 0
  std::vector<double> p_h;
  std::vector<double> p_v;
  std::vector<double> p_total;

  std::size_t sites() const { return p_total.size(); }
  int last_position() const { return first_position + static_cast<int>(sites()) - 1; }
  double total_at(int x) const;
  double h_at(int x) const;
  double v_at(int x) const;
  /// Position of the largest p_total; the leftmost one on ties.
  int argmax() const;
  double max() const;
};

/// Coin state after tracing out position: (alpha, chi; conj(chi), beta).
struct ReducedDensityMatrix {
  double alpha = 1.0;
  double beta = 0.0;
  std::complex<double> chi{};

  /// alpha*beta - |chi|^2, i.e. the determinant; zero for a pure coin state.
  double determinant() const { return alpha * beta - std::norm(chi); }
  /// Throws NumericalError unless trace is 1 and the matrix is PSD
  /// (within 1e-10 / 1e-12).
  void validate() const;
};

struct EntropyValue {
  double s_e = 0.0;
  double lambda1 = 1.0;  // larger eigenvalue
  double lambda2 = 0.0;
};

/// Throws DegenerateStateError when the state has no surviving norm.
PositionDistribution position_distribution(const WalkerState& state);

/// Sum over sites of p_total^2.
double ipr(const PositionDistribution& dist);

ReducedDensityMatrix reduced_density_matrix(const WalkerState& state);

/// Von Neumann entropy (base 2) from the closed-form 2x2 eigenvalues.
EntropyValue entanglement_entropy(const ReducedDensityMatrix& rho);

/// -p log2 p with the 0 log 0 = 0 convention.
double entropy_term(double p);

/// All derived quantities of one state in one pass.
struct Observables {
  PositionDistribution distribution;
  ReducedDensityMatrix rho;
  EntropyValue entropy;
  double ipr = 0.0;
  double survival = 0.0;  // unnormalized squared norm
};

Observables measure(const WalkerState& state);

}  // namespace dtqw
