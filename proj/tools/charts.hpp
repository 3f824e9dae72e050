#pragma once

#include <span>
#include <string>

#include "dtqw/emulator.hpp"
#include "dtqw/observables.hpp"
#include "dtqw/sweep.hpp"

namespace dtqw::plot {

/// Grouped H/V bars per position.
std::string distribution_chart(const PositionDistribution& dist, const WalkParams& params);

/// S_E and IPR versus theta, one line per second-axis value.
std::string curves_chart(const SweepResult& result);

/// S_E and IPR maps over theta x second axis.
std::string heatmap_chart(const SweepResult& result);

/// Reconstructed S_E and IPR with error bars versus gamma, exact values as lines.
std::string tomography_chart(std::span<const EmulationRun> runs);

}  // namespace dtqw::plot
