#pragma once

#include <span>
#include <vector>

namespace sedlab {

/// Positions and momenta of an ensemble at one time; the Monte Carlo stand-in
/// for the phase-space density Q(x, p, t).
struct EnsembleState {
  std::vector<double> positions;
  std::vector<double> momenta;
  double t = 0.0;

  std::size_t size() const { return positions.size(); }
};

/// Concatenates snapshots into one sample; t is the mean snapshot time.
EnsembleState pool(std::span<const EnsembleState> snapshots);

}  // namespace sedlab
