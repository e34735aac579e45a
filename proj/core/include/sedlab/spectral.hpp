#pragma once

#include <cstddef>
#include <vector>

namespace sedlab {

/// Lowest levels of a confined 1D system together with the ground-state
/// transition data: frequencies[k] = (levels[k] - levels[0]) / hbar and
/// dipoles[k] = <k|x|0>. Entry 0 is the ground state itself.
struct SpectralData {
  std::vector<double> levels;
  std::vector<double> frequencies;
  std::vector<double> dipoles;

  std::size_t size() const { return levels.size(); }

  /// Fills frequencies from the levels.
  static SpectralData from_levels(std::vector<double> levels, std::vector<double> dipoles,
                                  double hbar);

  /// Throws std::invalid_argument on empty or inconsistent data, a ground
  /// level that is not the lowest, or negative frequencies.
  void validate() const;
};

}  // namespace sedlab
