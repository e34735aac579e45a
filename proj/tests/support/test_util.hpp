#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "sedlab/ensemble_state.hpp"
#include "sedlab/grid.hpp"

namespace testutil {

inline std::vector<double> gaussian_pdf(const sedlab::Grid1D& g, double mean, double var) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.x(i) - mean;
    out[i] = std::exp(-d * d / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
  }
  return out;
}

// x ~ N(mx, sx^2), p ~ N(mp, sp^2), independent.
inline sedlab::EnsembleState normal_ensemble(std::size_t n, double sx, double sp, std::uint64_t seed,
                                             double mx = 0.0, double mp = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nx(mx, sx), np(mp, sp);
  sedlab::EnsembleState e;
  for (std::size_t i = 0; i < n; ++i) {
    e.positions.push_back(nx(rng));
    e.momenta.push_back(np(rng));
  }
  return e;
}

}  // namespace testutil
