#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcabulf/series.hpp"

namespace gcabulf {

enum class WaveletFamily { Haar, Db4 };

std::string to_string(WaveletFamily family);
WaveletFamily wavelet_family_from_string(const std::string& name);

inline constexpr std::size_t kDwtLevels = 4;
inline constexpr std::size_t kDwtBands = kDwtLevels + 1;

/// Undecimated multiresolution analysis: low + sum(highs) reproduces the input.
struct DwtStack {
  std::vector<double> low;                         // smooth at the coarsest level
  std::array<std::vector<double>, kDwtLevels> highs;  // highs[0] is the finest detail
  WaveletFamily family = WaveletFamily::Haar;

  std::size_t size() const { return low.size(); }
};

/// Scaling (low-pass) filter with unit L2 norm and sum sqrt(2).
std::span<const double> scaling_filter(WaveletFamily family);

/// MODWT pyramid with circular boundary handling, followed by per-level synthesis of the
/// detail and smooth components. Requires signal.size() >= 2^4 and finite samples.
DwtStack decompose(std::span<const double> signal, WaveletFamily family = WaveletFamily::Haar);

/// tau x 5 row-major matrix [low, D1, D2, D3, D4] covering steps [t - tau, t), computed from the
/// decomposition of the trailing `buffer_len` samples only. Never reads index >= t.
std::vector<double> causal_band_window(const LoadSeries& series, std::size_t t, std::size_t tau,
                                       std::size_t buffer_len, WaveletFamily family = WaveletFamily::Haar);

}  // namespace gcabulf
