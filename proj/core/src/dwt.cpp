#include "gcabulf/dwt.hpp"

#include <cmath>

#include "gcabulf/errors.hpp"

namespace gcabulf {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

constexpr std::array<double, 2> kHaar{kInvSqrt2, kInvSqrt2};

// Daubechies, 4 vanishing moments (8 taps).
constexpr std::array<double, 8> kDb4{
    0.23037781330885523, 0.7148465705525415,   0.6308807679295904,   -0.02798376941698385,
    -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278,
};

struct ModwtFilters {
  std::vector<double> low;   // g / sqrt(2)
  std::vector<double> high;  // h / sqrt(2), h_l = (-1)^l g_{L-1-l}
};

ModwtFilters modwt_filters(WaveletFamily family) {
  const auto g = scaling_filter(family);
  const std::size_t len = g.size();
  ModwtFilters f;
  for (std::size_t l = 0; l < len; ++l) {
    f.low.push_back(g[l] * kInvSqrt2);
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    f.high.push_back(sign * g[len - 1 - l] * kInvSqrt2);
  }
  return f;
}

// One analysis step at dilation `stride`: out_t = sum_l filter_l * in_{(t - stride*l) mod n}.
void analysis(const std::vector<double>& in, const std::vector<double>& filter, std::size_t stride,
              std::vector<double>& out) {
  const std::size_t n = in.size();
  out.assign(n, 0.0);
  for (std::size_t l = 0; l < filter.size(); ++l) {
    const std::size_t shift = (stride * l) % n;
    const double c = filter[l];
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t src = t >= shift ? t - shift : t + n - shift;
      out[t] += c * in[src];
    }
  }
}

// Adjoint of `analysis`: out_t += sum_l filter_l * in_{(t + stride*l) mod n}.
void synthesis_add(const std::vector<double>& in, const std::vector<double>& filter, std::size_t stride,
                   std::vector<double>& out) {
  const std::size_t n = in.size();
  for (std::size_t l = 0; l < filter.size(); ++l) {
    const std::size_t shift = (stride * l) % n;
    const double c = filter[l];
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t src = t + shift;
      if (src >= n) src -= n;
      out[t] += c * in[src];
    }
  }
}

// Propagates a level-`level` smooth back to the original resolution through the low-pass path.
std::vector<double> smooth_to_signal(std::vector<double> v, std::size_t level, const ModwtFilters& f) {
  std::vector<double> prev;
  for (std::size_t j = level; j >= 1; --j) {
    prev.assign(v.size(), 0.0);
    synthesis_add(v, f.low, std::size_t{1} << (j - 1), prev);
    v.swap(prev);
  }
  return v;
}

}  // namespace

std::string to_string(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::Haar:
      return "haar";
    case WaveletFamily::Db4:
      return "db4";
  }
  return "haar";
}

WaveletFamily wavelet_family_from_string(const std::string& name) {
  if (name == "haar") return WaveletFamily::Haar;
  if (name == "db4") return WaveletFamily::Db4;
  throw UsageError("unknown wavelet family '" + name + "' (expected haar or db4)");
}

std::span<const double> scaling_filter(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::Haar:
      return kHaar;
    case WaveletFamily::Db4:
      return kDb4;
  }
  return kHaar;
}

DwtStack decompose(std::span<const double> signal, WaveletFamily family) {
  const std::size_t n = signal.size();
  if (n < (std::size_t{1} << kDwtLevels)) {
    throw DataError("decompose: signal length " + std::to_string(n) + " is shorter than 2^" +
                    std::to_string(kDwtLevels));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(signal[i])) throw DataError("decompose: non-finite sample at index " + std::to_string(i));
  }
  const auto f = modwt_filters(family);

  DwtStack out;
  out.family = family;
  std::vector<double> v(signal.begin(), signal.end());
  std::vector<double> w, next;
  for (std::size_t j = 1; j <= kDwtLevels; ++j) {
    const std::size_t stride = std::size_t{1} << (j - 1);
    analysis(v, f.high, stride, w);
    analysis(v, f.low, stride, next);

    // Detail component D_j: synthesize W_j alone, then carry it down the low-pass path.
    std::vector<double> detail(n, 0.0);
    synthesis_add(w, f.high, stride, detail);
    out.highs[j - 1] = smooth_to_signal(std::move(detail), j - 1, f);
    v.swap(next);
  }
  out.low = smooth_to_signal(std::move(v), kDwtLevels, f);
  return out;
}

std::vector<double> causal_band_window(const LoadSeries& series, std::size_t t, std::size_t tau,
                                       std::size_t buffer_len, WaveletFamily family) {
  if (tau == 0) throw UsageError("causal_band_window: tau must be positive");
  if (buffer_len < (std::size_t{1} << kDwtLevels) || buffer_len < tau) {
    throw UsageError("causal_band_window: buffer length must be at least max(2^4, tau)");
  }
  if (t < buffer_len || t > series.size()) {
    throw DataError("causal_band_window: insufficient history before position " + std::to_string(t));
  }
  const std::size_t first = t - buffer_len;
  for (std::size_t i = first; i < t; ++i) {
    if (!series.valid(i)) throw DataError("causal_band_window: invalid sample at index " + std::to_string(i));
  }
  const auto stack = decompose(series.values().subspan(first, buffer_len), family);
  std::vector<double> out;
  out.reserve(tau * kDwtBands);
  for (std::size_t r = buffer_len - tau; r < buffer_len; ++r) {
    out.push_back(stack.low[r]);
    for (const auto& h : stack.highs) out.push_back(h[r]);
  }
  return out;
}

}  // namespace gcabulf
