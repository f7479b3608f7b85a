#pragma once

#include <functional>
#include <memory>
#include <span>

#include "kgl/grid.hpp"

namespace kgl {

/// Real-to-complex transforms over all 2n axes of a periodic grid.
///
/// Plans are created once; `filter` may be called concurrently from several
/// threads since every call uses its own buffers.
class PeriodicFFT {
 public:
  explicit PeriodicFFT(const GridSpec& grid);
  ~PeriodicFFT();
  PeriodicFFT(const PeriodicFFT&) = delete;
  PeriodicFFT& operator=(const PeriodicFFT&) = delete;

  const GridSpec& grid() const noexcept { return grid_; }

  /// Number of complex coefficients in the half spectrum.
  std::size_t spectrum_size() const noexcept { return spectrum_size_; }

  /// Angular frequencies theta_a in (-pi, pi] for half-spectrum entry k.
  std::array<double, 4> frequencies(std::size_t k) const noexcept;

  /// out = IFFT(multiplier(k) * FFT(in)) / N, with `multiplier` evaluated on
  /// the precomputed table passed in (one real per spectrum entry).
  void filter(std::span<const double> in, std::span<const double> multiplier,
              std::span<double> out) const;

  /// Precompute a multiplier table from a symbol function of theta.
  std::vector<double> tabulate(const std::function<double(const std::array<double, 4>&)>& symbol) const;

 private:
  GridSpec grid_;
  std::size_t spectrum_size_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace kgl
