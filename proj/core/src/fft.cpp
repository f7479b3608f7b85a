#include "kgl/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(p); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* p;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(p); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* p;
};

}  // namespace

struct PeriodicFFT::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PeriodicFFT::PeriodicFFT(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int rank = grid.axes();
  std::array<int, 4> dims{};
  for (int a = 0; a < rank; ++a) dims[a] = grid.m();
  spectrum_size_ = grid.size() / static_cast<std::size_t>(grid.m()) * static_cast<std::size_t>(grid.m() / 2 + 1);
  RealBuffer r(grid.size());
  ComplexBuffer c(spectrum_size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->forward = fftw_plan_dft_r2c(rank, dims.data(), r.p, c.p, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_c2r(rank, dims.data(), c.p, r.p, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw Error("fft: planning failed");
}

PeriodicFFT::~PeriodicFFT() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->backward);
}

std::array<double, 4> PeriodicFFT::frequencies(std::size_t k) const noexcept {
  std::array<double, 4> theta{};
  const int m = grid_.m();
  const int half = m / 2 + 1;
  const int rank = grid_.axes();
  std::size_t rest = k;
  // Half-spectrum layout: last axis has m/2 + 1 entries, others m.
  for (int a = rank - 1; a >= 0; --a) {
    const int len = (a == rank - 1) ? half : m;
    int c = static_cast<int>(rest % static_cast<std::size_t>(len));
    rest /= static_cast<std::size_t>(len);
    if (c > m / 2) c -= m;
    theta[a] = 2.0 * std::numbers::pi * c / m;
  }
  return theta;
}

std::vector<double> PeriodicFFT::tabulate(
    const std::function<double(const std::array<double, 4>&)>& symbol) const {
  std::vector<double> table(spectrum_size_);
  for (std::size_t k = 0; k < spectrum_size_; ++k) table[k] = symbol(frequencies(k));
  return table;
}

void PeriodicFFT::filter(std::span<const double> in, std::span<const double> multiplier,
                         std::span<double> out) const {
  const std::size_t N = grid_.size();
  RealBuffer r(N);
  ComplexBuffer c(spectrum_size_);
  std::copy(in.begin(), in.end(), r.p);
  fftw_execute_dft_r2c(plans_->forward, r.p, c.p);
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t k = 0; k < spectrum_size_; ++k) {
    const double f = multiplier[k] * scale;
    c.p[k][0] *= f;
    c.p[k][1] *= f;
  }
  fftw_execute_dft_c2r(plans_->backward, c.p, r.p);
  std::copy(r.p, r.p + N, out.begin());
}

}  // namespace kgl
