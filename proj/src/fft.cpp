#include "fpl/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <new>

namespace fpl::fft {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

template <typename T>
T* checked_alloc(std::size_t count) {
  void* p = fftw_malloc(sizeof(T) * count);
  if (p == nullptr) throw std::bad_alloc();
  return static_cast<T*>(p);
}

}  // namespace

ComplexFft3d::ComplexFft3d(int n)
    : n_(n), size_(static_cast<std::size_t>(n) * n * n) {
  data_ = checked_alloc<std::complex<double>>(size_);
  auto* raw = reinterpret_cast<fftw_complex*>(data_);
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps plans (and therefore rounding) identical run to run.
  forward_plan_ = fftw_plan_dft_3d(n, n, n, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_3d(n, n, n, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft3d::~ComplexFft3d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(data_);
}

void ComplexFft3d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void ComplexFft3d::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

RealFft3d::RealFft3d(int n)
    : n_(n),
      real_size_(static_cast<std::size_t>(n) * n * n),
      half_size_(static_cast<std::size_t>(n) * n * (n / 2 + 1)) {
  real_ = checked_alloc<double>(real_size_);
  half_ = checked_alloc<std::complex<double>>(half_size_);
  auto* h = reinterpret_cast<fftw_complex*>(half_);
  std::lock_guard lock(planner_mutex());
  r2c_plan_ = fftw_plan_dft_r2c_3d(n, n, n, real_, h, FFTW_ESTIMATE);
  c2r_plan_ = fftw_plan_dft_c2r_3d(n, n, n, h, real_, FFTW_ESTIMATE);
}

RealFft3d::~RealFft3d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(r2c_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(c2r_plan_));
  fftw_free(real_);
  fftw_free(half_);
}

void RealFft3d::to_real() { fftw_execute(static_cast<fftw_plan>(c2r_plan_)); }
void RealFft3d::to_spectral() { fftw_execute(static_cast<fftw_plan>(r2c_plan_)); }

BandedRealFft3d::BandedRealFft3d(int m, int band)
    : m_(m),
      b_(band),
      real_size_(static_cast<std::size_t>(m) * m * m),
      half_size_(static_cast<std::size_t>(m) * m * (m / 2 + 1)) {
  for (auto& r : real_) r = checked_alloc<double>(real_size_);
  half_ = checked_alloc<std::complex<double>>(half_size_);
  auto* h = reinterpret_cast<fftw_complex*>(half_);
  const int mh = m / 2 + 1;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  // Axis 0 over the two occupied k_1 blocks, then axis 1 everywhere with
  // k_2 < b, then axis 2 complex-to-real.
  fftw_iodim line0{m, m * mh, m * mh};
  fftw_iodim low[2] = {{b_, mh, mh}, {b_, 1, 1}};
  fftw_iodim high[2] = {{b_ - 1, mh, mh}, {b_, 1, 1}};
  axis0_low_ = fftw_plan_guru_dft(1, &line0, 2, low, h, h, FFTW_BACKWARD, flags);
  axis0_high_ = fftw_plan_guru_dft(1, &line0, 2, high, h, h, FFTW_BACKWARD, flags);
  fftw_iodim line1{m, mh, mh};
  fftw_iodim all1[2] = {{m, m * mh, m * mh}, {b_, 1, 1}};
  axis1_ = fftw_plan_guru_dft(1, &line1, 2, all1, h, h, FFTW_BACKWARD, flags);
  fftw_iodim line2{m, 1, 1};
  fftw_iodim all2{m * m, mh, m};
  axis2_ = fftw_plan_guru_dft_c2r(1, &line2, 1, &all2, h, real_[0], flags | FFTW_PRESERVE_INPUT);
  r2c_ = fftw_plan_dft_r2c_3d(m, m, m, real_[0], h, flags);
}

BandedRealFft3d::~BandedRealFft3d() {
  std::lock_guard lock(planner_mutex());
  for (void* p : {axis0_low_, axis0_high_, axis1_, axis2_, r2c_})
    fftw_destroy_plan(static_cast<fftw_plan>(p));
  for (auto* r : real_) fftw_free(r);
  fftw_free(half_);
}

void BandedRealFft3d::clear() {
  if (upper_dirty_) {
    std::fill(half_, half_ + half_size_, std::complex<double>(0.0));
    upper_dirty_ = false;
    return;
  }
  // Only k_2 < b is touched by the inverse passes.
  const std::size_t mh = m_ / 2 + 1;
  for (std::size_t row = 0; row < std::size_t(m_) * m_; ++row)
    std::fill(half_ + row * mh, half_ + row * mh + b_, std::complex<double>(0.0));
}

void BandedRealFft3d::to_real(int slot) {
  auto* h = reinterpret_cast<fftw_complex*>(half_);
  const std::size_t mh = m_ / 2 + 1;
  fftw_execute_dft(static_cast<fftw_plan>(axis0_low_), h, h);
  fftw_complex* hi = h + (m_ - b_ + 1) * mh;
  fftw_execute_dft(static_cast<fftw_plan>(axis0_high_), hi, hi);
  fftw_execute_dft(static_cast<fftw_plan>(axis1_), h, h);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(axis2_), h, real_[slot]);
}

void BandedRealFft3d::to_spectral(int slot) {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), real_[slot],
                       reinterpret_cast<fftw_complex*>(half_));
  upper_dirty_ = true;
}

}  // namespace fpl::fft
