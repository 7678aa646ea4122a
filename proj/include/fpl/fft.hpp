#pragma once

#include <complex>
#include <mutex>
#include <span>

namespace fpl::fft {

// FFTW's planner is not thread-safe; every plan creation and destruction
// goes through this mutex.
std::mutex& planner_mutex();

/// In-place unnormalized 3-D complex transform on an n^3 buffer.
class ComplexFft3d {
 public:
  explicit ComplexFft3d(int n);
  ~ComplexFft3d();
  ComplexFft3d(const ComplexFft3d&) = delete;
  ComplexFft3d& operator=(const ComplexFft3d&) = delete;

  int n() const { return n_; }
  std::span<std::complex<double>> buffer() { return {data_, size_}; }

  void forward();   // sum_x b(x) e^{-2 pi i k x / n}
  void backward();  // sum_k b(k) e^{+2 pi i k x / n}

 private:
  int n_;
  std::size_t size_;
  std::complex<double>* data_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Unnormalized 3-D real <-> half-complex transforms on an n^3 grid.
/// The half spectrum has shape n x n x (n/2+1).
class RealFft3d {
 public:
  explicit RealFft3d(int n);
  ~RealFft3d();
  RealFft3d(const RealFft3d&) = delete;
  RealFft3d& operator=(const RealFft3d&) = delete;

  int n() const { return n_; }
  int half_extent() const { return n_ / 2 + 1; }
  std::span<double> real() { return {real_, real_size_}; }
  std::span<std::complex<double>> half() { return {half_, half_size_}; }

  void to_real();      // half -> real; the half buffer is overwritten
  void to_spectral();  // real -> half

 private:
  int n_;
  std::size_t real_size_;
  std::size_t half_size_;
  double* real_;
  std::complex<double>* half_;
  void* r2c_plan_;
  void* c2r_plan_;
};

/// Real transforms on an m^3 lattice whose spectra are supported on the band
/// |k_0|, |k_1| < b, 0 <= k_2 < b of the half spectrum. The inverse skips the
/// all-zero lines, axis by axis. Three real slots share the plans.
class BandedRealFft3d {
 public:
  BandedRealFft3d(int m, int band);
  ~BandedRealFft3d();
  BandedRealFft3d(const BandedRealFft3d&) = delete;
  BandedRealFft3d& operator=(const BandedRealFft3d&) = delete;

  int n() const { return m_; }
  int band() const { return b_; }
  int half_extent() const { return m_ / 2 + 1; }
  std::span<double> real(int slot) { return {real_[slot], real_size_}; }
  std::span<std::complex<double>> half() { return {half_, half_size_}; }

  /// Zeroes the half spectrum ahead of scattering band coefficients.
  void clear();
  void to_real(int slot);      // band of half -> real slot; half is scratch
  void to_spectral(int slot);  // real slot -> full half spectrum

 private:
  int m_;
  int b_;
  std::size_t real_size_;
  std::size_t half_size_;
  double* real_[3];
  std::complex<double>* half_;
  bool upper_dirty_ = true;
  void* axis0_low_;
  void* axis0_high_;
  void* axis1_;
  void* axis2_;
  void* r2c_;
};

}  // namespace fpl::fft
