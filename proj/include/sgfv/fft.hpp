#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sgfv {

bool is_power_of_two(std::size_t n) noexcept;

/// In-place iterative radix-2 transform of a fixed power-of-two length.
class Fft1d {
 public:
  explicit Fft1d(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  /// Unnormalized: forward uses e^{-2 pi i jk/n}, inverse e^{+2 pi i jk/n}.
  void transform(std::span<std::complex<double>> data, bool inverse) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;
};

/// Separable multi-dimensional transform over a row-major array.
class FftNd {
 public:
  explicit FftNd(std::vector<int> dims);

  const std::vector<int>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return size_; }

  void forward(std::span<std::complex<double>> data) const;
  /// Includes the 1/size normalization.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  void apply(std::span<std::complex<double>> data, bool inverse) const;

  std::vector<int> dims_;
  std::size_t size_ = 1;
  std::vector<Fft1d> plans_;
};

/// Unnormalized separable transform of a row-major array of any shape: radix-2
/// per axis where possible, a direct O(M^2) sum along the other axes.
void dft_nd(const std::vector<int>& dims, std::span<std::complex<double>> data, bool inverse);

}  // namespace sgfv
