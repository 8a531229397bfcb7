#include "sgfv/fft.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "sgfv/error.hpp"

namespace sgfv {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Fft1d::Fft1d(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) throw UsageError("Fft1d: length must be a power of two");
  bitrev_.resize(n);
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2 + 1);
  for (std::size_t k = 0; k < twiddle_.size(); ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Fft1d::transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) throw UsageError("Fft1d: data length mismatch");
  for (std::size_t i = 0; i < n_; ++i)
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        std::complex<double> w = twiddle_[j * step];
        if (inverse) w = std::conj(w);
        const std::complex<double> t = w * data[start + j + half];
        data[start + j + half] = data[start + j] - t;
        data[start + j] += t;
      }
    }
  }
}

FftNd::FftNd(std::vector<int> dims) : dims_(std::move(dims)) {
  for (int n : dims_) {
    size_ *= static_cast<std::size_t>(n);
    plans_.emplace_back(static_cast<std::size_t>(n));
  }
}

void FftNd::forward(std::span<std::complex<double>> data) const { apply(data, false); }

void FftNd::inverse(std::span<std::complex<double>> data) const {
  apply(data, true);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v *= scale;
}

void FftNd::apply(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != size_) throw UsageError("FftNd: data length mismatch");
  const int d = static_cast<int>(dims_.size());
  std::size_t stride = 1;
  std::vector<std::complex<double>> line;
  for (int a = d - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(dims_[a]);
    line.resize(n);
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < size_; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t i = 0; i < n; ++i) line[i] = data[base + i * stride];
        plans_[a].transform(line, inverse);
        for (std::size_t i = 0; i < n; ++i) data[base + i * stride] = line[i];
      }
    }
    stride = block;
  }
}

void dft_nd(const std::vector<int>& dims, std::span<std::complex<double>> data, bool inverse) {
  std::size_t total = 1;
  for (int n : dims) total *= static_cast<std::size_t>(n);
  if (data.size() != total) throw UsageError("dft_nd: data length mismatch");
  std::size_t stride = 1;
  std::vector<std::complex<double>> line, out;
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(dims[a]);
    const bool radix2 = is_power_of_two(n);
    std::optional<Fft1d> plan;
    std::vector<std::complex<double>> roots;
    if (radix2) {
      plan.emplace(n);
    } else {
      roots.resize(n);
      const double sign = inverse ? 2.0 : -2.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double angle = sign * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        roots[k] = {std::cos(angle), std::sin(angle)};
      }
    }
    line.resize(n);
    out.resize(n);
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < total; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t i = 0; i < n; ++i) line[i] = data[base + i * stride];
        if (radix2) {
          plan->transform(line, inverse);
          for (std::size_t i = 0; i < n; ++i) data[base + i * stride] = line[i];
        } else {
          for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += line[j] * roots[(j * k) % n];
            data[base + k * stride] = acc;
          }
        }
      }
    }
    stride = block;
  }
}

}  // namespace sgfv
