#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chiarella {

/// Equal-width histogram. Samples outside [edges.front(), edges.back()) are
/// tallied in `outside` and excluded from `total`.
class Histogram1D {
 public:
  Histogram1D() = default;
  Histogram1D(double lo, double hi, std::size_t n_bins);

  void add(double x) noexcept {
    const double pos = (x - lo_) * inv_width_;
    if (pos >= 0.0 && pos < static_cast<double>(counts_.size())) {
      ++counts_[static_cast<std::size_t>(pos)];
      ++total_;
    } else {
      ++outside_;
    }
  }

  /// Elementwise count sum; throws SupportMismatch unless edges agree.
  void merge(const Histogram1D& other);

  std::size_t n_bins() const noexcept { return counts_.size(); }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double bin_width() const noexcept { return width_; }
  double bin_center(std::size_t i) const noexcept { return lo_ + (static_cast<double>(i) + 0.5) * width_; }
  std::vector<double> edges() const;
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t outside() const noexcept { return outside_; }
  /// count / (total * width); zero when the histogram is empty.
  double density(std::size_t i) const noexcept;

  bool operator==(const Histogram1D&) const = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  double width_ = 0.0;
  double inv_width_ = 0.0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t outside_ = 0;
};

/// Histogram of raw samples; range defaults to mean +/- 6 std.
/// Throws EmptyInput for no samples, InvalidParameter for n_bins < 10.
Histogram1D build_histogram(std::span<const double> samples, std::size_t n_bins);
Histogram1D build_histogram(std::span<const double> samples, std::size_t n_bins, double lo, double hi);

/// Streaming raw power sums.
struct RawMoments {
  std::uint64_t count = 0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;

  void add(double x) noexcept {
    const double x2 = x * x;
    ++count;
    s1 += x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x2 * x2;
  }
  void merge(const RawMoments& o) noexcept {
    count += o.count;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
  }
  bool operator==(const RawMoments&) const = default;
};

}  // namespace chiarella
