#include "chiarella/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chiarella/error.hpp"

namespace chiarella {

Histogram1D::Histogram1D(double lo, double hi, std::size_t n_bins)
    : lo_(lo), hi_(hi), counts_(n_bins, 0) {
  if (n_bins == 0 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidParameter, "histogram needs hi > lo and at least one bin");
  }
  width_ = (hi - lo) / static_cast<double>(n_bins);
  inv_width_ = 1.0 / width_;
}

void Histogram1D::merge(const Histogram1D& other) {
  if (other.lo_ != lo_ || other.hi_ != hi_ || other.counts_.size() != counts_.size()) {
    throw Error(ErrorCode::SupportMismatch, "histogram edges differ");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  outside_ += other.outside_;
}

std::vector<double> Histogram1D::edges() const {
  std::vector<double> e(counts_.size() + 1);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = lo_ + static_cast<double>(i) * width_;
  e.back() = hi_;
  return e;
}

double Histogram1D::density(std::size_t i) const noexcept {
  if (total_ == 0) return 0.0;
  return static_cast<double>(counts_[i]) / (static_cast<double>(total_) * width_);
}

Histogram1D build_histogram(std::span<const double> samples, std::size_t n_bins, double lo,
                            double hi) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  if (n_bins < 10) throw Error(ErrorCode::InvalidParameter, "n_bins must be >= 10");
  Histogram1D h(lo, hi, n_bins);
  for (double x : samples) h.add(x);
  return h;
}

Histogram1D build_histogram(std::span<const double> samples, std::size_t n_bins) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());
  double half = 6.0 * std::sqrt(var);
  // Constant input: any positive width puts everything in the central bin.
  if (!(half > 0.0)) half = std::max(1.0, std::abs(mean)) * 1e-6;
  return build_histogram(samples, n_bins, mean - half, mean + half);
}

}  // namespace chiarella
