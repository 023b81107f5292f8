#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "polykin/common.hpp"

namespace polykin {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Batch-means error estimate over a fixed number of batches; sample k of n
// lands in batch k*B/n, so batches stay balanced for any n >= B.
class BatchAccumulator {
 public:
  static constexpr int kBatches = 32;

  explicit BatchAccumulator(std::int64_t n_total) : n_total_(n_total) {
    if (n_total < kBatches)
      throw validation_error("batch accumulator: need at least 32 samples");
    sums_.fill(0.0);
    counts_.fill(0);
  }

  void add(std::int64_t index, double value) {
    int b = static_cast<int>(index * kBatches / n_total_);
    sums_[b] += value;
    counts_[b] += 1;
  }

  McEstimate finish(std::uint64_t seed) const {
    double mean = 0.0;
    std::int64_t n = 0;
    for (int b = 0; b < kBatches; ++b) {
      mean += sums_[b];
      n += counts_[b];
    }
    mean /= static_cast<double>(n);
    // Variance of the overall mean from the spread of batch means.
    double var = 0.0;
    for (int b = 0; b < kBatches; ++b) {
      double bm = sums_[b] / static_cast<double>(counts_[b]);
      var += (bm - mean) * (bm - mean);
    }
    var /= static_cast<double>(kBatches) * (kBatches - 1);
    McEstimate est;
    est.value = mean;
    est.std_error = std::sqrt(var);
    est.n_samples = n;
    est.seed = seed;
    return est;
  }

 private:
  std::int64_t n_total_;
  std::array<double, kBatches> sums_;
  std::array<std::int64_t, kBatches> counts_;
};

}  // namespace polykin
