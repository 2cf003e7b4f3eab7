#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace ftk {

using cdouble = std::complex<double>;

enum class FftDirection { Forward, Backward };

/// Batched unnormalized complex DFT over contiguous arrays. Forward uses
/// exp(-2 pi i jk/n). Plans are immutable after construction and execute()
/// may be called concurrently on distinct buffers.
class FftPlan {
 public:
  FftPlan(std::vector<int> dims, FftDirection direction, int batch = 1);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// Elements in one transform.
  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] int batch() const { return batch_; }

  /// in and out each hold batch() * size() values; in-place is allowed.
  void execute(const cdouble* in, cdouble* out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int size_ = 0;
  int batch_ = 0;
};

/// Per-thread cache of one-dimensional batched plans.
const FftPlan& cached_fft_plan(int size, FftDirection direction, int batch = 1);

}  // namespace ftk
