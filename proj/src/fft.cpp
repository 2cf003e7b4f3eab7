#include "ftk/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "ftk/errors.hpp"

namespace ftk {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftPlan::Impl {
  fftw_plan in_place = nullptr;
  fftw_plan out_of_place = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (in_place) fftw_destroy_plan(in_place);
    if (out_of_place) fftw_destroy_plan(out_of_place);
  }
};

FftPlan::FftPlan(std::vector<int> dims, FftDirection direction, int batch)
    : impl_(std::make_unique<Impl>()), batch_(batch) {
  if (dims.empty() || batch < 1) throw ArgumentError("FftPlan: empty shape or batch < 1");
  size_ = 1;
  for (int d : dims) {
    if (d < 1) throw ArgumentError("FftPlan: non-positive dimension");
    size_ *= d;
  }
  const int sign = direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int rank = static_cast<int>(dims.size());

  std::vector<fftw_complex> a(static_cast<std::size_t>(size_) * batch);
  std::vector<fftw_complex> b(static_cast<std::size_t>(size_) * batch);
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->in_place = fftw_plan_many_dft(rank, dims.data(), batch, a.data(), nullptr, 1, size_,
                                       a.data(), nullptr, 1, size_, sign, flags);
  impl_->out_of_place = fftw_plan_many_dft(rank, dims.data(), batch, a.data(), nullptr, 1,
                                           size_, b.data(), nullptr, 1, size_, sign, flags);
  if (!impl_->in_place || !impl_->out_of_place) throw NumericalError("FftPlan: planning failed");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(const cdouble* in, cdouble* out) const {
  // fftw_complex is layout-compatible with std::complex<double>.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in));
  auto* dst = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(in == out ? impl_->in_place : impl_->out_of_place, src, dst);
}

const FftPlan& cached_fft_plan(int size, FftDirection direction, int batch) {
  thread_local std::map<std::tuple<int, int, int>, FftPlan> cache;
  const auto key = std::make_tuple(size, static_cast<int>(direction), batch);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, FftPlan({size}, direction, batch)).first;
  return it->second;
}

}  // namespace ftk
