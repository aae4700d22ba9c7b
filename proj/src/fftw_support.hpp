#pragma once

#include <cstddef>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace fbm::detail {

// FFTW planning is not thread safe; execution on separate arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using RealBuffer = std::unique_ptr<double[], FftwFree>;

inline ComplexBuffer make_complex_buffer(std::size_t m) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
}

inline RealBuffer make_real_buffer(std::size_t m) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
}

inline FftwPlan plan_dft(std::size_t m, fftw_complex* in, fftw_complex* out, int sign) {
  std::lock_guard lock(fftw_planner_mutex());
  return FftwPlan(fftw_plan_dft_1d(static_cast<int>(m), in, out, sign, FFTW_ESTIMATE));
}

inline FftwPlan plan_r2c(std::size_t m, double* in, fftw_complex* out) {
  std::lock_guard lock(fftw_planner_mutex());
  return FftwPlan(fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE));
}

inline FftwPlan plan_c2r(std::size_t m, fftw_complex* in, double* out) {
  std::lock_guard lock(fftw_planner_mutex());
  return FftwPlan(fftw_plan_dft_c2r_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE));
}

}  // namespace fbm::detail
