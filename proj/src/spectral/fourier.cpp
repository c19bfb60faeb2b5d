#include <fftw3.h>

#include <mutex>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

// The FFTW planner is not reentrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FourierTransform::FourierTransform(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  int dims[3] = {grid.points, grid.points, grid.points};
  Field scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  // Estimate-mode plans are deterministic from run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft(grid.dim, dims, buf, buf, FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft(grid.dim, dims, buf, buf, FFTW_BACKWARD, flags);
  if (!forward_plan_ || !inverse_plan_) throw NumericalError("FFT planning failed");
}

FourierTransform::~FourierTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FourierTransform::forward(std::span<cplx> data) const {
  if (data.size() != grid_.size()) throw SpecError("shape mismatch in forward transform");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void FourierTransform::inverse(std::span<cplx> data) const {
  if (data.size() != grid_.size()) throw SpecError("shape mismatch in inverse transform");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

}  // namespace nlslab
