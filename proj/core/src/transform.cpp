#include "hyperns/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "hyperns/errors.hpp"

namespace hyperns {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": array has " + std::to_string(got) +
                                " entries, lattice needs " + std::to_string(want));
  }
}

}  // namespace

struct FourierTransform::Impl {
  Lattice lattice;
  fftw_complex* buffer = nullptr;
  fftw_plan forward_plan = nullptr;
  fftw_plan backward_plan = nullptr;

  explicit Impl(const Lattice& lat) : lattice(lat) {
    int dims[3] = {lat.n(), lat.n(), lat.n()};
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_complex(lat.size());
    if (buffer == nullptr) throw std::bad_alloc();
    // FFTW_ESTIMATE keeps plan choice, and therefore rounding, deterministic.
    forward_plan = fftw_plan_dft(lat.dim(), dims, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan = fftw_plan_dft(lat.dim(), dims, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_plan == nullptr || backward_plan == nullptr) {
      throw std::runtime_error("transform: FFTW planning failed");
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan != nullptr) fftw_destroy_plan(forward_plan);
    if (backward_plan != nullptr) fftw_destroy_plan(backward_plan);
    if (buffer != nullptr) fftw_free(buffer);
  }

  Complex* data() { return reinterpret_cast<Complex*>(buffer); }
};

FourierTransform::FourierTransform(const Lattice& lattice) : impl_(std::make_unique<Impl>(lattice)) {}
FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

const Lattice& FourierTransform::lattice() const { return impl_->lattice; }

void FourierTransform::forward(std::span<const double> physical, std::span<Complex> spectral) {
  const std::size_t size = impl_->lattice.size();
  check_size(physical.size(), size, "forward_transform");
  check_size(spectral.size(), size, "forward_transform");
  Complex* buf = impl_->data();
  for (std::size_t i = 0; i < size; ++i) buf[i] = Complex(physical[i], 0.0);
  fftw_execute(impl_->forward_plan);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) spectral[i] = buf[i] * scale;
  enforce_hermitian(impl_->lattice, spectral);
}

std::vector<Complex> FourierTransform::forward(std::span<const double> physical) {
  std::vector<Complex> out(impl_->lattice.size());
  forward(physical, out);
  return out;
}

void FourierTransform::inverse(std::span<const Complex> spectral, std::span<double> physical) {
  const std::size_t size = impl_->lattice.size();
  check_size(spectral.size(), size, "inverse_transform");
  check_size(physical.size(), size, "inverse_transform");
  Complex* buf = impl_->data();
  std::copy(spectral.begin(), spectral.end(), buf);
  fftw_execute(impl_->backward_plan);
  double peak = 0.0;
  double residue = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    peak = std::max(peak, std::abs(buf[i]));
    residue = std::max(residue, std::abs(buf[i].imag()));
    physical[i] = buf[i].real();
  }
  if (!(residue <= kImaginaryResidueTolerance * peak)) {
    throw InvariantError("inverse_transform: input is not Hermitian (imaginary residue " +
                         std::to_string(residue) + " vs peak " + std::to_string(peak) + ")");
  }
}

std::vector<double> FourierTransform::inverse(std::span<const Complex> spectral) {
  std::vector<double> out(impl_->lattice.size());
  inverse(spectral, out);
  return out;
}

void enforce_hermitian(const Lattice& lattice, std::span<Complex> c) {
  check_size(c.size(), lattice.size(), "enforce_hermitian");
  for (std::size_t f = 0; f < c.size(); ++f) {
    const std::size_t g = lattice.mirror(f);
    if (g < f) continue;
    if (g == f) {
      c[f] = Complex(c[f].real(), 0.0);
      continue;
    }
    const Complex avg = 0.5 * (c[f] + std::conj(c[g]));
    c[f] = avg;
    c[g] = std::conj(avg);
  }
}

double hermitian_defect(const Lattice& lattice, std::span<const Complex> c) {
  check_size(c.size(), lattice.size(), "hermitian_defect");
  double worst = 0.0;
  for (std::size_t f = 0; f < c.size(); ++f) {
    const double d = std::abs(c[lattice.mirror(f)] - std::conj(c[f]));
    if (std::isnan(d)) return d;
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace hyperns

namespace hyperns {

std::vector<Complex> forward_transform(const Lattice& lattice, std::span<const double> physical) {
  FourierTransform t(lattice);
  return t.forward(physical);
}

std::vector<double> inverse_transform(const Lattice& lattice, std::span<const Complex> spectral) {
  FourierTransform t(lattice);
  return t.inverse(spectral);
}

}  // namespace hyperns
