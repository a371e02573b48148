#include "pnm/fft.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

namespace pnm {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft1D::Fft1D(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  rbuf_ = fftw_alloc_real(n);
  auto* c = fftw_alloc_complex(n / 2 + 1);
  cbuf_ = c;
  fwd_ = fftw_plan_dft_r2c_1d(n, rbuf_, c, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(n, c, rbuf_, FFTW_ESTIMATE);
}

Fft1D::~Fft1D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
}

void Fft1D::forward(const std::vector<double>& in, std::vector<cplx>& out) {
  std::copy(in.begin(), in.begin() + n_, rbuf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  auto* c = static_cast<fftw_complex*>(cbuf_);
  out.resize(n_ / 2 + 1);
  for (int i = 0; i <= n_ / 2; ++i) out[i] = {c[i][0], c[i][1]};
}

void Fft1D::inverse(const std::vector<cplx>& in, std::vector<double>& out) {
  auto* c = static_cast<fftw_complex*>(cbuf_);
  for (int i = 0; i <= n_ / 2; ++i) {
    c[i][0] = in[i].real();
    c[i][1] = in[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inv_));
  out.resize(n_);
  const double s = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = rbuf_[i] * s;
}

Fft2D::Fft2D(int n1, int n2) : n1_(n1), n2_(n2) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  rbuf_ = fftw_alloc_real(static_cast<std::size_t>(n1) * n2);
  auto* c = fftw_alloc_complex(static_cast<std::size_t>(n1) * (n2 / 2 + 1));
  cbuf_ = c;
  fwd_ = fftw_plan_dft_r2c_2d(n1, n2, rbuf_, c, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_2d(n1, n2, c, rbuf_, FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
}

void Fft2D::forward(const std::vector<double>& in, std::vector<cplx>& out) {
  const std::size_t n = static_cast<std::size_t>(n1_) * n2_;
  std::copy(in.begin(), in.begin() + n, rbuf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  const std::size_t nc = static_cast<std::size_t>(n1_) * n2c();
  auto* c = static_cast<fftw_complex*>(cbuf_);
  out.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) out[i] = {c[i][0], c[i][1]};
}

void Fft2D::inverse(const std::vector<cplx>& in, std::vector<double>& out) {
  const std::size_t nc = static_cast<std::size_t>(n1_) * n2c();
  auto* c = static_cast<fftw_complex*>(cbuf_);
  for (std::size_t i = 0; i < nc; ++i) {
    c[i][0] = in[i].real();
    c[i][1] = in[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inv_));
  const std::size_t n = static_cast<std::size_t>(n1_) * n2_;
  out.resize(n);
  const double s = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rbuf_[i] * s;
}

}  // namespace pnm
