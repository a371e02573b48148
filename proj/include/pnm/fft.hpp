// Thin RAII wrappers around FFTW real-to-complex transforms.
#pragma once

#include <complex>
#include <vector>

namespace pnm {

using cplx = std::complex<double>;

// 1D transform of length n: forward gives n/2+1 coefficients (unnormalized),
// inverse maps them back and divides by n.
class Fft1D {
 public:
  explicit Fft1D(int n);
  ~Fft1D();
  Fft1D(const Fft1D&) = delete;
  Fft1D& operator=(const Fft1D&) = delete;

  int size() const { return n_; }
  void forward(const std::vector<double>& in, std::vector<cplx>& out);
  void inverse(const std::vector<cplx>& in, std::vector<double>& out);

 private:
  int n_;
  double* rbuf_;
  void* cbuf_;
  void* fwd_;
  void* inv_;
};

// 2D transform of an n1 x n2 row-major array; the spectrum has
// n1 x (n2/2+1) entries.
class Fft2D {
 public:
  Fft2D(int n1, int n2);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int n2c() const { return n2_ / 2 + 1; }
  void forward(const std::vector<double>& in, std::vector<cplx>& out);
  void inverse(const std::vector<cplx>& in, std::vector<double>& out);

 private:
  int n1_, n2_;
  double* rbuf_;
  void* cbuf_;
  void* fwd_;
  void* inv_;
};

// Signed integer wavenumber index for position j of an n-point transform.
inline int signed_index(int j, int n) { return j <= n / 2 ? j : j - n; }

}  // namespace pnm
