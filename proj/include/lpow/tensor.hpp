// tensor.hpp
// Dense complex matrices over explicitly factorized tensor-product spaces.
//
// Basis convention: the leftmost factor is party A and the composite index of
// a multi-index (a0, a1, ..., ak) is a0*(d1*d2*...*dk) + a1*(d2*...*dk) + ...
// Every other header in this library inherits that ordering.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lpow {

using cplx = std::complex<double>;

/// Raised when operand shapes or factorizations do not line up.
class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdFloor = -1e-10;

/// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw dimension_error("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                            " != rows*cols " + std::to_string(rows_ * cols_));
    }
  }

  /// Row-by-row literal, e.g. {{1, 0}, {0, -1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw dimension_error("ComplexMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// |v><v| for a column vector of amplitudes.
  static ComplexMatrix outer(std::span<const cplx> v) {
    ComplexMatrix m(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> entries() const { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  cplx trace() const {
    require_square("trace");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw dimension_error("matmul: " + a.shape() + " x " + b.shape());
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_square(const char* what) const {
    if (!is_square()) throw dimension_error(std::string(what) + ": matrix is " + shape());
  }
  void require_same_shape(const ComplexMatrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw dimension_error(std::string(what) + ": " + shape() + " vs " + o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw dimension_error("max_abs_diff: " + a.shape() + " vs " + b.shape());
  }
  double worst = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) worst = std::max(worst, std::abs(ea[i] - eb[i]));
  return worst;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  return m.is_square() && max_abs_diff(m, m.adjoint()) <= tol;
}

/// Ordered subsystem dimensions of a composite space.
struct Factorization {
  std::vector<std::size_t> dims;

  Factorization() = default;
  Factorization(std::initializer_list<std::size_t> d) : dims(d) { validate(); }
  explicit Factorization(std::vector<std::size_t> d) : dims(std::move(d)) { validate(); }

  /// n qubits.
  static Factorization qubits(std::size_t n) { return Factorization(std::vector<std::size_t>(n, 2)); }

  std::size_t parties() const { return dims.size(); }
  std::size_t total() const {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
  }

  friend bool operator==(const Factorization&, const Factorization&) = default;

  friend Factorization concat(const Factorization& a, const Factorization& b) {
    std::vector<std::size_t> d = a.dims;
    d.insert(d.end(), b.dims.begin(), b.dims.end());
    return Factorization(std::move(d));
  }

 private:
  void validate() const {
    for (auto d : dims)
      if (d < 2) throw dimension_error("Factorization: subsystem dimension must be >= 2");
  }
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// Left-to-right Kronecker product of a list of factors.
inline ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) throw dimension_error("kron_all: no factors");
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original relative order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Factorization& f,
                                   std::span<const std::size_t> keep) {
  const std::size_t dim = f.total();
  if (!m.is_square() || m.rows() != dim) {
    throw dimension_error("partial_trace: matrix " + m.shape() + " does not match factorization of size " +
                          std::to_string(dim));
  }
  if (keep.empty()) throw dimension_error("partial_trace: keep set is empty");

  std::vector<bool> kept(f.parties(), false);
  for (auto k : keep) {
    if (k >= f.parties()) throw dimension_error("partial_trace: subsystem index out of range");
    if (kept[k]) throw dimension_error("partial_trace: duplicate subsystem index");
    kept[k] = true;
  }

  std::size_t kept_dim = 1;
  for (std::size_t p = 0; p < f.parties(); ++p)
    if (kept[p]) kept_dim *= f.dims[p];

  // Split every composite index into (kept index, traced index).
  std::vector<std::size_t> kept_idx(dim), traced_idx(dim);
  for (std::size_t full = 0; full < dim; ++full) {
    std::size_t rem = full;
    std::size_t stride = dim;
    std::size_t ki = 0, ti = 0;
    for (std::size_t p = 0; p < f.parties(); ++p) {
      stride /= f.dims[p];
      const std::size_t digit = rem / stride;
      rem %= stride;
      if (kept[p]) {
        ki = ki * f.dims[p] + digit;
      } else {
        ti = ti * f.dims[p] + digit;
      }
    }
    kept_idx[full] = ki;
    traced_idx[full] = ti;
  }

  ComplexMatrix out(kept_dim, kept_dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if (traced_idx[r] == traced_idx[c]) out(kept_idx[r], kept_idx[c]) += m(r, c);
  return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Factorization& f,
                                   std::initializer_list<std::size_t> keep) {
  return partial_trace(m, f, std::span<const std::size_t>(keep.begin(), keep.size()));
}

namespace detail {
inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}
}  // namespace detail

/// Singular values in descending order.
inline std::vector<double> singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(detail::to_eigen(m));
  const auto& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>{});
  return out;
}

inline double spectral_norm(const ComplexMatrix& m) {
  const auto s = singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!is_hermitian(m, 1e-9)) throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Real part of Tr(a b) without forming the product.
inline double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw dimension_error("trace_product: " + a.shape() + " x " + b.shape());
  }
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t.real();
}

// Pauli matrices.
inline const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m{{0.0, 1.0}, {1.0, 0.0}};
  return m;
}
inline const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}};
  return m;
}
inline const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m{{1.0, 0.0}, {0.0, -1.0}};
  return m;
}
inline const ComplexMatrix& pauli(std::size_t i) {
  switch (i) {
    case 0: return pauli_x();
    case 1: return pauli_y();
    case 2: return pauli_z();
    default: throw std::out_of_range("pauli: index must be 0, 1 or 2");
  }
}

}  // namespace lpow
