#ifndef TRIGGERFORGE_MAT_HPP_
#define TRIGGERFORGE_MAT_HPP_

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace triggerforge {

// Dense row-major matrix. Deliberately minimal: the model code below needs
// exactly three matmul layouts plus a handful of row ops, and a fixed loop
// order everywhere keeps results bit-reproducible run to run.
template <typename T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0)) {}

  T* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
  T& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  T at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  void zero() { std::fill(a.begin(), a.end(), T(0)); }
  std::size_t size() const { return a.size(); }
};

template <typename T>
inline T dot(const T* x, const T* y, int n) {
  T s = T(0);
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <typename T>
inline void axpy(T alpha, const T* x, T* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// C += A * B^T.  A: m x k, B: n x k, C: m x n.  The layout used by linear
// layers (weights stored out x in), rows of both operands are contiguous.
template <typename T>
inline void matmul_nt(Mat<T>& c, const Mat<T>& a, const Mat<T>& b) {
  assert(a.cols == b.cols && c.rows == a.rows && c.cols == b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const T* ai = a.row(i);
    T* ci = c.row(i);
    for (int j = 0; j < b.rows; ++j) ci[j] += dot(ai, b.row(j), a.cols);
  }
}

// C += A * B.  A: m x k, B: k x n, C: m x n.
template <typename T>
inline void matmul_nn(Mat<T>& c, const Mat<T>& a, const Mat<T>& b) {
  assert(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const T* ai = a.row(i);
    T* ci = c.row(i);
    for (int k = 0; k < a.cols; ++k) axpy(ai[k], b.row(k), ci, b.cols);
  }
}

// C += A^T * B.  A: m x k, B: m x n, C: k x n.  Weight-gradient layout.
template <typename T>
inline void matmul_tn(Mat<T>& c, const Mat<T>& a, const Mat<T>& b) {
  assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const T* ai = a.row(i);
    const T* bi = b.row(i);
    for (int k = 0; k < a.cols; ++k) axpy(ai[k], bi, c.row(k), b.cols);
  }
}

// y += W * x with W: out x in.
template <typename T>
inline void matvec(const Mat<T>& w, const T* x, T* y) {
  for (int i = 0; i < w.rows; ++i) y[i] += dot(w.row(i), x, w.cols);
}

// Numerically stable in-place log-softmax over a row; returns logsumexp.
template <typename T>
inline T log_softmax_inplace(T* x, int n) {
  T m = x[0];
  for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
  T s = T(0);
  for (int i = 0; i < n; ++i) s += std::exp(x[i] - m);
  T lse = m + std::log(s);
  for (int i = 0; i < n; ++i) x[i] -= lse;
  return lse;
}

}  // namespace triggerforge

#endif  // TRIGGERFORGE_MAT_HPP_
