#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace s2sa {

using Vector = std::vector<double>;

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
};

// result[i] = sum_j w(i,j) * x[j] + b[i]
Vector affine(const Matrix& w, const Vector& x, const Vector& b);
// Accumulating form for hot loops: out[i] += sum_j w(i,j) * x[j]
void affine_acc(Vector& out, const Matrix& w, const Vector& x);

Vector sigmoid(const Vector& x);
Vector tanh_vec(const Vector& x);

double sigmoid_scalar(double x);

// Numerically stable (max-subtraction before exponentiation).
Vector softmax(const Vector& scores);
Vector log_softmax(const Vector& scores);

double dot(const Vector& a, const Vector& b);

// One named parameter block with its analytic gradient.
struct ParamRef {
  std::string name;
  std::span<double> value;
  std::span<const double> grad;
};

// Central-difference check of analytic gradients. loss_fn re-evaluates the
// loss from the current parameter values; the spans in `params` are perturbed
// in place and restored. Returns the maximum over all scalars of
// |g_analytic - g_numeric| / max(|g_analytic|, |g_numeric|, 1e-8).
double grad_check(const std::function<double()>& loss_fn,
                  std::span<const ParamRef> params, double epsilon);

}  // namespace s2sa
