#include "s2sa/numeric.hpp"

#include <cmath>
#include <string>

#include "s2sa/errors.hpp"

namespace s2sa {

Vector affine(const Matrix& w, const Vector& x, const Vector& b) {
  if (w.cols != x.size() || w.rows != b.size()) {
    throw ShapeError("affine: incompatible shapes " + std::to_string(w.rows) + "x" +
                     std::to_string(w.cols) + " * " + std::to_string(x.size()) +
                     " + " + std::to_string(b.size()));
  }
  Vector out(b);
  affine_acc(out, w, x);
  return out;
}

void affine_acc(Vector& out, const Matrix& w, const Vector& x) {
  const double* wp = w.data.data();
  const double* xp = x.data();
  for (std::size_t i = 0; i < w.rows; ++i, wp += w.cols) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) acc += wp[j] * xp[j];
    out[i] += acc;
  }
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid_scalar(x[i]);
  return out;
}

Vector tanh_vec(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

Vector softmax(const Vector& scores) {
  if (scores.empty()) throw ShapeError("softmax: empty input");
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  Vector out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

Vector log_softmax(const Vector& scores) {
  if (scores.empty()) throw ShapeError("log_softmax: empty input");
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double total = 0.0;
  for (double s : scores) total += std::exp(s - mx);
  const double lz = mx + std::log(total);
  Vector out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] - lz;
  return out;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: length mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double grad_check(const std::function<double()>& loss_fn,
                  std::span<const ParamRef> params, double epsilon) {
  if (epsilon <= 0.0) throw ShapeError("grad_check: epsilon must be positive");
  double worst = 0.0;
  for (const ParamRef& p : params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + epsilon;
      const double up = loss_fn();
      p.value[i] = saved - epsilon;
      const double down = loss_fn();
      p.value[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError("grad_check: non-finite loss probing " + p.name + "[" +
                             std::to_string(i) + "]");
      }
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = p.grad[i];
      const double denom =
          std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      worst = std::max(worst, std::fabs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace s2sa
