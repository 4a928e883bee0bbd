#ifndef TVOPT_TYPES_HPP
#define TVOPT_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or contract violation detected at setup time.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Numerical failure (singular system, non-convergence, ...).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

/// Evaluation at a point outside the barrier domain (some f_i >= 0).
class DomainViolation : public Error {
 public:
  DomainViolation(int constraint_index, double t)
      : Error("constraint " + std::to_string(constraint_index) +
              " violated at t=" + std::to_string(t)),
        constraint_index(constraint_index),
        t(t) {}
  int constraint_index;
  double t;
};

/// A required optional oracle surface (higher partial) is not provided.
class MissingPartials : public Error {
 public:
  explicit MissingPartials(const std::string& surface)
      : Error("missing oracle surface: " + surface), surface(surface) {}
  std::string surface;
};

/// Symmetric rank-3 array of third partials, stored as slices along the
/// last index: k[c](i,j) = d^3 f / dv_i dv_j dv_c.
struct Tensor3 {
  std::vector<Mat> k;

  static Tensor3 zero(int n) {
    Tensor3 t;
    t.k.assign(static_cast<size_t>(n), Mat::Zero(n, n));
    return t;
  }

  int dim() const { return static_cast<int>(k.size()); }

  /// Contraction over the last index: sum_c k[c] * w(c).
  Mat contract(const Vec& w) const {
    Mat out = Mat::Zero(dim(), dim());
    for (int c = 0; c < dim(); ++c) out += k[static_cast<size_t>(c)] * w(c);
    return out;
  }

  /// Frobenius norm of the unfolding. Upper-bounds the operator norm of
  /// any contraction with a unit vector, which is what the tube bounds
  /// require.
  double norm() const {
    double s = 0.0;
    for (const Mat& m : k) s += m.squaredNorm();
    return std::sqrt(s);
  }

  Tensor3& operator+=(const Tensor3& o) {
    for (size_t c = 0; c < k.size(); ++c) k[c] += o.k[c];
    return *this;
  }
};

/// Spectral norm of a small dense matrix.
inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace tvopt

#endif  // TVOPT_TYPES_HPP
