#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fcat {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr cplx I_UNIT{0.0, 1.0};

/// Invalid arguments: non-unitary matrices, bad indices, degenerate inputs.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: singular Gram matrices, truncation budget exceeded.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The canonical amplitude sqrt(pi/2) at which the code states factorize.
inline double canonical_alpha() { return std::sqrt(std::numbers::pi / 2.0); }

inline double unitarity_residual(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).norm();
}

inline bool is_unitary(const Mat& u, double tol) {
  return u.rows() == u.cols() && unitarity_residual(u) <= tol;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Frobenius distance between `actual` and `target` after removing the best
/// global phase. The phase is taken from the overlap tr(target^dagger actual).
struct PhaseFreeComparison {
  double residual = 0.0;
  double phase = 0.0;
};

inline PhaseFreeComparison compare_up_to_phase(const Mat& actual, const Mat& target) {
  const cplx overlap = (target.adjoint() * actual).trace();
  const double phase = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
  const cplx u = std::polar(1.0, phase);
  return {(actual - u * target).norm(), phase};
}

}  // namespace fcat
