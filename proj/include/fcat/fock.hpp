#pragma once

// Truncated multimode Fock space: states, ladder operators, passive Gaussian
// unitaries, number-diagonal gates and Hermitian matrix functions.

#include "fcat/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fcat {

/// Dense operators are refused above this Hilbert-space dimension.
inline constexpr Eigen::Index kDenseBudget = 4096;

/// Default per-mode photon cutoff; keeps the Poisson tail of |alpha| <= 1.6
/// below 1e-14.
inline constexpr int kDefaultCutoff = 25;

/// Largest discarded Poisson mass a coherent-state constructor accepts.
inline constexpr double kTailTolerance = 1e-12;

struct FockConfig {
  int modes = 1;
  int cutoff = kDefaultCutoff;

  FockConfig() = default;
  FockConfig(int modes_, int cutoff_) : modes(modes_), cutoff(cutoff_) {
    if (modes < 1) throw input_error("FockConfig needs at least one mode");
    if (cutoff < 1) throw input_error("FockConfig cutoff must be at least 1");
  }

  int levels() const { return cutoff + 1; }

  Eigen::Index dimension() const {
    Eigen::Index d = 1;
    for (int k = 0; k < modes; ++k) d *= levels();
    return d;
  }

  /// Row-major multi-index: mode 0 is the slowest-varying digit.
  Eigen::Index index(std::span<const int> ns) const {
    Eigen::Index i = 0;
    for (int n : ns) i = i * levels() + n;
    return i;
  }

  std::vector<int> multi_index(Eigen::Index i) const {
    std::vector<int> ns(static_cast<std::size_t>(modes));
    for (int k = modes - 1; k >= 0; --k) {
      ns[static_cast<std::size_t>(k)] = static_cast<int>(i % levels());
      i /= levels();
    }
    return ns;
  }

  bool operator==(const FockConfig&) const = default;
};

class FockState {
 public:
  FockState() = default;
  FockState(FockConfig config, Vec amplitudes) : config_(config), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != config_.dimension()) throw input_error("amplitude vector does not match FockConfig");
  }

  static FockState zero(FockConfig config) { return {config, Vec::Zero(config.dimension())}; }

  const FockConfig& config() const { return config_; }
  const Vec& amplitudes() const { return amplitudes_; }
  Vec& amplitudes() { return amplitudes_; }
  cplx operator[](Eigen::Index i) const { return amplitudes_[i]; }

  double norm() const { return amplitudes_.norm(); }
  double norm_deviation() const { return std::abs(norm() - 1.0); }

  FockState normalized() const {
    const double n = norm();
    if (n == 0.0) throw input_error("cannot normalize the zero vector");
    return {config_, amplitudes_ / n};
  }

  /// <this|other>
  cplx inner(const FockState& other) const {
    require_same(other);
    return amplitudes_.dot(other.amplitudes_);
  }

  FockState operator+(const FockState& o) const { require_same(o); return {config_, amplitudes_ + o.amplitudes_}; }
  FockState operator-(const FockState& o) const { require_same(o); return {config_, amplitudes_ - o.amplitudes_}; }
  FockState operator*(cplx s) const { return {config_, amplitudes_ * s}; }
  friend FockState operator*(cplx s, const FockState& v) { return v * s; }

 private:
  void require_same(const FockState& o) const {
    if (!(o.config_ == config_)) throw input_error("FockConfig mismatch");
  }

  FockConfig config_;
  Vec amplitudes_;
};

/// 1 - |<a|b>| / (|a||b|); insensitive to global phase and normalization.
inline double infidelity(const FockState& a, const FockState& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::max(0.0, 1.0 - std::abs(a.inner(b)) / (na * nb));
}

class FockOperator {
 public:
  FockOperator(FockConfig config, Mat matrix) : config_(config), matrix_(std::move(matrix)) {
    const auto d = config_.dimension();
    if (d > kDenseBudget) throw numerical_error("Fock dimension exceeds the dense-matrix budget");
    if (matrix_.rows() != d || matrix_.cols() != d) throw input_error("operator does not match FockConfig");
  }

  static FockOperator identity(FockConfig config) {
    return {config, Mat::Identity(config.dimension(), config.dimension())};
  }

  const FockConfig& config() const { return config_; }
  const Mat& matrix() const { return matrix_; }

  FockState apply(const FockState& s) const {
    if (!(s.config() == config_)) throw input_error("FockConfig mismatch");
    return {config_, matrix_ * s.amplitudes()};
  }

  FockOperator operator*(const FockOperator& o) const { return {config_, matrix_ * o.matrix_}; }

 private:
  FockConfig config_;
  Mat matrix_;
};

/// Operator that is diagonal in the number basis; stored as its diagonal.
class DiagonalOperator {
 public:
  DiagonalOperator(FockConfig config, Vec diagonal) : config_(config), diagonal_(std::move(diagonal)) {
    if (diagonal_.size() != config_.dimension()) throw input_error("diagonal does not match FockConfig");
  }

  const FockConfig& config() const { return config_; }
  const Vec& diagonal() const { return diagonal_; }

  FockState apply(const FockState& s) const {
    if (!(s.config() == config_)) throw input_error("FockConfig mismatch");
    return {config_, diagonal_.cwiseProduct(s.amplitudes())};
  }

  FockOperator to_dense() const { return {config_, Mat(diagonal_.asDiagonal())}; }

 private:
  FockConfig config_;
  Vec diagonal_;
};

/// Poisson mass e^{-|a|^2} sum_{n > cutoff} |a|^{2n}/n!, summed directly.
inline double coherent_tail_mass(cplx alpha, int cutoff) {
  const double x = std::norm(alpha);
  if (x == 0.0) return 0.0;
  // log of the first discarded term, then a forward recurrence.
  double log_term = -x + (cutoff + 1) * std::log(x) - std::lgamma(cutoff + 2.0);
  double term = std::exp(log_term);
  double sum = 0.0;
  for (int n = cutoff + 1; n < cutoff + 2000; ++n) {
    sum += term;
    term *= x / (n + 1);
    if (term < 1e-300 || (n > x && term < 1e-18 * sum)) break;
  }
  return sum;
}

/// Single-mode coherent state e^{-|a|^2/2} a^n/sqrt(n!), renormalized after
/// truncation. Throws if the discarded tail exceeds `tail_tolerance`.
inline FockState coherent_state(cplx alpha, int cutoff, double tail_tolerance = kTailTolerance) {
  const double tail = coherent_tail_mass(alpha, cutoff);
  if (tail > tail_tolerance) throw numerical_error("cutoff too small for |alpha|");
  const FockConfig config(1, cutoff);
  Vec v(config.dimension());
  v[0] = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 1; n <= cutoff; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return FockState(config, v).normalized();
}

/// Tensor product, with the modes of `a` preceding those of `b`.
inline FockState tensor_product(const FockState& a, const FockState& b) {
  if (a.config().cutoff != b.config().cutoff) throw input_error("tensor product needs a common cutoff");
  const FockConfig config(a.config().modes + b.config().modes, a.config().cutoff);
  Vec v(config.dimension());
  const auto nb = b.amplitudes().size();
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) v.segment(i * nb, nb) = a[i] * b.amplitudes();
  return {config, v};
}

/// Two-mode coherent state |a_1, a_2>.
inline FockState coherent_state(const Vec2& alphas, int cutoff, double tail_tolerance = kTailTolerance) {
  return tensor_product(coherent_state(alphas[0], cutoff, tail_tolerance),
                        coherent_state(alphas[1], cutoff, tail_tolerance));
}

/// Normalized |a> + (-1)^parity |-a>. Only Fock levels of matching parity are
/// populated, so the opposite-parity amplitudes are exactly zero.
inline FockState cat_state(cplx alpha, int parity, int cutoff, double tail_tolerance = kTailTolerance) {
  if (parity != 0 && parity != 1) throw input_error("cat parity must be 0 or 1");
  if (alpha == cplx(0.0) && parity == 1) throw input_error("odd cat state is undefined at alpha = 0");
  if (coherent_tail_mass(alpha, cutoff) > tail_tolerance) throw numerical_error("cutoff too small for |alpha|");
  const FockConfig config(1, cutoff);
  Vec v = Vec::Zero(config.dimension());
  cplx c = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 0; n <= cutoff; ++n) {
    if (n > 0) c *= alpha / std::sqrt(static_cast<double>(n));
    if (n % 2 == parity) v[n] = 2.0 * c;
  }
  return FockState(config, v).normalized();
}

/// Applies a_mode; the result is not renormalized.
inline FockState annihilate(const FockState& s, int mode) {
  const auto& cfg = s.config();
  if (mode < 0 || mode >= cfg.modes) throw input_error("mode index out of range");
  FockState out = FockState::zero(cfg);
  for (Eigen::Index i = 0; i < cfg.dimension(); ++i) {
    auto ns = cfg.multi_index(i);
    const int n = ns[static_cast<std::size_t>(mode)];
    if (n == 0) continue;
    ns[static_cast<std::size_t>(mode)] = n - 1;
    out.amplitudes()[cfg.index(ns)] += std::sqrt(static_cast<double>(n)) * s[i];
  }
  return out;
}

/// Applies a_mode^dagger on the truncated space (the top level is dropped).
inline FockState create(const FockState& s, int mode) {
  const auto& cfg = s.config();
  if (mode < 0 || mode >= cfg.modes) throw input_error("mode index out of range");
  FockState out = FockState::zero(cfg);
  for (Eigen::Index i = 0; i < cfg.dimension(); ++i) {
    auto ns = cfg.multi_index(i);
    const int n = ns[static_cast<std::size_t>(mode)];
    if (n == cfg.cutoff) continue;
    ns[static_cast<std::size_t>(mode)] = n + 1;
    out.amplitudes()[cfg.index(ns)] += std::sqrt(static_cast<double>(n + 1)) * s[i];
  }
  return out;
}

inline FockState annihilate_power(FockState s, int mode, int power) {
  for (int k = 0; k < power; ++k) s = annihilate(s, mode);
  return s;
}

/// Hermitian generator h with exp(i h) = U, from the principal logarithm.
inline Mat2 unitary_generator(const Mat2& u) {
  if (!is_unitary(u, 1e-10)) throw input_error("U is not unitary");
  Eigen::ComplexEigenSolver<Mat2> es(u);
  const Mat2 v = es.eigenvectors();
  Eigen::Vector2cd phases;
  for (int k = 0; k < 2; ++k) phases[k] = std::arg(es.eigenvalues()[k]);
  Mat2 h = v * phases.asDiagonal() * v.inverse();
  return (h + h.adjoint()) / 2.0;
}

/// pi(U) = exp(i sum_jk h_jk a_j^dagger a_k) with h = -i log U, so that
/// pi(U)|b> = |U b> on coherent states. Built block by block in total photon
/// number, which the generator conserves. Each block is exponentiated at full
/// size and then restricted to the cutoff, so only the tail is lost.
inline FockOperator passive_gaussian_unitary(const Mat2& u, FockConfig config) {
  if (config.modes != 2) throw input_error("passive_gaussian_unitary needs two modes");
  const Mat2 h = unitary_generator(u);
  const int c = config.cutoff;
  Mat out = Mat::Zero(config.dimension(), config.dimension());
  for (int total = 0; total <= 2 * c; ++total) {
    const int size = total + 1;  // n1 = 0..total
    Mat k = Mat::Zero(size, size);
    for (int n1 = 0; n1 <= total; ++n1) {
      const int n2 = total - n1;
      k(n1, n1) = h(0, 0) * double(n1) + h(1, 1) * double(n2);
      if (n1 + 1 <= total) k(n1 + 1, n1) += h(0, 1) * std::sqrt(double(n1 + 1) * n2);  // a1^dag a2
      if (n1 - 1 >= 0) k(n1 - 1, n1) += h(1, 0) * std::sqrt(double(n1) * (n2 + 1));    // a2^dag a1
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(k);
    Vec phases(size);
    for (int r = 0; r < size; ++r) phases[r] = std::polar(1.0, es.eigenvalues()[r]);
    const Mat block = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    const int lo = std::max(0, total - c), hi = std::min(total, c);
    for (int a = lo; a <= hi; ++a) {
      for (int b = lo; b <= hi; ++b) {
        const int ia[2] = {a, total - a}, ib[2] = {b, total - b};
        out(config.index(ia), config.index(ib)) = block(a, b);
      }
    }
  }
  return {config, out};
}

using NumberFunction = std::function<cplx(std::span<const int>)>;

/// sum_n f(n) |n><n| for a unimodular f.
inline DiagonalOperator number_diagonal_operator(const NumberFunction& f, FockConfig config) {
  Vec d(config.dimension());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const auto ns = config.multi_index(i);
    d[i] = f(ns);
    if (std::abs(std::abs(d[i]) - 1.0) > 1e-12) throw input_error("number function is not unimodular");
  }
  return {config, d};
}

/// A^{-1/2} and A^{1/2} of a Hermitian positive matrix.
struct HermitianRoots {
  Mat inv_sqrt;
  Mat sqrt;
  Eigen::VectorXd eigenvalues;

  double condition_number() const { return eigenvalues.maxCoeff() / eigenvalues.minCoeff(); }
};

inline void require_hermitian(const Mat& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) throw input_error("matrix is not square");
  if ((a - a.adjoint()).norm() > tol * std::max(1.0, a.norm())) throw input_error("matrix is not Hermitian");
}

/// Throws when an eigenvalue falls below floor * lambda_max.
inline HermitianRoots hermitian_inv_sqrt(const Mat& a, double floor) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Mat> es((a + a.adjoint()) / 2.0);
  const Eigen::VectorXd w = es.eigenvalues();
  if (w.maxCoeff() <= 0.0 || w.minCoeff() < floor * w.maxCoeff())
    throw numerical_error("Gram matrix numerically singular");
  const Mat& v = es.eigenvectors();
  const Eigen::VectorXd s = w.cwiseSqrt();
  return {v * s.cwiseInverse().cast<cplx>().asDiagonal() * v.adjoint(), v * s.cast<cplx>().asDiagonal() * v.adjoint(),
          w};
}

/// Square root of a Hermitian positive-semidefinite matrix. Eigenvalues below
/// noise_floor * lambda_max (including negative round-off) are set to zero.
inline Mat psd_sqrt(const Mat& a, double noise_floor = 0.0) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Mat> es((a + a.adjoint()) / 2.0);
  const Eigen::VectorXd w = es.eigenvalues();
  const double cut = noise_floor * std::max(0.0, w.maxCoeff());
  Eigen::VectorXd s(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) s[i] = w[i] > cut ? std::sqrt(w[i]) : 0.0;
  return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Moore-Penrose inverse square root: eigenvalues at or below
/// floor * lambda_max are dropped rather than rejected.
inline Mat psd_pinv_sqrt(const Mat& a, double floor) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Mat> es((a + a.adjoint()) / 2.0);
  const Eigen::VectorXd w = es.eigenvalues();
  const double cut = floor * std::max(0.0, w.maxCoeff());
  Eigen::VectorXd s(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) s[i] = w[i] > cut ? 1.0 / std::sqrt(w[i]) : 0.0;
  return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace fcat
