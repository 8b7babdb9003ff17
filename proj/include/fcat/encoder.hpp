#pragma once

// Coherent-state constellations, their Gram matrices, and the quantum Fourier
// encoding built on top of them. Also the single-mode cat qudit of the cyclic
// group.

#include "fcat/fock.hpp"
#include "fcat/group.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fcat {

/// Relative eigenvalue floor below which a Gram matrix is refused.
inline constexpr double kGramFloor = 1e-12;

/// The orbit {g alpha : g in G} of a two-mode amplitude vector, with the
/// corresponding coherent states in group order.
struct Constellation {
  FiniteMatrixGroup group;
  Vec2 alpha_vec;
  int cutoff = kDefaultCutoff;
  std::vector<Vec2> points;
  std::vector<FockState> states;

  FockConfig config() const { return {2, cutoff}; }
};

inline double min_pairwise_distance(const std::vector<Vec2>& points) {
  if (points.size() < 2) throw input_error("minimum distance needs at least two points");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, (points[i] - points[j]).norm());
  return best;
}

inline Constellation make_constellation(const FiniteMatrixGroup& group, const Vec2& alpha_vec,
                                        int cutoff = kDefaultCutoff) {
  Constellation c{group, alpha_vec, cutoff, {}, {}};
  for (const auto& g : group.elements()) c.points.push_back(g.matrix * alpha_vec);
  if (c.points.size() > 1 && min_pairwise_distance(c.points) <= 1e-9 * std::max(1.0, alpha_vec.norm()))
    throw input_error("degenerate constellation");
  for (const auto& p : c.points) c.states.push_back(coherent_state(p, cutoff));
  return c;
}

/// Constellation of (alpha, alpha e^{i phi}).
inline Constellation make_constellation(const FiniteMatrixGroup& group, double alpha, double phi,
                                        int cutoff = kDefaultCutoff) {
  if (!(alpha > 0.0)) throw input_error("alpha must be positive");
  return make_constellation(group, Vec2(alpha, std::polar(alpha, phi)), cutoff);
}

inline double min_euclidean_distance(const Constellation& c) { return min_pairwise_distance(c.points); }

struct GramMatrix {
  Mat entries;  // [g,h] = <g alpha|h alpha>
};

/// Gram matrix from Fock-space inner products.
inline GramMatrix gram_matrix(const Constellation& c) {
  const auto n = static_cast<Eigen::Index>(c.states.size());
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = c.states[i].inner(c.states[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return {g};
}

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + a^dagger b) for multimode coherent states.
inline Mat analytic_gram(const std::vector<Vec2>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& a = points[i];
      const auto& b = points[j];
      g(i, j) = std::exp(-a.squaredNorm() / 2.0 - b.squaredNorm() / 2.0 + a.dot(b));
    }
  return g;
}

inline FockState superpose(const std::vector<FockState>& states, const Vec& coeffs) {
  FockState out = FockState::zero(states.front().config());
  for (std::size_t g = 0; g < states.size(); ++g)
    out.amplitudes() += coeffs[static_cast<Eigen::Index>(g)] * states[g].amplitudes();
  return out;
}

/// |g> = sum_h [Gamma^{-1/2}]_{h,g} |h alpha>.
inline std::vector<FockState> orthonormal_group_basis(const Constellation& c, const GramMatrix& gram) {
  const Mat w = hermitian_inv_sqrt(gram.entries, kGramFloor).inv_sqrt;
  std::vector<FockState> basis;
  for (Eigen::Index g = 0; g < w.cols(); ++g) basis.push_back(superpose(c.states, w.col(g)));
  return basis;
}

/// The four code states |l,m> = sum_g [Gamma^{-1/2} F^dagger]_{g,(lambda,l,m)} |g alpha>,
/// stored in the order (0,0), (0,1), (1,0), (1,1).
struct CodeBasis {
  Constellation constellation;
  GramMatrix gram;
  GroupFourierTransform fourier;
  Mat coefficients;  // |G| x 4, column 2l+m
  std::vector<FockState> basis_states;

  const FockState& state(int l, int m) const { return basis_states.at(static_cast<std::size_t>(2 * l + m)); }
  FockConfig config() const { return constellation.config(); }

  /// Pi |psi> = sum_j |j><j|psi>
  FockState project(const FockState& psi) const {
    FockState out = FockState::zero(psi.config());
    for (const auto& b : basis_states) out.amplitudes() += b.inner(psi) * b.amplitudes();
    return out;
  }

  /// Components <j|psi> in the code basis.
  Vec components(const FockState& psi) const {
    Vec v(4);
    for (int j = 0; j < 4; ++j) v[j] = basis_states[static_cast<std::size_t>(j)].inner(psi);
    return v;
  }

  FockState logical_state(const Vec& amplitudes) const {
    FockState out = FockState::zero(config());
    for (int j = 0; j < 4; ++j) out.amplitudes() += amplitudes[j] * basis_states[static_cast<std::size_t>(j)].amplitudes();
    return out;
  }

  FockOperator projector() const {
    Mat b(config().dimension(), 4);
    for (int j = 0; j < 4; ++j) b.col(j) = basis_states[static_cast<std::size_t>(j)].amplitudes();
    return {config(), b * b.adjoint()};
  }
};

inline std::size_t lambda_row(const GroupFourierTransform& f, int l, int m) { return f.row_of("lambda", l, m); }

inline CodeBasis build_code_basis(const Constellation& c, const GroupFourierTransform& f) {
  CodeBasis code{c, gram_matrix(c), f, {}, {}};
  const Mat w = hermitian_inv_sqrt(code.gram.entries, kGramFloor).inv_sqrt;
  const Mat fd = f.matrix.adjoint();
  code.coefficients.resize(fd.rows(), 4);
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m)
      code.coefficients.col(2 * l + m) = w * fd.col(static_cast<Eigen::Index>(lambda_row(f, l, m)));
  for (int j = 0; j < 4; ++j) code.basis_states.push_back(superpose(c.states, code.coefficients.col(j)).normalized());
  return code;
}

inline FockState encode(const Constellation& c, const GroupFourierTransform& f, int l, int m) {
  if (l < 0 || l > 1 || m < 0 || m > 1) throw input_error("logical indices must be 0 or 1");
  return build_code_basis(c, f).state(l, m);
}

/// The Fourier code built on the constellation of U alpha.
inline CodeBasis deformed_code(const Constellation& c, const Mat2& u, const GroupFourierTransform& f) {
  if (!is_unitary(u, 1e-10)) throw input_error("U is not unitary");
  return build_code_basis(make_constellation(c.group, Vec2(u * c.alpha_vec), c.cutoff), f);
}

inline FockState deformed_encode(const Constellation& c, const Mat2& u, const GroupFourierTransform& f, int l,
                                 int m) {
  if (l < 0 || l > 1 || m < 0 || m > 1) throw input_error("logical indices must be 0 or 1");
  return deformed_code(c, u, f).state(l, m);
}

/// Covariant qudit: sum_g [F^dagger]_{g,(lambda,l,Omega)} |g alpha>, normalized,
/// with the multiplicity slot contracted against Omega. No Gram correction.
inline FockState covariant_encode(const Constellation& c, const GroupFourierTransform& f, int l, const Vec2& omega) {
  if (std::abs(omega.norm() - 1.0) > 1e-12) throw input_error("Omega must be normalized");
  const Mat fd = f.matrix.adjoint();
  Vec coeffs = Vec::Zero(fd.rows());
  for (int m = 0; m < 2; ++m) coeffs += omega[m] * fd.col(static_cast<Eigen::Index>(lambda_row(f, l, m)));
  const FockState psi = superpose(c.states, coeffs);
  if (psi.norm() < 1e-12) throw input_error("covariant encoding vanishes for this Omega");
  return psi.normalized();
}

struct GramSpectrum {
  Mat transformed;        // F Gamma F^dagger
  double off_diagonal = 0.0;
  Mat lambda_block;       // 4x4 restriction to the defining irrep
  cplx scalar;            // tr(lambda_block) / 4
  double scalar_deviation = 0.0;
};

inline GramSpectrum gram_fourier_spectrum(const GramMatrix& gram, const GroupFourierTransform& f) {
  if (gram.entries.rows() != f.matrix.rows()) throw input_error("dimension mismatch");
  GramSpectrum s;
  s.transformed = f.matrix * gram.entries * f.matrix.adjoint();
  Mat off = s.transformed;
  off.diagonal().setZero();
  s.off_diagonal = off.norm();
  const auto r0 = static_cast<Eigen::Index>(lambda_row(f, 0, 0));
  s.lambda_block = s.transformed.block(r0, r0, 4, 4);
  s.scalar = s.lambda_block.trace() / 4.0;
  s.scalar_deviation = (s.lambda_block - s.scalar * Mat::Identity(4, 4)).norm();
  return s;
}

/// Reference product states at the canonical amplitude: |0,0> = |1_a>|0_ia>,
/// |0,1> = |1_ia>|0_a>, |1,0> = |0_ia>|1_a>, |1,1> = |0_a>|1_ia>.
inline FockState product_form_codeword(double alpha, int l, int m, int cutoff = kDefaultCutoff) {
  const cplx a = alpha, ia = I_UNIT * alpha;
  switch (2 * l + m) {
    case 0: return tensor_product(cat_state(a, 1, cutoff), cat_state(ia, 0, cutoff));
    case 1: return tensor_product(cat_state(ia, 1, cutoff), cat_state(a, 0, cutoff));
    case 2: return tensor_product(cat_state(ia, 0, cutoff), cat_state(a, 1, cutoff));
    case 3: return tensor_product(cat_state(a, 0, cutoff), cat_state(ia, 1, cutoff));
    default: throw input_error("logical indices must be 0 or 1");
  }
}

/// Single-mode cat qudit from the cyclic group Z_N, N = d M.
struct CatQuditCode {
  int n = 2;
  int d = 2;
  int m = 1;
  double alpha = 1.0;
  Eigen::VectorXd delta;  // Fourier spectrum of the Gram matrix
  std::vector<FockState> codewords;
};

/// Delta_k = e^{-a^2} sum_l w^{kl} e^{a^2 w^l}, w = e^{2 pi i/N}.
inline Vec cat_qudit_spectrum(int n, double alpha) {
  const double a2 = alpha * alpha;
  const double step = 2.0 * std::numbers::pi / n;
  Vec delta(n);
  for (int k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (int l = 0; l < n; ++l) s += std::polar(1.0, step * ((k * l) % n)) * std::exp(a2 * std::polar(1.0, step * l));
    delta[k] = std::exp(-a2) * s;
  }
  return delta;
}

/// Enc(k) = (N Delta_{-kM})^{-1/2} sum_p w^{-kpM} |w^p alpha>. The spectrum is
/// indexed at -kM (mod N): F^dagger|lambda_kM> is the Gram eigenvector with
/// eigenvalue Delta_{-kM}.
inline CatQuditCode cat_qudit(int n, int d, double alpha, int cutoff = kDefaultCutoff) {
  if (n < 1 || d < 1 || n % d != 0) throw input_error("d must divide N");
  if (!(alpha > 0.0)) throw input_error("alpha must be positive");
  CatQuditCode code{n, d, n / d, alpha, Eigen::VectorXd(n), {}};
  const Vec spectrum = cat_qudit_spectrum(n, alpha);
  for (int k = 0; k < n; ++k) {
    if (std::abs(spectrum[k].imag()) > 1e-12 || spectrum[k].real() < -1e-12)
      throw numerical_error("cat qudit spectrum is not real nonnegative");
    code.delta[k] = std::max(0.0, spectrum[k].real());
  }
  const double step = 2.0 * std::numbers::pi / n;
  std::vector<FockState> orbit;
  for (int p = 0; p < n; ++p) orbit.push_back(coherent_state(std::polar(alpha, step * p), cutoff));
  for (int k = 0; k < d; ++k) {
    const int km = k * code.m;
    const double dk = code.delta[(n - km) % n];
    if (dk < kGramFloor) throw numerical_error("codeword numerically null");
    Vec coeffs(n);
    for (int p = 0; p < n; ++p) coeffs[p] = std::polar(1.0 / std::sqrt(n * dk), -step * ((km * p) % n));
    code.codewords.push_back(superpose(orbit, coeffs));
  }
  return code;
}

}  // namespace fcat
