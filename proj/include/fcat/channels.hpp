#pragma once

// Pure loss on both modes: Knill-Laflamme and kernel diagnostics, the QEC
// matrix of the Petz recovery and entanglement-fidelity sweeps.

#include "fcat/encoder.hpp"

#include <optional>
#include <string>
#include <utility>

namespace fcat {

/// Pure loss with probability gamma: t = sqrt(1 - gamma), r = sqrt(gamma).
struct LossChannel {
  double gamma = 0.0;

  explicit LossChannel(double g) : gamma(g) {
    if (!(g >= 0.0 && g < 1.0)) throw input_error("gamma must lie in [0, 1)");
  }
  double t() const { return std::sqrt(1.0 - gamma); }
  double r() const { return std::sqrt(gamma); }
};

/// Lambda_{gh} = <+i| g^dagger h |+i> with |+i> = (|0> + i|1>) / sqrt 2.
struct LambdaMatrix {
  Mat entries;
};

inline LambdaMatrix lambda_matrix(const FiniteMatrixGroup& group) {
  const Vec2 plus_i = Vec2(1.0, I_UNIT) / std::sqrt(2.0);
  const auto n = static_cast<Eigen::Index>(group.size());
  LambdaMatrix out{Mat(n, n)};
  for (Eigen::Index g = 0; g < n; ++g)
    for (Eigen::Index h = 0; h < n; ++h)
      out.entries(g, h) = (group.matrix(static_cast<std::size_t>(g)) * plus_i)
                              .dot(group.matrix(static_cast<std::size_t>(h)) * plus_i);
  return out;
}

/// Gram matrices of the input, transmitted and reflected constellations for
/// alpha_vec = (alpha, i alpha): exp(2 c alpha^2 (Lambda - 1)) with c = 1, 1 - gamma, gamma.
struct LossGrams {
  Mat gamma;
  Mat gamma_t;
  Mat gamma_r;
};

inline LossGrams loss_gram_matrices(const LambdaMatrix& lambda, double alpha, double gamma) {
  if (!(alpha > 0.0)) throw input_error("alpha must be positive");
  const LossChannel channel(gamma);
  auto gram = [&](double c) {
    const Mat shifted = lambda.entries - Mat::Ones(lambda.entries.rows(), lambda.entries.cols());
    return Mat((2.0 * c * alpha * alpha * shifted).array().exp());
  };
  return {gram(1.0), gram(1.0 - channel.gamma), gram(channel.gamma)};
}

/// M_{[k,p],[l,q]} for the logical qubit (multiplicity fixed to 0), stored
/// with row index k * |G| + p.
struct QecMatrix {
  Mat entries;
  int d = 2;
  double kraus_residual = 0.0;  // only set by the Fock construction
};

inline Eigen::Index qec_index(int k, Eigen::Index p, Eigen::Index group_size) { return k * group_size + p; }

/// Code coefficients Gamma^{-1/2} F^dagger restricted to the (lambda, k, 0) rows.
inline Mat logical_coefficients(const Mat& gram, const GroupFourierTransform& f) {
  const Mat w = hermitian_inv_sqrt(gram, kGramFloor).inv_sqrt;
  const Mat fd = f.matrix.adjoint();
  Mat c(fd.rows(), 2);
  for (int k = 0; k < 2; ++k) c.col(k) = w * fd.col(static_cast<Eigen::Index>(lambda_row(f, k, 0)));
  return c;
}

inline QecMatrix qec_matrix_analytic(const FiniteMatrixGroup& group, const GroupFourierTransform& f, double alpha,
                                     double gamma) {
  const auto grams = loss_gram_matrices(lambda_matrix(group), alpha, gamma);
  const Mat c = logical_coefficients(grams.gamma, f);
  const Mat rs = psd_sqrt(grams.gamma_r);
  const auto n = static_cast<Eigen::Index>(group.size());
  QecMatrix m{Mat::Zero(2 * n, 2 * n)};
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      // sum_{g,h} conj(c_gk) c_hl [Rs]_{gp} [Rs]_{qh} [Gt]_{gh}
      const Mat weighted = (c.col(k).conjugate() * c.col(l).transpose()).cwiseProduct(grams.gamma_t);
      const Mat block = rs.transpose() * weighted * rs.transpose();
      m.entries.block(k * n, l * n, n, n) = block;
    }
  return m;
}

/// Kraus operators C_p = <p|_r U of loss on both modes, where |p>_r is the
/// orthonormal basis of the reflected constellation span,
///   |p>_r = sum_q [Gamma_r^{-1/2}]_{qp} |r q alpha>.
/// A pseudo-inverse is used so that gamma = 0 (all |r q alpha> equal) works.
class FockLossKraus {
 public:
  FockLossKraus(const Constellation& c, double gamma) : config_(c.config()), channel_(gamma) {
    const double r = channel_.r();
    const auto n = static_cast<Eigen::Index>(c.points.size());
    std::vector<FockState> reflected;
    Mat gram_r(n, n);
    for (const auto& p : c.points) reflected.push_back(coherent_state(Vec2(r * p), config_.cutoff));
    for (Eigen::Index g = 0; g < n; ++g)
      for (Eigen::Index h = 0; h < n; ++h)
        gram_r(g, h) = reflected[static_cast<std::size_t>(g)].inner(reflected[static_cast<std::size_t>(h)]);
    const Mat w = psd_pinv_sqrt(gram_r, 1e-14);
    for (Eigen::Index p = 0; p < n; ++p) {
      Vec v = Vec::Zero(config_.dimension());
      for (Eigen::Index q = 0; q < n; ++q) v += w(q, p) * reflected[static_cast<std::size_t>(q)].amplitudes();
      env_.push_back(v);
    }
    // sqrt(C(n,k) gamma^k (1-gamma)^{n-k}) for single-mode loss of k photons from n.
    const int levels = config_.levels();
    weight_ = Eigen::MatrixXd::Zero(levels, levels);
    for (int total = 0; total < levels; ++total)
      for (int k = 0; k <= total; ++k) {
        const double log_binom = std::lgamma(total + 1.0) - std::lgamma(k + 1.0) - std::lgamma(total - k + 1.0);
        const double pk = k == 0 ? 1.0 : std::pow(channel_.gamma, k);
        const double qk = total == k ? 1.0 : std::pow(1.0 - channel_.gamma, total - k);
        weight_(total, k) = std::sqrt(std::exp(log_binom) * pk * qk);
      }
  }

  std::size_t size() const { return env_.size(); }
  const FockConfig& config() const { return config_; }

  /// C_p|psi> = sum_{k1,k2} conj(<k1 k2|p>_r) (E_k1 (x) E_k2)|psi>
  FockState apply(std::size_t p, const FockState& psi) const {
    if (!(psi.config() == config_)) throw input_error("state does not match the Kraus configuration");
    const Vec& env = env_.at(p);
    const int levels = config_.levels();
    FockState out = FockState::zero(config_);
    for (int k1 = 0; k1 < levels; ++k1)
      for (int k2 = 0; k2 < levels; ++k2) {
        const int kk[2] = {k1, k2};
        const cplx e = std::conj(env[config_.index(kk)]);
        if (std::abs(e) < 1e-300) continue;
        for (int m1 = 0; m1 + k1 < levels; ++m1)
          for (int m2 = 0; m2 + k2 < levels; ++m2) {
            const int src[2] = {m1 + k1, m2 + k2}, dst[2] = {m1, m2};
            out.amplitudes()[config_.index(dst)] +=
                e * weight_(m1 + k1, k1) * weight_(m2 + k2, k2) * psi[config_.index(src)];
          }
      }
    return out;
  }

 private:
  FockConfig config_;
  LossChannel channel_;
  std::vector<Vec> env_;
  Eigen::MatrixXd weight_;
};

/// Brute-force QEC matrix from the Fock-space Kraus operators. Also records
/// how far sum_p C_p^dagger C_p is from the identity on the constellation span.
inline QecMatrix qec_matrix_fock(const CodeBasis& code, double gamma) {
  const FockLossKraus kraus(code.constellation, gamma);
  const auto n = static_cast<Eigen::Index>(kraus.size());
  std::vector<std::vector<FockState>> images(2);
  for (int k = 0; k < 2; ++k)
    for (std::size_t p = 0; p < kraus.size(); ++p) images[k].push_back(kraus.apply(p, code.state(k, 0)));
  QecMatrix m{Mat(2 * n, 2 * n)};
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q)
          m.entries(qec_index(k, p, n), qec_index(l, q, n)) =
              images[k][static_cast<std::size_t>(p)].inner(images[l][static_cast<std::size_t>(q)]);

  const auto basis = orthonormal_group_basis(code.constellation, code.gram);
  std::vector<std::vector<FockState>> basis_images(basis.size());
  for (std::size_t g = 0; g < basis.size(); ++g)
    for (std::size_t p = 0; p < kraus.size(); ++p) basis_images[g].push_back(kraus.apply(p, basis[g]));
  Mat completeness = Mat::Zero(n, n);
  for (std::size_t g = 0; g < basis.size(); ++g)
    for (std::size_t h = 0; h < basis.size(); ++h)
      for (std::size_t p = 0; p < kraus.size(); ++p)
        completeness(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) +=
            basis_images[g][p].inner(basis_images[h][p]);
  m.kraus_residual = (completeness - Mat::Identity(n, n)).norm();
  return m;
}

/// F_ent = || tr_L M^{1/2} ||_HS^2 / d^2.
inline double petz_entanglement_fidelity(const QecMatrix& m) {
  if (m.entries.rows() != m.entries.cols() || m.entries.rows() % m.d != 0) throw input_error("QEC matrix has wrong shape");
  if ((m.entries - m.entries.adjoint()).norm() > 1e-8 * std::max(1.0, m.entries.norm()))
    throw numerical_error("QEC matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es((m.entries + m.entries.adjoint()) / 2.0);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) throw numerical_error("QEC matrix is not positive semidefinite");
  const Mat root = psd_sqrt(m.entries, 1e-14);
  const Eigen::Index n = m.entries.rows() / m.d;
  Mat reduced = Mat::Zero(n, n);
  for (int k = 0; k < m.d; ++k) reduced += root.block(k * n, k * n, n, n);
  const double f = reduced.squaredNorm() / double(m.d * m.d);
  return std::clamp(f, 0.0, 1.0);
}

inline double petz_infidelity(const FiniteMatrixGroup& group, const GroupFourierTransform& f, double alpha,
                              double gamma) {
  return 1.0 - petz_entanglement_fidelity(qec_matrix_analytic(group, f, alpha, gamma));
}

/// Pairwise overlaps of |0,psi>, |1,psi>, a1|., a2|. (normalized); returns the
/// largest magnitude. Zero means first-order Knill-Laflamme for {1, a1, a2}.
inline double kl_first_order_check(const CodeBasis& code, const Vec2& psi_m) {
  if (std::abs(psi_m.norm() - 1.0) > 1e-12) throw input_error("multiplicity state must be normalized");
  std::vector<FockState> states;
  for (int l = 0; l < 2; ++l) {
    const FockState s = code.state(l, 0) * psi_m[0] + code.state(l, 1) * psi_m[1];
    states.push_back(s.normalized());
    states.push_back(annihilate(s, 0).normalized());
    states.push_back(annihilate(s, 1).normalized());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) worst = std::max(worst, std::abs(states[i].inner(states[j])));
  return worst;
}

struct KernelCheck {
  std::vector<std::pair<std::string, double>> residuals;  // per operator, relative to alpha^4
  double max_residual = 0.0;
  double parity_residual = 0.0;  // || Pi_odd s - s || over basis states
};

/// Checks that the code states lie in the kernel of
///   L1 = a1^4 - a^4, L2 = a2^4 - a^4, L12 = a1^2 a2^2 + a^4, L0 = a1^2 + a2^2
/// (signs of the a^4 terms flip for the pi(H)-deformed code), and have odd
/// total photon number.
inline KernelCheck lindblad_kernel_check(const CodeBasis& code, bool deformed) {
  const CodeBasis target = deformed ? deformed_code(code.constellation, paulis::H(), code.fourier) : code;
  const double a4 = std::pow(std::abs(code.constellation.alpha_vec[0]), 4);
  const double sign = deformed ? -1.0 : 1.0;
  const FockConfig cfg = target.config();
  KernelCheck out;
  out.residuals = {{"L1", 0.0}, {"L2", 0.0}, {"L12", 0.0}, {"L0", 0.0}};
  for (const auto& s : target.basis_states) {
    const FockState a1_2 = annihilate_power(s, 0, 2), a2_2 = annihilate_power(s, 1, 2);
    const FockState l1 = annihilate_power(a1_2, 0, 2) - s * cplx(sign * a4);
    const FockState l2 = annihilate_power(a2_2, 1, 2) - s * cplx(sign * a4);
    const FockState l12 = annihilate_power(a1_2, 1, 2) + s * cplx(sign * a4);
    const FockState l0 = a1_2 + a2_2;
    const double r[4] = {l1.norm() / a4, l2.norm() / a4, l12.norm() / a4, l0.norm() / std::sqrt(a4)};
    for (int i = 0; i < 4; ++i) out.residuals[i].second = std::max(out.residuals[i].second, r[i]);

    FockState odd = s;
    for (Eigen::Index i = 0; i < cfg.dimension(); ++i) {
      const auto n = cfg.multi_index(i);
      if ((n[0] + n[1]) % 2 == 0) odd.amplitudes()[i] = 0.0;
    }
    out.parity_residual = std::max(out.parity_residual, (odd - s).norm());
  }
  for (const auto& [name, value] : out.residuals) out.max_residual = std::max(out.max_residual, value);
  return out;
}

// Fidelity sweeps over the D8 code with alpha_vec = (alpha, i alpha).

struct SweepPoint {
  double x = 0.0;
  double infidelity = 0.0;
  double condition_number = 0.0;  // of the input Gram matrix
  bool flagged = false;  // skipped: Gram matrix ill-conditioned or numerics failed
  std::string note;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> argmin;  // x at the smallest infidelity over unflagged points
  std::optional<double> slope;   // log-log slope, gamma sweeps only
};

namespace detail {

inline constexpr double kMaxGramCondition = 1e10;

inline SweepPoint sweep_point(const FiniteMatrixGroup& group, const GroupFourierTransform& f, double x, double alpha,
                              double gamma) {
  SweepPoint pt{x, 0.0, 0.0, false, {}};
  try {
    const Mat gram = loss_gram_matrices(lambda_matrix(group), alpha, gamma).gamma;
    const Eigen::VectorXd w = Eigen::SelfAdjointEigenSolver<Mat>(gram).eigenvalues();
    pt.condition_number = w.minCoeff() > 0.0 ? w.maxCoeff() / w.minCoeff() : INFINITY;
    if (pt.condition_number > kMaxGramCondition) {
      pt.flagged = true;
      pt.note = "gram_ill_conditioned";
      return pt;
    }
    pt.infidelity = petz_infidelity(group, f, alpha, gamma);
  } catch (const numerical_error& e) {
    pt.flagged = true;
    pt.note = e.what();
  }
  return pt;
}

inline void fill_argmin(SweepResult& r) {
  const SweepPoint* best = nullptr;
  for (const auto& p : r.points)
    if (!p.flagged && (best == nullptr || p.infidelity < best->infidelity)) best = &p;
  if (best) r.argmin = best->x;
}

inline std::pair<FiniteMatrixGroup, GroupFourierTransform> d8_setup() {
  auto group = make_group(GroupSpec::d8());
  auto f = build_fourier_transform(group, irrep_table(group, GroupSpec::d8()));
  return {std::move(group), std::move(f)};
}

}  // namespace detail

inline SweepResult sweep_alpha(double gamma, const std::vector<double>& alpha_grid) {
  (void)LossChannel(gamma);
  const auto [group, f] = detail::d8_setup();
  SweepResult r;
  for (double alpha : alpha_grid) {
    if (!(alpha > 0.0)) throw input_error("alpha must be positive");
    r.points.push_back(detail::sweep_point(group, f, alpha, alpha, gamma));
  }
  detail::fill_argmin(r);
  return r;
}

/// Least-squares slope of log(infidelity) against log(gamma) over the points
/// with gamma in [lo, hi] and positive infidelity.
inline std::optional<double> loglog_slope(const std::vector<SweepPoint>& points, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : points) {
    if (p.flagged || p.x < lo * (1 - 1e-12) || p.x > hi * (1 + 1e-12) || !(p.infidelity > 0.0)) continue;
    const double x = std::log(p.x), y = std::log(p.infidelity);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  if (n < 2) return std::nullopt;
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

inline SweepResult sweep_gamma(double alpha, const std::vector<double>& gamma_grid) {
  if (!(alpha > 0.0)) throw input_error("alpha must be positive");
  const auto [group, f] = detail::d8_setup();
  SweepResult r;
  for (double gamma : gamma_grid) {
    (void)LossChannel(gamma);
    r.points.push_back(detail::sweep_point(group, f, gamma, alpha, gamma));
  }
  detail::fill_argmin(r);
  r.slope = loglog_slope(r.points, 1e-3, 1e-2);
  return r;
}

}  // namespace fcat
