#pragma once

// Logical gates and measurements of the two-mode Pauli Fourier code.

#include "fcat/encoder.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>

namespace fcat {

namespace logical {
/// Operators on the (l, m) code basis ordered (0,0), (0,1), (1,0), (1,1).
inline Mat on_l(const Mat2& a) { return kron(Mat(a), Mat::Identity(2, 2)); }
inline Mat on_m(const Mat2& a) { return kron(Mat::Identity(2, 2), Mat(a)); }
inline Mat both(const Mat2& a, const Mat2& b) { return kron(Mat(a), Mat(b)); }
}  // namespace logical

struct LogicalAction {
  Mat matrix;                 // [(l',m'),(l,m)] = <target l',m'|op|l,m>
  double leakage = 0.0;       // worst norm outside the target code space
  double global_phase = 0.0;  // set when compared against a target
};

template <class Op>
LogicalAction logical_action(const Op& physical_op, const CodeBasis& code, const CodeBasis& target) {
  if (!(physical_op.config() == code.config()) || !(code.config() == target.config()))
    throw input_error("operator and code bases must share a Fock configuration");
  LogicalAction out{Mat(4, 4), 0.0, 0.0};
  for (int j = 0; j < 4; ++j) {
    const FockState image = physical_op.apply(code.basis_states[static_cast<std::size_t>(j)]);
    const Vec comps = target.components(image);
    out.matrix.col(j) = comps;
    const double outside = std::max(0.0, image.norm() * image.norm() - comps.squaredNorm());
    out.leakage = std::max(out.leakage, std::sqrt(outside));
  }
  return out;
}

template <class Op>
LogicalAction logical_action(const Op& physical_op, const CodeBasis& code) {
  return logical_action(physical_op, code, code);
}

/// Phase-free distance of an action from `target`; records the phase.
inline PhaseFreeComparison compare_action(LogicalAction& action, const Mat& target) {
  const auto cmp = compare_up_to_phase(action.matrix, target);
  action.global_phase = cmp.phase;
  return cmp;
}

// Photon-number phases, reduced with integer arithmetic before exponentiating.

/// i^k for integer k, exactly.
inline cplx i_power(long long k) {
  static constexpr std::array<cplx, 4> table{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return table[static_cast<std::size_t>(((k % 4) + 4) % 4)];
}

/// i^{n2^2}
inline DiagonalOperator self_kerr(FockConfig config) {
  return number_diagonal_operator(
      [](std::span<const int> n) {
        return i_power(static_cast<long long>(n[1]) * n[1] % 4);
      },
      config);
}

/// (-1)^{n2}
inline DiagonalOperator mode2_parity(FockConfig config) {
  return number_diagonal_operator([](std::span<const int> n) { return cplx(n[1] % 2 == 0 ? 1.0 : -1.0); }, config);
}

/// -i^{n1+n2}
inline DiagonalOperator total_number_phase(FockConfig config) {
  return number_diagonal_operator([](std::span<const int> n) { return -i_power(n[0] + n[1]); },
                                  config);
}

/// e^{i pi n^2 / 2} on mode 2.
inline DiagonalOperator snap_s(FockConfig config) {
  return number_diagonal_operator(
      [](std::span<const int> n) {
        return i_power(static_cast<long long>(n[1]) * n[1] % 4);
      },
      config);
}

/// n^4 mod 8, exact for any n >= 0.
inline int fourth_power_mod8(long long n) {
  const long long r = n % 8;
  return static_cast<int>(r * r % 8 * r % 8 * r % 8);
}

/// e^{i pi n^4 / 4} on mode 2.
inline DiagonalOperator snap_t(FockConfig config) {
  return number_diagonal_operator(
      [](std::span<const int> n) {
        return std::polar(1.0, std::numbers::pi / 4.0 * static_cast<double>(fourth_power_mod8(n[1])));
      },
      config);
}

/// Self-Kerr i^{n2^2} as a logical gate; expected S (x) 1.
inline LogicalAction s_gate_check(const CodeBasis& code) {
  auto action = logical_action(self_kerr(code.config()), code);
  compare_action(action, logical::on_l(paulis::S()));
  return action;
}

/// Cross-Kerr (-1)^{n2 n4} between two copies of the code, evaluated on
/// product states. The operator only depends on the parities of n2 and n4, so
/// each entry factors into parity-resolved overlaps of the single-code states.
/// Rows and columns are indexed (l1 m1) * 4 + (l2 m2).
inline Mat cz_gate_check(const CodeBasis& code) {
  const FockConfig cfg = code.config();
  // overlap[s](a, b) = sum_{n2 = s mod 2} conj(a_n) b_n
  std::array<Mat, 2> overlap{Mat::Zero(4, 4), Mat::Zero(4, 4)};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (Eigen::Index i = 0; i < cfg.dimension(); ++i) {
        const int n2 = cfg.multi_index(i)[1];
        overlap[n2 % 2](a, b) += std::conj(code.basis_states[a][i]) * code.basis_states[b][i];
      }
  Mat out = Mat::Zero(16, 16);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) out += (s * t == 1 ? -1.0 : 1.0) * kron(overlap[s], overlap[t]);
  return out;
}

/// Logical CZ on two (l, m) registers: (-1)^{l1 l2}.
inline Mat logical_cz() {
  Mat out = Mat::Identity(16, 16);
  for (int i = 0; i < 16; ++i)
    if ((i >> 3) == 1 && ((i >> 1) & 1) == 1) out(i, i) = -1.0;
  return out;
}

/// pi(U) on the code against the U-deformed code with target U (x) conj(U).
struct DeformationCheck {
  double max_infidelity = 0.0;    // pi(U)|l,m> vs deformed code state
  double round_trip = 0.0;        // pi(U^dag) pi(U) back on the original code
  LogicalAction action;           // relative to the deformed basis
};

inline DeformationCheck hadamard_deformation_check(const CodeBasis& code, const Mat2& u = paulis::H()) {
  const CodeBasis deformed = deformed_code(code.constellation, u, code.fourier);
  const auto pu = passive_gaussian_unitary(u, code.config());
  const auto pu_dag = passive_gaussian_unitary(Mat2(u.adjoint()), code.config());
  DeformationCheck out;
  out.action = logical_action(pu, code, deformed);
  const Mat target = logical::both(u, Mat2(u.conjugate()));
  for (int j = 0; j < 4; ++j) {
    const FockState image = pu.apply(code.basis_states[static_cast<std::size_t>(j)]);
    const FockState expected = deformed.logical_state(target.col(j));
    out.max_infidelity = std::max(out.max_infidelity, infidelity(image, expected));
    out.round_trip = std::max(out.round_trip, infidelity(pu_dag.apply(image), code.basis_states[static_cast<std::size_t>(j)]));
  }
  return out;
}

/// i^{n2^2} pi(H) i^{n2^2} pi(H) i^{n2^2}; expected H (x) 1 up to a phase.
inline LogicalAction composite_hadamard_check(const CodeBasis& code) {
  const auto kerr = self_kerr(code.config());
  const auto ph = passive_gaussian_unitary(paulis::H(), code.config());
  struct Sequence {
    const DiagonalOperator& kerr;
    const FockOperator& ph;
    FockConfig config() const { return kerr.config(); }
    FockState apply(const FockState& s) const { return kerr.apply(ph.apply(kerr.apply(ph.apply(kerr.apply(s))))); }
  } sequence{kerr, ph};
  auto action = logical_action(sequence, code);
  compare_action(action, logical::on_l(paulis::H()));
  return action;
}

/// Projected drive Pi (a1^2 + a1^dag^2) Pi on the code basis.
struct ZenoGate {
  double theta = 0.0;
  Mat projected_hamiltonian;
  double alpha_squared = 0.0;
  double residual = 0.0;        // || H - 2 alpha^2 Z (x) Z ||
  double eigen_residual = 0.0;  // max || a1^2|l,m> - (-1)^{l+m} alpha^2 |l,m> ||

  /// exp(i theta H / (2 alpha^2)), which is e^{i theta Z (x) Z} when residual = 0.
  Mat unitary(double t) const {
    Eigen::SelfAdjointEigenSolver<Mat> es(projected_hamiltonian / (2.0 * alpha_squared));
    Vec phases(4);
    for (int i = 0; i < 4; ++i) phases[i] = std::polar(1.0, t * es.eigenvalues()[i]);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  }
  Mat unitary() const { return unitary(theta); }
};

inline ZenoGate zeno_projected_hamiltonian(const CodeBasis& code, double theta = std::numbers::pi / 4) {
  ZenoGate z;
  z.theta = theta;
  const double a2 = std::norm(code.constellation.alpha_vec[0]);
  z.alpha_squared = a2;
  Mat lowered(4, 4);  // <j|a1^2|k>
  for (int k = 0; k < 4; ++k) {
    const FockState& s = code.basis_states[static_cast<std::size_t>(k)];
    const FockState image = annihilate_power(s, 0, 2);
    lowered.col(k) = code.components(image);
    const int l = k / 2, m = k % 2;
    const double sign = (l + m) % 2 == 0 ? 1.0 : -1.0;
    z.eigen_residual = std::max(z.eigen_residual, (image - s * cplx(sign * a2)).norm());
  }
  z.projected_hamiltonian = lowered + lowered.adjoint();
  const Mat zz = logical::both(paulis::Z(), paulis::Z());
  z.residual = (z.projected_hamiltonian - 2.0 * a2 * zz).norm();
  return z;
}

/// The two SNAP actions on mode 2: S (x) 1 and T (x) 1 (the latter up to phase).
struct SnapCheck {
  LogicalAction s;
  LogicalAction t;
};

inline SnapCheck snap_gate_check(const CodeBasis& code) {
  SnapCheck out{logical_action(snap_s(code.config()), code), logical_action(snap_t(code.config()), code)};
  compare_action(out.s, logical::on_l(paulis::S()));
  compare_action(out.t, logical::on_l(paulis::T()));
  return out;
}

/// Composite Hadamard on |0,0> followed by the Zeno gate.
struct TStatePreparation {
  Vec logical;                    // amplitudes on the code basis
  double relative_phase = 0.0;    // arg(c_{1,0} / c_{0,0})
  double multiplicity_leak = 0.0; // weight on m = 1, before or after the Zeno step
};

inline TStatePreparation t_state_preparation(const CodeBasis& code, double theta = std::numbers::pi / 4) {
  const LogicalAction h = composite_hadamard_check(code);
  Vec plus = h.matrix.col(0);
  TStatePreparation out;
  out.multiplicity_leak = std::norm(plus[1]) + std::norm(plus[3]);
  out.logical = zeno_projected_hamiltonian(code, theta).unitary() * plus;
  out.multiplicity_leak = std::max(out.multiplicity_leak, std::norm(out.logical[1]) + std::norm(out.logical[3]));
  out.relative_phase = std::arg(out.logical[2] / out.logical[0]);
  return out;
}

// Z_L Y_M measurement by photon counting modulo 4.

/// (|l,0> + y i |l,1>) / sqrt 2 with y = +1 or -1.
inline FockState zy_eigenstate(const CodeBasis& code, int l, int y) {
  if ((l != 0 && l != 1) || (y != 1 && y != -1)) throw input_error("eigenstate labels are l in {0,1}, y in {+1,-1}");
  return (code.state(l, 0) + code.state(l, 1) * (double(y) * I_UNIT)) * cplx(1.0 / std::sqrt(2.0));
}

inline std::string zy_label(int l, int y) { return "|" + std::to_string(l) + (y > 0 ? ",+i>" : ",-i>"); }

struct Mod4Measurement {
  std::map<std::pair<int, int>, std::string> outcome_table;  // (n1 mod 4, n2 mod 4) -> eigenstate
  std::vector<DiagonalOperator> projectors;                  // index 4 * (n1 mod 4) + (n2 mod 4)

  const DiagonalOperator& projector(int r1, int r2) const { return projectors.at(static_cast<std::size_t>(4 * r1 + r2)); }

  /// Outcome probabilities indexed [n1 mod 4][n2 mod 4].
  Eigen::Matrix4d distribution(const FockState& psi) const {
    Eigen::Matrix4d p;
    const double norm2 = psi.norm() * psi.norm();
    for (int r1 = 0; r1 < 4; ++r1)
      for (int r2 = 0; r2 < 4; ++r2)
        p(r1, r2) = (projector(r1, r2).diagonal().cwiseProduct(psi.amplitudes().cwiseAbs2())).sum().real() / norm2;
    return p;
  }
};

/// Z_L from the parity of n1: odd means l = 0.
inline int readout_z(int n1) { return n1 % 2 == 1 ? 0 : 1; }

/// Y_M from the total count modulo 4: {0,1} -> -i, {2,3} -> +i. Without loss
/// only 1 and 3 occur; one lost photon moves them to 0 and 2.
inline int readout_y(int n1, int n2) { return (n1 + n2) % 4 < 2 ? -1 : 1; }

inline Mod4Measurement make_mod4_measurement(FockConfig config) {
  if (config.modes != 2) throw input_error("mod-4 measurement needs two modes");
  Mod4Measurement m;
  for (int r1 = 0; r1 < 4; ++r1)
    for (int r2 = 0; r2 < 4; ++r2) {
      Vec d(config.dimension());
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        const auto n = config.multi_index(i);
        d[i] = (n[0] % 4 == r1 && n[1] % 4 == r2) ? 1.0 : 0.0;
      }
      m.projectors.emplace_back(config, d);
      if ((r1 + r2) % 2 == 1) m.outcome_table[{r1, r2}] = zy_label(readout_z(r1), readout_y(r1, r2));
    }
  return m;
}

struct Mod4Report {
  double completeness = 0.0;       // || sum P - 1 ||_max
  double max_mass_outside = 0.0;   // per eigenstate, outside its table cells
  double max_z_error = 0.0;        // mass with the wrong n1 or n2 parity
  double max_loss_y_error = 0.0;   // wrong Y_M mass after one lost photon
};

struct Mod4Result {
  Mod4Measurement measurement;
  Mod4Report report;
};

inline Mod4Result mod4_measurement(const CodeBasis& code) {
  Mod4Result out{make_mod4_measurement(code.config()), {}};
  const auto& meas = out.measurement;
  Vec total = Vec::Zero(code.config().dimension());
  for (const auto& p : meas.projectors) total += p.diagonal();
  out.report.completeness = (total.array() - 1.0).abs().maxCoeff();

  for (int l = 0; l < 2; ++l)
    for (int y : {1, -1}) {
      const FockState psi = zy_eigenstate(code, l, y);
      const auto p = meas.distribution(psi);
      double outside = 0.0, z_error = 0.0;
      for (int r1 = 0; r1 < 4; ++r1)
        for (int r2 = 0; r2 < 4; ++r2) {
          const auto cell = meas.outcome_table.find({r1, r2});
          if (cell == meas.outcome_table.end() || cell->second != zy_label(l, y)) outside += p(r1, r2);
          // l = 0 has odd n1 and even n2.
          if (readout_z(r1) != l || (r2 % 2 == 0) != (l == 0)) z_error += p(r1, r2);
        }
      out.report.max_mass_outside = std::max(out.report.max_mass_outside, outside);
      out.report.max_z_error = std::max(out.report.max_z_error, z_error);
      for (int mode = 0; mode < 2; ++mode) {
        const auto lost = meas.distribution(annihilate(psi, mode));
        double wrong = 0.0;
        for (int r1 = 0; r1 < 4; ++r1)
          for (int r2 = 0; r2 < 4; ++r2)
            if (readout_y(r1, r2) != y) wrong += lost(r1, r2);
        out.report.max_loss_y_error = std::max(out.report.max_loss_y_error, wrong);
      }
    }
  return out;
}

/// Compares the eigenstates with the Fock series
///   |l=0, +-i> ~ sum_{p,q} ((-1)^q -+ (-1)^p) f_{p,q} |2p+1>|2q>
/// (modes exchanged for l = 1), f_{p,q} = a^{2p+2q+1} e^{-a^2} / sqrt((2p+1)! (2q)!).
/// Returns the largest amplitude deviation after normalization and phase removal.
inline double zy_eigenstate_expansion(const CodeBasis& code) {
  const FockConfig cfg = code.config();
  const double a = std::abs(code.constellation.alpha_vec[0]);
  auto f = [a](int p, int q) {
    const double log_f = (2.0 * p + 2.0 * q + 1.0) * std::log(a) - a * a -
                         0.5 * (std::lgamma(2.0 * p + 2.0) + std::lgamma(2.0 * q + 1.0));
    return std::exp(log_f);
  };
  double worst = 0.0;
  for (int l = 0; l < 2; ++l)
    for (int y : {1, -1}) {
      FockState series = FockState::zero(cfg);
      for (int p = 0; 2 * p + 1 <= cfg.cutoff; ++p)
        for (int q = 0; 2 * q <= cfg.cutoff; ++q) {
          const double sq = q % 2 == 0 ? 1.0 : -1.0, sp = p % 2 == 0 ? 1.0 : -1.0;
          const double coeff = (sq - y * sp) * f(p, q);
          const int odd = 2 * p + 1, even = 2 * q;
          const int n[2] = {l == 0 ? odd : even, l == 0 ? even : odd};
          series.amplitudes()[cfg.index(n)] = coeff;
        }
      const FockState psi = zy_eigenstate(code, l, y).normalized();
      series = series.normalized();
      const cplx overlap = series.inner(psi);
      const FockState aligned = series * std::polar(1.0, std::arg(overlap));
      worst = std::max(worst, (psi.amplitudes() - aligned.amplitudes()).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace fcat
