#pragma once

// Finite subgroups of U(2), their irreducible representations and the group
// quantum Fourier transform.

#include "fcat/types.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fcat {

inline constexpr double kElementTolerance = 1e-9;

struct GroupElement {
  Mat2 matrix;
  std::size_t index = 0;
};

/// An ordered, multiplicatively closed set of 2x2 unitaries. Immutable once
/// built; indices are stable and reproducible across runs.
class FiniteMatrixGroup {
 public:
  FiniteMatrixGroup() = default;

  /// Builds the group tables from an already-closed element list. The first
  /// element closest to the identity becomes `identity_index`.
  explicit FiniteMatrixGroup(std::vector<Mat2> matrices) {
    const std::size_t n = matrices.size();
    elements_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) elements_.push_back({matrices[i], i});

    const auto id = find(Mat2::Identity());
    if (!id) throw input_error("element list does not contain the identity");
    identity_ = *id;

    cayley_.assign(n, std::vector<std::size_t>(n, 0));
    inverse_.assign(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto k = find(elements_[i].matrix * elements_[j].matrix);
        if (!k) throw input_error("element list is not closed under multiplication");
        cayley_[i][j] = *k;
        if (*k == identity_) {
          if (inverse_[i] != n && inverse_[i] != j) throw input_error("inverse is not unique");
          inverse_[i] = j;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (inverse_[i] == n) throw input_error("element has no inverse in the list");
  }

  std::size_t size() const { return elements_.size(); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const Mat2& matrix(std::size_t i) const { return elements_.at(i).matrix; }
  std::size_t identity_index() const { return identity_; }
  std::size_t multiply(std::size_t g, std::size_t h) const { return cayley_.at(g).at(h); }
  std::size_t inverse(std::size_t g) const { return inverse_.at(g); }
  const std::vector<std::vector<std::size_t>>& cayley() const { return cayley_; }

  /// Index of the element equal to `m` within kElementTolerance (Frobenius).
  std::optional<std::size_t> find(const Mat2& m) const {
    for (const auto& e : elements_)
      if ((e.matrix - m).norm() <= kElementTolerance) return e.index;
    return std::nullopt;
  }

 private:
  std::vector<GroupElement> elements_;
  std::vector<std::vector<std::size_t>> cayley_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
};

/// Breadth-first closure of the generators starting at the identity. New
/// elements are discovered as generator * element, generators in the order
/// given, so the resulting index order is deterministic.
inline FiniteMatrixGroup generate_group(std::span<const Mat2> generators, std::size_t max_order) {
  if (max_order < 1) throw input_error("max_order must be at least 1");
  for (const auto& g : generators)
    if (!is_unitary(g, 1e-12)) throw input_error("generator is not unitary");

  std::vector<Mat2> found{Mat2::Identity()};
  std::deque<std::size_t> frontier{0};
  auto known = [&](const Mat2& m) {
    for (const auto& f : found)
      if ((f - m).norm() <= kElementTolerance) return true;
    return false;
  };
  while (!frontier.empty()) {
    const Mat2 current = found[frontier.front()];
    frontier.pop_front();
    for (const auto& g : generators) {
      const Mat2 next = g * current;
      if (known(next)) continue;
      if (found.size() >= max_order) throw input_error("group too large or not finite");
      found.push_back(next);
      frontier.push_back(found.size() - 1);
    }
  }
  return FiniteMatrixGroup(std::move(found));
}

inline FiniteMatrixGroup generate_group(std::initializer_list<Mat2> generators, std::size_t max_order) {
  const std::vector<Mat2> gens(generators);
  return generate_group(std::span<const Mat2>(gens), max_order);
}

namespace paulis {
inline Mat2 I() { return Mat2::Identity(); }
inline Mat2 X() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 Z() { Mat2 m; m << 1, 0, 0, -1; return m; }
inline Mat2 H() { Mat2 m; m << 1, 1, 1, -1; return m / std::sqrt(2.0); }
inline Mat2 S() { Mat2 m; m << 1, 0, 0, I_UNIT; return m; }
inline Mat2 T() { Mat2 m; m << 1, 0, 0, std::polar(1.0, std::numbers::pi / 4); return m; }
}  // namespace paulis

enum class GroupKind { D8, Q8, Cyclic };

/// Which supported group; `order` is only read for the cyclic group Z_N.
struct GroupSpec {
  GroupKind kind = GroupKind::D8;
  std::size_t order = 8;

  static GroupSpec d8() { return {GroupKind::D8, 8}; }
  static GroupSpec q8() { return {GroupKind::Q8, 8}; }
  static GroupSpec cyclic(std::size_t n) { return {GroupKind::Cyclic, n}; }
};

/// Canonical generators: D8 = <X, Z>, Q8 = <iX, iZ>, Z_N = <diag(1, w)>.
inline FiniteMatrixGroup make_group(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupKind::D8:
      return generate_group({paulis::X(), paulis::Z()}, 8);
    case GroupKind::Q8:
      return generate_group({I_UNIT * paulis::X(), I_UNIT * paulis::Z()}, 8);
    case GroupKind::Cyclic: {
      if (spec.order < 1) throw input_error("cyclic group order must be positive");
      Mat2 g = Mat2::Identity();
      g(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(spec.order));
      return generate_group({g}, spec.order);
    }
  }
  throw input_error("unknown group kind");
}

struct Irrep {
  std::string label;
  int dim = 1;
  std::vector<Mat> matrices;  // one per group element, in group order
};

/// Largest deviation from the homomorphism, unitarity and irreducibility
/// conditions (the character sum is compared to |G|).
struct IrrepDefects {
  double homomorphism = 0.0;
  double unitarity = 0.0;
  double character_norm = 0.0;
};

inline IrrepDefects irrep_defects(const FiniteMatrixGroup& group, const Irrep& rho) {
  IrrepDefects d;
  double chi2 = 0.0;
  for (std::size_t g = 0; g < group.size(); ++g) {
    d.unitarity = std::max(d.unitarity, unitarity_residual(rho.matrices[g]));
    chi2 += std::norm(rho.matrices[g].trace());
    for (std::size_t h = 0; h < group.size(); ++h) {
      const Mat diff = rho.matrices[g] * rho.matrices[h] - rho.matrices[group.multiply(g, h)];
      d.homomorphism = std::max(d.homomorphism, diff.norm());
    }
  }
  d.character_norm = std::abs(chi2 - static_cast<double>(group.size()));
  return d;
}

namespace detail {

// Every element of D8 or Q8 is s * c * X^a Z^b with s = +-1 and c a fixed phase.
// `a` is read off the support, `b` off a ratio of entries that cancels s and c.
inline std::pair<int, int> pauli_exponents(const Mat2& g) {
  const bool off_diagonal = std::abs(g(0, 0)) < 0.5;
  const cplx ratio = off_diagonal ? g(0, 1) / g(1, 0) : g(1, 1) / g(0, 0);
  return {off_diagonal ? 1 : 0, ratio.real() > 0.0 ? 0 : 1};
}

inline Mat scalar(cplx v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace detail

/// Validated irreducible representations for the supported groups, evaluated on
/// the elements of `group` (which must be the group named by `spec`).
/// Ordering: one-dimensional irreps first, then the defining representation.
inline std::vector<Irrep> irrep_table(const FiniteMatrixGroup& group, const GroupSpec& spec) {
  std::vector<Irrep> table;
  const std::size_t n = group.size();
  switch (spec.kind) {
    case GroupKind::D8:
    case GroupKind::Q8: {
      if (n != 8) throw input_error("irrep table not available");
      const char* names[4] = {"trivial", "sign_z", "sign_x", "sign_xz"};
      for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
          Irrep rho{names[2 * x + z], 1, {}};
          for (std::size_t g = 0; g < n; ++g) {
            const auto [a, b] = detail::pauli_exponents(group.matrix(g));
            rho.matrices.push_back(detail::scalar((a * x + b * z) % 2 == 0 ? 1.0 : -1.0));
          }
          table.push_back(std::move(rho));
        }
      }
      Irrep lambda{"lambda", 2, {}};
      for (std::size_t g = 0; g < n; ++g) lambda.matrices.push_back(group.matrix(g));
      table.push_back(std::move(lambda));
      break;
    }
    case GroupKind::Cyclic: {
      if (n != spec.order) throw input_error("irrep table not available");
      const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        Irrep rho{"chi_" + std::to_string(k), 1, {}};
        for (std::size_t g = 0; g < n; ++g) {
          // g = diag(1, w^j); recover j from the phase of the (1,1) entry.
          const double turns = std::arg(group.matrix(g)(1, 1)) / w;
          const auto j = static_cast<long>(std::lround(turns));
          const long power = ((static_cast<long>(k) * j) % static_cast<long>(n) + static_cast<long>(n)) %
                             static_cast<long>(n);
          rho.matrices.push_back(detail::scalar(std::polar(1.0, w * static_cast<double>(power))));
        }
        table.push_back(std::move(rho));
      }
      break;
    }
  }
  for (const auto& rho : table) {
    const auto d = irrep_defects(group, rho);
    if (d.homomorphism > 1e-10 || d.unitarity > 1e-10 || d.character_norm > 1e-8)
      throw input_error("irrep table not available");
  }
  return table;
}

inline std::vector<Irrep> irrep_table(const GroupSpec& spec) { return irrep_table(make_group(spec), spec); }

struct FourierRow {
  std::string irrep;
  int row = 0;  // l
  int col = 0;  // m
};

struct GroupFourierTransform {
  Mat matrix;
  std::vector<FourierRow> row_index;
  std::vector<std::size_t> column_index;

  /// Row of |irrep, l, m>; throws if absent.
  std::size_t row_of(const std::string& irrep, int l, int m) const {
    for (std::size_t r = 0; r < row_index.size(); ++r)
      if (row_index[r].irrep == irrep && row_index[r].row == l && row_index[r].col == m) return r;
    throw input_error("no Fourier row " + irrep + "(" + std::to_string(l) + "," + std::to_string(m) + ")");
  }
};

/// F = sum_g sum_rho sqrt(d_rho/|G|) sum_{l,m} <l|rho(g)|m> |rho,l,m><g|.
/// Rows follow the irrep order and are row-major in (l, m) within an irrep.
inline GroupFourierTransform build_fourier_transform(const FiniteMatrixGroup& group,
                                                     const std::vector<Irrep>& irreps) {
  const std::size_t n = group.size();
  std::size_t total = 0;
  for (const auto& rho : irreps) total += static_cast<std::size_t>(rho.dim * rho.dim);
  if (total != n) throw input_error("dimension mismatch: irreps do not span the regular representation");

  GroupFourierTransform f;
  f.matrix = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g) f.column_index.push_back(g);
  Eigen::Index r = 0;
  for (const auto& rho : irreps) {
    const double c = std::sqrt(static_cast<double>(rho.dim) / static_cast<double>(n));
    for (int l = 0; l < rho.dim; ++l) {
      for (int m = 0; m < rho.dim; ++m, ++r) {
        f.row_index.push_back({rho.label, l, m});
        for (std::size_t g = 0; g < n; ++g)
          f.matrix(r, static_cast<Eigen::Index>(g)) = c * rho.matrices[g](l, m);
      }
    }
  }
  return f;
}

enum class Side { Left, Right };

/// L(g)|h> = |gh>, R(g)|h> = |h g^-1> as permutation matrices.
inline Mat regular_representation(const FiniteMatrixGroup& group, std::size_t g, Side side) {
  if (g >= group.size()) throw input_error("element index out of range");
  const auto n = static_cast<Eigen::Index>(group.size());
  Mat p = Mat::Zero(n, n);
  for (std::size_t h = 0; h < group.size(); ++h) {
    const std::size_t image =
        side == Side::Left ? group.multiply(g, h) : group.multiply(h, group.inverse(g));
    p(static_cast<Eigen::Index>(image), static_cast<Eigen::Index>(h)) = 1.0;
  }
  return p;
}

/// Max over g and both sides of ||F Reg(g) F^dagger - (+)_rho block||_F, with
/// blocks rho(g) (x) 1 for the left and 1 (x) conj(rho(g)) for the right action.
inline double verify_block_diagonalization(const GroupFourierTransform& f, const FiniteMatrixGroup& group,
                                           const std::vector<Irrep>& irreps) {
  const auto n = static_cast<Eigen::Index>(group.size());
  if (f.matrix.rows() != n || f.matrix.cols() != n) throw input_error("dimension mismatch");
  double worst = 0.0;
  for (std::size_t g = 0; g < group.size(); ++g) {
    for (Side side : {Side::Left, Side::Right}) {
      Mat expected = Mat::Zero(n, n);
      Eigen::Index offset = 0;
      for (const auto& rho : irreps) {
        const Mat& m = rho.matrices[g];
        const Mat id = Mat::Identity(rho.dim, rho.dim);
        const Mat block = side == Side::Left ? kron(m, id) : kron(id, Mat(m.conjugate()));
        expected.block(offset, offset, block.rows(), block.cols()) = block;
        offset += block.rows();
      }
      const Mat actual = f.matrix * regular_representation(group, g, side) * f.matrix.adjoint();
      worst = std::max(worst, (actual - expected).norm());
    }
  }
  return worst;
}

/// True iff U g U^dagger equals an element of the group up to a global phase for
/// every g. The phase is fixed by the largest-magnitude entry of U g U^dagger.
inline bool normalizer_membership(const FiniteMatrixGroup& group, const Mat2& u) {
  if (!is_unitary(u, 1e-10)) throw input_error("U is not unitary");
  for (const auto& g : group.elements()) {
    const Mat2 c = u * g.matrix * u.adjoint();
    Eigen::Index i = 0, j = 0;
    c.cwiseAbs().maxCoeff(&i, &j);
    bool matched = false;
    for (const auto& h : group.elements()) {
      if (std::abs(h.matrix(i, j)) < 1e-12) continue;
      cplx phase = c(i, j) / h.matrix(i, j);
      phase /= std::abs(phase);
      if ((c - phase * h.matrix).norm() <= kElementTolerance) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace fcat
