#pragma once

#include <Eigen/Dense>
#include <complex>
#include <set>
#include <string>
#include <vector>

namespace cclab {

using Complex = std::complex<double>;

/// Generalized permutation matrix on the chain Hilbert space (C^2)^{ox L}:
/// exactly one nonzero per row, at column row ^ flip. Pauli strings have
/// this form and the form is closed under products and adjoints, so all
/// t=0 observable algebra stays O(2^L) instead of O(4^L).
/// Site s corresponds to bit s of the basis index.
struct PauliOp {
  int sites = 0;
  std::uint32_t flip = 0;
  std::vector<Complex> coeff;  // value at (r, r ^ flip), indexed by r

  std::size_t dim() const { return coeff.size(); }

  PauliOp multiply(const PauliOp& rhs) const;
  PauliOp adjoint() const;
  /// Cyclic site shift by x (operator conjugated by the shift permutation).
  PauliOp translated(int x) const;
  /// Operator norm: max row magnitude, exact for this matrix class.
  double norm() const;
  Eigen::MatrixXcd to_dense() const;
  /// w = A v in O(2^L).
  void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& w) const;
  /// Sites on which the operator acts non-trivially, detected from the
  /// matrix structure.
  std::set<int> detect_support() const;
};

/// Identity on L sites.
PauliOp pauli_identity(int L);

/// Pauli string from per-site factors, e.g. {{0,'Z'},{3,'X'}}; sites are
/// taken mod L. Characters I, X, Y, Z.
PauliOp pauli_string(int L, const std::vector<std::pair<int, char>>& factors);

/// Contiguous string "ZZ" starting at `site` (periodic wrap).
PauliOp pauli_string_at(int L, const std::string& ops, int site);

}  // namespace cclab
