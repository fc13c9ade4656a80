#include "cclab/pauli.hpp"

#include <stdexcept>

namespace cclab {

namespace {

std::uint32_t shift_bits(std::uint32_t v, int L, int x) {
  x = ((x % L) + L) % L;
  const std::uint32_t mask = (L == 32) ? ~0u : ((1u << L) - 1);
  return ((v << x) | (v >> (L - x))) & mask;
}

}  // namespace

PauliOp PauliOp::multiply(const PauliOp& rhs) const {
  if (sites != rhs.sites) throw std::invalid_argument("PauliOp dimension mismatch");
  PauliOp out;
  out.sites = sites;
  out.flip = flip ^ rhs.flip;
  out.coeff.resize(coeff.size());
  for (std::size_t r = 0; r < coeff.size(); ++r)
    out.coeff[r] = coeff[r] * rhs.coeff[r ^ flip];
  return out;
}

PauliOp PauliOp::adjoint() const {
  PauliOp out;
  out.sites = sites;
  out.flip = flip;
  out.coeff.resize(coeff.size());
  for (std::size_t r = 0; r < coeff.size(); ++r) out.coeff[r] = std::conj(coeff[r ^ flip]);
  return out;
}

PauliOp PauliOp::translated(int x) const {
  PauliOp out;
  out.sites = sites;
  out.flip = shift_bits(flip, sites, x);
  out.coeff.resize(coeff.size());
  // Conjugation by the shift permutation S: (S A S^-1)[p(r)..] keeps the
  // row value of the preimage.
  for (std::size_t r = 0; r < coeff.size(); ++r)
    out.coeff[shift_bits(static_cast<std::uint32_t>(r), sites, x)] = coeff[r];
  return out;
}

double PauliOp::norm() const {
  double m = 0;
  for (const Complex& c : coeff) m = std::max(m, std::abs(c));
  return m;
}

Eigen::MatrixXcd PauliOp::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t r = 0; r < coeff.size(); ++r)
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ flip)) = coeff[r];
  return m;
}

void PauliOp::apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& w) const {
  w.resize(v.size());
  for (std::size_t r = 0; r < coeff.size(); ++r)
    w(static_cast<Eigen::Index>(r)) = coeff[r] * v(static_cast<Eigen::Index>(r ^ flip));
}

std::set<int> PauliOp::detect_support() const {
  std::set<int> support;
  for (int s = 0; s < sites; ++s) {
    const std::uint32_t bit = 1u << s;
    if (flip & bit) {
      support.insert(s);
      continue;
    }
    // Site acts diagonally; non-trivial iff the value depends on bit s.
    for (std::size_t r = 0; r < coeff.size(); ++r) {
      if (std::abs(coeff[r] - coeff[r ^ bit]) > 1e-14 * (std::abs(coeff[r]) + 1.0)) {
        support.insert(s);
        break;
      }
    }
  }
  return support;
}

PauliOp pauli_identity(int L) {
  if (L < 1 || L > 28) throw std::invalid_argument("unsupported chain length");
  PauliOp op;
  op.sites = L;
  op.flip = 0;
  op.coeff.assign(std::size_t{1} << L, Complex(1.0, 0.0));
  return op;
}

PauliOp pauli_string(int L, const std::vector<std::pair<int, char>>& factors) {
  PauliOp op = pauli_identity(L);
  std::uint32_t zmask = 0, ymask = 0, xmask = 0;
  for (auto [site, c] : factors) {
    const std::uint32_t bit = 1u << (((site % L) + L) % L);
    if ((zmask | ymask | xmask) & bit)
      throw std::invalid_argument("repeated site in Pauli string");
    switch (c) {
      case 'I': break;
      case 'X': xmask |= bit; break;
      case 'Y': ymask |= bit; break;
      case 'Z': zmask |= bit; break;
      default: throw std::invalid_argument(std::string("unknown Pauli factor '") + c + "'");
    }
  }
  op.flip = xmask | ymask;
  const int ny = __builtin_popcount(ymask);
  for (std::size_t r = 0; r < op.coeff.size(); ++r) {
    const auto rb = static_cast<std::uint32_t>(r);
    // Z gives (-1)^bit; Y gives -i on bit 0 rows and +i on bit 1 rows.
    int ipow = 2 * __builtin_popcount(rb & ymask) - ny;  // i^ipow
    ipow = ((ipow % 4) + 4) % 4;
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Complex v = kIPow[ipow];
    if (__builtin_popcount(rb & zmask) & 1) v = -v;
    op.coeff[r] = v;
  }
  return op;
}

PauliOp pauli_string_at(int L, const std::string& ops, int site) {
  std::vector<std::pair<int, char>> factors;
  for (std::size_t i = 0; i < ops.size(); ++i)
    factors.emplace_back(site + static_cast<int>(i), ops[i]);
  return pauli_string(L, factors);
}

}  // namespace cclab
