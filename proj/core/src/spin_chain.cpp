#include "cclab/spin_chain.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace cclab {

namespace {

std::uint64_t next_operator_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// Divide-and-conquer eigensolver; Eigen's QR path is ~2.5x slower at
// dimension 4096 on one core.
void eig_hermitian(const Eigen::MatrixXcd& h, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs) {
  const auto n = h.rows();
  evecs = h;
  evals.resize(n);
  const int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), evecs.data(),
                     static_cast<lapack_int>(n), evals.data());
  if (info != 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }
}

// Sites of a dense operator on `sites` qubits that act non-trivially: site
// s is trivial iff A = (Tr_s A / 2) (x) I_s.
std::set<int> dense_support(int sites, const Eigen::MatrixXcd& m) {
  const auto n = m.rows();
  std::set<int> support;
  const double scale = m.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (int s = 0; s < sites; ++s) {
    const Eigen::Index bit = Eigen::Index{1} << s;
    bool trivial = true;
    for (Eigen::Index x = 0; x < n && trivial; ++x) {
      for (Eigen::Index y = 0; y < n; ++y) {
        if (x & bit) continue;
        // off-diagonal in the site factor must vanish, diagonal must match
        if (!(y & bit)) {
          if (std::abs(m(x, y ^ bit)) > tol || std::abs(m(x ^ bit, y)) > tol ||
              std::abs(m(x, y) - m(x ^ bit, y ^ bit)) > tol) {
            trivial = false;
            break;
          }
        }
      }
    }
    if (!trivial) support.insert(s);
  }
  return support;
}

double spectral_norm_impl(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adj,
    Eigen::Index n, double tol = 1e-10, int max_iter = 2000) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  v.normalize();
  Eigen::VectorXcd w(n), u(n);
  double sigma = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    apply(v, w);
    const double s = w.norm();
    if (s < 1e-300) return 0.0;
    apply_adj(w, u);
    const double un = u.norm();
    if (un < 1e-300) return s;
    v = u / un;
    if (std::abs(s - sigma) <= tol * std::max(1.0, s)) return s;
    sigma = s;
  }
  return sigma;
}

}  // namespace

int periodic_distance(int L, int a, int b) {
  int d = std::abs(((a % L) + L) % L - ((b % L) + L) % L);
  return std::min(d, L - d);
}

int set_distance(int L, const std::set<int>& a, const std::set<int>& b) {
  int best = L;
  for (int x : a)
    for (int y : b) best = std::min(best, periodic_distance(L, x, y));
  return best;
}

int support_extent(const std::set<int>& s) {
  if (s.empty()) return 0;
  return *s.rbegin() - *s.begin();
}

// ---------------------------------------------------------------------------
// LocalOperator

LocalOperator LocalOperator::from_pauli(PauliOp op) {
  LocalOperator a;
  a.sites_ = op.sites;
  a.support_ = op.detect_support();
  a.norm_ = op.norm();
  a.sparse_ = std::make_shared<const PauliOp>(std::move(op));
  a.id_ = next_operator_id();
  return a;
}

LocalOperator LocalOperator::from_dense(int L, Eigen::MatrixXcd m) {
  if (m.rows() != m.cols() || m.rows() != static_cast<Eigen::Index>(std::size_t{1} << L))
    throw std::invalid_argument("dense operator dimension does not match chain length");
  LocalOperator a;
  a.sites_ = L;
  a.support_ = dense_support(L, m);
  a.dense_ = std::make_shared<const Eigen::MatrixXcd>(std::move(m));
  a.id_ = next_operator_id();
  return a;
}

LocalOperator LocalOperator::from_dense_with_support(int L, Eigen::MatrixXcd m,
                                                     std::set<int> support) {
  LocalOperator a;
  a.sites_ = L;
  a.support_ = std::move(support);
  a.dense_ = std::make_shared<const Eigen::MatrixXcd>(std::move(m));
  a.id_ = next_operator_id();
  return a;
}

const Eigen::MatrixXcd& LocalOperator::dense() const {
  if (!dense_) dense_ = std::make_shared<const Eigen::MatrixXcd>(sparse_->to_dense());
  return *dense_;
}

double LocalOperator::norm() const {
  if (!norm_) {
    if (sparse_) {
      norm_ = sparse_->norm();
    } else {
      const Eigen::MatrixXcd& m = *dense_;
      norm_ = spectral_norm_impl(
          [&m](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) { w = m * v; },
          [&m](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) { w = m.adjoint() * v; },
          m.rows());
    }
  }
  return *norm_;
}

LocalOperator LocalOperator::translated(int x) const {
  const int L = sites_;
  LocalOperator out;
  out.sites_ = L;
  for (int s : support_) out.support_.insert((((s + x) % L) + L) % L);
  out.norm_ = norm_;
  out.id_ = next_operator_id();
  if (sparse_) {
    out.sparse_ = std::make_shared<const PauliOp>(sparse_->translated(x));
    return out;
  }
  const Eigen::MatrixXcd& m = *dense_;
  const auto n = m.rows();
  auto shift = [L, x](Eigen::Index r) {
    const int xx = ((x % L) + L) % L;
    const auto v = static_cast<std::uint32_t>(r);
    const std::uint32_t mask = (1u << L) - 1;
    return static_cast<Eigen::Index>(((v << xx) | (v >> (L - xx))) & mask);
  };
  Eigen::MatrixXcd t(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index pc = shift(c);
    for (Eigen::Index r = 0; r < n; ++r) t(shift(r), pc) = m(r, c);
  }
  out.dense_ = std::make_shared<const Eigen::MatrixXcd>(std::move(t));
  return out;
}

void LocalOperator::apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& w) const {
  if (sparse_)
    sparse_->apply(v, w);
  else
    w = *dense_ * v;
}

LocalOperator translate(const LocalOperator& a, int x) { return a.translated(x); }

// ---------------------------------------------------------------------------
// GibbsEnsemble

GibbsEnsemble::GibbsEnsemble(Eigen::MatrixXcd hamiltonian, double beta, int sites)
    : sites_(sites), beta_(beta), hamiltonian_(std::move(hamiltonian)) {
  if (beta < 0) throw std::invalid_argument("beta must be non-negative");
  if (hamiltonian_.rows() != hamiltonian_.cols() ||
      hamiltonian_.rows() != static_cast<Eigen::Index>(std::size_t{1} << sites))
    throw std::invalid_argument("Hamiltonian dimension does not match chain length");
  const double herm = (hamiltonian_ - hamiltonian_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw std::invalid_argument("Hamiltonian is not Hermitian");
  eig_hermitian(hamiltonian_, evals_, evecs_);
  // Shift by the max eigenvalue before exponentiating to avoid overflow.
  const double emin = evals_.minCoeff();
  weights_ = (-beta_ * (evals_.array() - emin)).exp();
  const double z = weights_.sum();
  if (!(z > 0)) throw std::runtime_error("partition function not positive");
  weights_ /= z;
}

const Eigen::MatrixXcd& GibbsEnsemble::rho() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (!rho_) {
    Eigen::MatrixXcd scaled = evecs_ * weights_.asDiagonal();
    rho_ = std::make_shared<const Eigen::MatrixXcd>(scaled * evecs_.adjoint());
  }
  return *rho_;
}

double GibbsEnsemble::hamiltonian_norm() const {
  return std::max(std::abs(evals_.maxCoeff()), std::abs(evals_.minCoeff()));
}

Complex GibbsEnsemble::expectation(const LocalOperator& a) const {
  if (a.dim() != dim()) throw std::invalid_argument("operator dimension mismatch");
  if (a.is_sparse()) {
    const PauliOp& op = a.sparse();
    const Eigen::MatrixXcd& r = rho();
    Complex sum = 0;
    for (std::size_t c = 0; c < op.coeff.size(); ++c)
      sum += r(static_cast<Eigen::Index>(c ^ op.flip), static_cast<Eigen::Index>(c)) *
             op.coeff[c];
    return sum;
  }
  // tr(rho A) = sum_{r,c} rho(r,c) A(c,r)
  return (rho().transpose().cwiseProduct(a.dense())).sum();
}

std::shared_ptr<const Eigen::MatrixXcd> GibbsEnsemble::rotated(const LocalOperator& a) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    for (auto it = rot_lru_.begin(); it != rot_lru_.end(); ++it) {
      if (it->first == a.id()) {
        rot_lru_.splice(rot_lru_.begin(), rot_lru_, it);
        return rot_lru_.front().second;
      }
    }
  }
  const auto n = dim();
  Eigen::MatrixXcd rot;
  if (a.is_sparse()) {
    // (A U)(r,:) = coeff(r) U(r^flip,:), then one full product with U^dagger.
    const PauliOp& op = a.sparse();
    Eigen::MatrixXcd au(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      au.row(r) = op.coeff[static_cast<std::size_t>(r)] *
                  evecs_.row(r ^ static_cast<Eigen::Index>(op.flip));
    rot = evecs_.adjoint() * au;
  } else {
    rot = evecs_.adjoint() * (a.dense() * evecs_);
  }
  auto entry = std::make_shared<const Eigen::MatrixXcd>(std::move(rot));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  rot_lru_.emplace_front(a.id(), entry);
  while (rot_lru_.size() > rot_capacity_) rot_lru_.pop_back();
  return entry;
}

std::shared_ptr<const Eigen::MatrixXcd> GibbsEnsemble::rotated_transpose(
    const LocalOperator& a) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    for (auto it = rot_t_lru_.begin(); it != rot_t_lru_.end(); ++it) {
      if (it->first == a.id()) {
        rot_t_lru_.splice(rot_t_lru_.begin(), rot_t_lru_, it);
        return rot_t_lru_.front().second;
      }
    }
  }
  auto rot = rotated(a);
  auto entry = std::make_shared<const Eigen::MatrixXcd>(rot->transpose());
  std::lock_guard<std::mutex> lock(cache_mutex_);
  rot_t_lru_.emplace_front(a.id(), entry);
  while (rot_t_lru_.size() > 2) rot_t_lru_.pop_back();
  return entry;
}

void GibbsEnsemble::set_rotation_cache_capacity(std::size_t cap) {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  rot_capacity_ = std::max<std::size_t>(cap, 1);
  while (rot_lru_.size() > rot_capacity_) rot_lru_.pop_back();
}

std::shared_ptr<const Eigen::MatrixXcd> GibbsEnsemble::rotated_product(
    std::span<const LocalOperator* const> ops) const {
  if (ops.empty()) throw std::invalid_argument("rotated_product of empty operator list");
  if (ops.size() == 1) return rotated(*ops[0]);
  std::vector<std::uint64_t> key;
  key.reserve(ops.size());
  for (const LocalOperator* op : ops) key.push_back(op->id());
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    for (auto it = prod_lru_.begin(); it != prod_lru_.end(); ++it) {
      if (it->first == key) {
        prod_lru_.splice(prod_lru_.begin(), prod_lru_, it);
        return prod_lru_.front().second;
      }
    }
  }
  // Peel off the last factor so the prefix product is cacheable on its own.
  auto left = rotated_product(ops.first(ops.size() - 1));
  auto right = rotated(*ops.back());
  auto result = std::make_shared<const Eigen::MatrixXcd>(*left * *right);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  prod_lru_.emplace_front(std::move(key), result);
  while (prod_lru_.size() > prod_capacity_) prod_lru_.pop_back();
  return result;
}

void GibbsEnsemble::set_product_cache_capacity(std::size_t cap) {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  prod_capacity_ = std::max<std::size_t>(cap, 1);
  while (prod_lru_.size() > prod_capacity_) prod_lru_.pop_back();
}

double GibbsEnsemble::trace_error() const { return std::abs(weights_.sum() - 1.0); }

double GibbsEnsemble::stationarity_error() const {
  const Eigen::MatrixXcd& r = rho();
  const Eigen::MatrixXcd& h = hamiltonian_;
  const double norm = spectral_norm_impl(
      [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) { w = r * (h * v) - h * (r * v); },
      [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
        w = h.adjoint() * (r.adjoint() * v) - r.adjoint() * (h.adjoint() * v);
      },
      dim());
  return norm;
}

GibbsEnsemble gibbs_state(const Eigen::MatrixXcd& hamiltonian, double beta, int sites) {
  return GibbsEnsemble(hamiltonian, beta, sites);
}

GibbsEnsemble make_ensemble(const ChainModel& model) {
  return GibbsEnsemble(build_hamiltonian(model), model.beta, model.L);
}

// ---------------------------------------------------------------------------
// Automorphisms and norms

LocalOperator evolve(const LocalOperator& a, double t, const GibbsEnsemble& ensemble) {
  if (a.dim() != ensemble.dim()) throw std::invalid_argument("operator dimension mismatch");
  if (t == 0.0) return a;
  const auto n = ensemble.dim();
  const Eigen::VectorXd& e = ensemble.eigenvalues();
  Eigen::MatrixXcd phased = *ensemble.rotated(a);
  Eigen::VectorXcd phase(n);
  for (Eigen::Index i = 0; i < n; ++i) phase(i) = std::exp(Complex(0, e(i) * t));
  phased = phase.asDiagonal() * phased * phase.conjugate().asDiagonal();
  Eigen::MatrixXcd back = ensemble.eigenvectors() * phased * ensemble.eigenvectors().adjoint();
  std::set<int> all;
  for (int s = 0; s < a.sites(); ++s) all.insert(s);
  LocalOperator out = LocalOperator::from_dense_with_support(a.sites(), std::move(back), all);
  return out;
}

LocalOperator localize(const LocalOperator& a_evolved, int radius,
                       const std::set<int>& around_support) {
  const int L = a_evolved.sites();
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  std::set<int> keep;
  for (int s : around_support)
    for (int r = -radius; r <= radius; ++r) keep.insert((((s + r) % L) + L) % L);
  if (static_cast<int>(keep.size()) >= L) return a_evolved;

  const Eigen::MatrixXcd& m = a_evolved.dense();
  std::vector<int> keep_bits(keep.begin(), keep.end());
  std::vector<int> comp_bits;
  for (int s = 0; s < L; ++s)
    if (!keep.count(s)) comp_bits.push_back(s);
  const int nk = static_cast<int>(keep_bits.size());
  const int nc = static_cast<int>(comp_bits.size());
  const auto dk = Eigen::Index{1} << nk;
  const auto dc = Eigen::Index{1} << nc;

  auto compose = [&](Eigen::Index k, Eigen::Index c) {
    std::uint32_t out = 0;
    for (int i = 0; i < nk; ++i)
      if (k >> i & 1) out |= 1u << keep_bits[i];
    for (int i = 0; i < nc; ++i)
      if (c >> i & 1) out |= 1u << comp_bits[i];
    return static_cast<Eigen::Index>(out);
  };

  // Normalized partial trace over the complement.
  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index c = 0; c < dc; ++c)
    for (Eigen::Index x = 0; x < dk; ++x)
      for (Eigen::Index y = 0; y < dk; ++y) reduced(x, y) += m(compose(x, c), compose(y, c));
  reduced /= static_cast<double>(dc);

  const auto n = m.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index c = 0; c < dc; ++c)
    for (Eigen::Index x = 0; x < dk; ++x)
      for (Eigen::Index y = 0; y < dk; ++y) out(compose(x, c), compose(y, c)) = reduced(x, y);

  std::set<int> support;
  for (int s : dense_support(nk, reduced)) support.insert(keep_bits[s]);
  return LocalOperator::from_dense_with_support(L, std::move(out), std::move(support));
}

double commutator_norm(const LocalOperator& a, const LocalOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
  const auto n = a.dim();
  Eigen::VectorXcd t1(n), t2(n), t3(n);
  auto apply = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    b.apply(v, t1);
    a.apply(t1, t2);  // ABv
    a.apply(v, t1);
    b.apply(t1, t3);  // BAv
    w = t2 - t3;
  };
  // [A,B]^dagger = [B^dagger, A^dagger]; power iteration on C^dagger C
  // never needs C itself as a matrix.
  auto apply_adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    // C^dagger = B^dagger A^dagger - A^dagger B^dagger
    auto apply_dag = [&](const LocalOperator& o, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
      if (o.is_sparse()) {
        const PauliOp adj = o.sparse().adjoint();
        adj.apply(x, y);
      } else {
        y = o.dense().adjoint() * x;
      }
    };
    apply_dag(a, v, t1);
    apply_dag(b, t1, t2);  // B+ A+ v
    apply_dag(b, v, t1);
    Eigen::VectorXcd t4(n);
    apply_dag(a, t1, t4);  // A+ B+ v
    w = t2 - t4;
  };
  return spectral_norm_impl(apply, apply_adj, n);
}

double spectral_norm(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
                     const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& adj,
                     Eigen::Index n, double tol, int max_iter) {
  return spectral_norm_impl(apply, adj, n, tol, max_iter);
}

// ---------------------------------------------------------------------------
// Moment provider

namespace {

struct ProviderState {
  const GibbsEnsemble* ensemble;
  std::vector<Operand> operands;
};

Complex eval_moment(ProviderState& st, std::span<const int> tuple) {
  const GibbsEnsemble& ens = *st.ensemble;
  const auto k = tuple.size();

  bool all_sparse_untimed = true;
  for (int idx : tuple) {
    const Operand& o = st.operands[static_cast<std::size_t>(idx) - 1];
    if (!o.op.is_sparse() || o.time != 0.0) {
      all_sparse_untimed = false;
      break;
    }
  }
  if (all_sparse_untimed) {
    PauliOp prod = st.operands[static_cast<std::size_t>(tuple[0]) - 1].op.sparse();
    for (std::size_t i = 1; i < k; ++i)
      prod = prod.multiply(st.operands[static_cast<std::size_t>(tuple[i]) - 1].op.sparse());
    const Eigen::MatrixXcd& r = ens.rho();
    Complex sum = 0;
    for (std::size_t c = 0; c < prod.coeff.size(); ++c)
      sum += r(static_cast<Eigen::Index>(c ^ prod.flip), static_cast<Eigen::Index>(c)) *
             prod.coeff[c];
    return sum;
  }

  const auto n = ens.dim();
  const Eigen::VectorXd& e = ens.eigenvalues();
  const Eigen::VectorXd& p = ens.weights();

  const Operand& first = st.operands[static_cast<std::size_t>(tuple[0]) - 1];
  auto first_rot = ens.rotated(first.op);

  if (k == 1) {
    Complex sum = 0;  // diagonal phases cancel
    for (Eigen::Index i = 0; i < n; ++i) sum += p(i) * (*first_rot)(i, i);
    return sum;
  }

  std::vector<int> rest;
  rest.reserve(k - 1);
  bool rest_untimed = true;
  for (std::size_t i = 1; i < k; ++i) {
    const int pos = tuple[i] - 1;
    rest.push_back(pos);
    if (st.operands[static_cast<std::size_t>(pos)].time != 0.0) rest_untimed = false;
  }

  std::shared_ptr<const Eigen::MatrixXcd> rest_prod;
  if (rest_untimed) {
    std::vector<const LocalOperator*> ops;
    ops.reserve(rest.size());
    for (int pos : rest) ops.push_back(&st.operands[static_cast<std::size_t>(pos)].op);
    rest_prod = ens.rotated_product(ops);
  } else {
    // Timed operands scattered through the tail: form the product with
    // explicit phase application, no caching.
    auto timed_matrix = [&](int pos) {
      const Operand& o = st.operands[static_cast<std::size_t>(pos)];
      Eigen::MatrixXcd m = *ens.rotated(o.op);
      if (o.time != 0.0) {
        Eigen::VectorXcd ph(n);
        for (Eigen::Index i = 0; i < n; ++i) ph(i) = std::exp(Complex(0, e(i) * o.time));
        m = ph.asDiagonal() * m * ph.conjugate().asDiagonal();
      }
      return m;
    };
    Eigen::MatrixXcd acc = timed_matrix(rest[0]);
    for (std::size_t i = 1; i < rest.size(); ++i) acc *= timed_matrix(rest[i]);
    rest_prod = std::make_shared<const Eigen::MatrixXcd>(std::move(acc));
  }

  // omega = sum_{a,b} p_a e^{i(E_a-E_b) t1} A1(a,b) M(b,a). Working with the
  // transposed rotation keeps both factors column-contiguous in the inner sum
  // over b for fixed a.
  const double t1 = first.time;
  const Eigen::MatrixXcd& a1t = *ens.rotated_transpose(first.op);
  const Eigen::MatrixXcd& m = *rest_prod;
  Complex sum = 0;
  if (t1 == 0.0) {
    for (Eigen::Index a = 0; a < n; ++a)
      sum += p(a) * a1t.col(a).cwiseProduct(m.col(a)).sum();
  } else {
    Eigen::VectorXcd cph(n);
    for (Eigen::Index i = 0; i < n; ++i) cph(i) = std::exp(Complex(0, -e(i) * t1));
    for (Eigen::Index a = 0; a < n; ++a) {
      const Complex inner = cph.cwiseProduct(a1t.col(a)).cwiseProduct(m.col(a)).sum();
      sum += p(a) * std::conj(cph(a)) * inner;
    }
  }
  return sum;
}

}  // namespace

MomentProvider make_moment_provider(const GibbsEnsemble& ensemble, std::vector<Operand> operands) {
  for (const Operand& o : operands)
    if (o.op.dim() != ensemble.dim())
      throw std::invalid_argument("operand dimension does not match ensemble");
  auto state = std::make_shared<ProviderState>();
  state->ensemble = &ensemble;
  state->operands = std::move(operands);
  MomentProvider p;
  p.n_max = static_cast<int>(state->operands.size());
  p.eval = [state](std::span<const int> tuple) { return eval_moment(*state, tuple); };
  return p;
}

}  // namespace cclab
