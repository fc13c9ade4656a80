#pragma once

#include <Eigen/Dense>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cclab/chain_model.hpp"
#include "cclab/cumulants.hpp"
#include "cclab/pauli.hpp"

namespace cclab {

int periodic_distance(int L, int a, int b);
int set_distance(int L, const std::set<int>& a, const std::set<int>& b);
/// Linear extent of a support set (0 for a single site).
int support_extent(const std::set<int>& s);

/// Dense or Pauli-sparse operator on the chain together with its support.
/// Immutable after construction; copies share the underlying matrices.
class LocalOperator {
 public:
  static LocalOperator from_pauli(PauliOp op);
  /// Detects the support from the tensor-factor structure.
  static LocalOperator from_dense(int L, Eigen::MatrixXcd m);
  static LocalOperator from_dense_with_support(int L, Eigen::MatrixXcd m, std::set<int> support);

  int sites() const { return sites_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(std::size_t{1} << sites_); }
  bool is_sparse() const { return sparse_ != nullptr; }
  const PauliOp& sparse() const { return *sparse_; }
  /// Dense matrix; materialized from the sparse form on first use.
  const Eigen::MatrixXcd& dense() const;
  const std::set<int>& support() const { return support_; }
  /// Operator norm (largest singular value), cached.
  double norm() const;
  /// Stable identity for ensemble-side caches; copies share it.
  std::uint64_t id() const { return id_; }

  /// Conjugation by the cyclic site shift; support moves by x mod L.
  LocalOperator translated(int x) const;

  /// w = A v without materializing a dense matrix when sparse.
  void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& w) const;

 private:
  LocalOperator() = default;
  int sites_ = 0;
  std::shared_ptr<const PauliOp> sparse_;
  mutable std::shared_ptr<const Eigen::MatrixXcd> dense_;
  std::set<int> support_;
  mutable std::optional<double> norm_;
  std::uint64_t id_ = 0;
};

/// Thermal state of a dense Hermitian Hamiltonian: one-time
/// eigendecomposition, Boltzmann weights, lazy dense density matrix, plus
/// caches of eigenbasis-rotated observables and static operator products
/// (both bounded, since a 4096-dim matrix is 268 MB).
class GibbsEnsemble {
 public:
  GibbsEnsemble(Eigen::MatrixXcd hamiltonian, double beta, int sites);

  int sites() const { return sites_; }
  double beta() const { return beta_; }
  Eigen::Index dim() const { return evals_.size(); }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }
  /// Boltzmann probabilities in the eigenbasis (sum to 1).
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
  /// Dense density matrix, built on first use.
  const Eigen::MatrixXcd& rho() const;
  double hamiltonian_norm() const;

  Complex expectation(const LocalOperator& a) const;

  /// U^dagger A U, cached by operator id (LRU).
  std::shared_ptr<const Eigen::MatrixXcd> rotated(const LocalOperator& a) const;

  /// Transpose of rotated(a), kept in a small separate cache so the phase-sum
  /// inner loops can run down contiguous columns.
  std::shared_ptr<const Eigen::MatrixXcd> rotated_transpose(const LocalOperator& a) const;

  /// Ordered product of the eigenbasis rotations of the given operators,
  /// cached by id sequence (prefix products land in the cache as well, so
  /// sweeps that extend a fixed operator list pay one extra product).
  std::shared_ptr<const Eigen::MatrixXcd> rotated_product(
      std::span<const LocalOperator* const> ops) const;

  void set_rotation_cache_capacity(std::size_t cap);
  void set_product_cache_capacity(std::size_t cap);

  /// trace(rho) and stationarity diagnostics for `simulate --check`.
  double trace_error() const;
  double stationarity_error() const;

 private:
  int sites_;
  double beta_;
  Eigen::MatrixXcd hamiltonian_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
  Eigen::VectorXd weights_;
  mutable std::shared_ptr<const Eigen::MatrixXcd> rho_;

  mutable std::mutex cache_mutex_;
  mutable std::list<std::pair<std::uint64_t, std::shared_ptr<const Eigen::MatrixXcd>>> rot_lru_;
  std::size_t rot_capacity_ = 6;
  mutable std::list<std::pair<std::uint64_t, std::shared_ptr<const Eigen::MatrixXcd>>> rot_t_lru_;
  mutable std::list<
      std::pair<std::vector<std::uint64_t>, std::shared_ptr<const Eigen::MatrixXcd>>>
      prod_lru_;
  std::size_t prod_capacity_ = 4;
};

GibbsEnsemble gibbs_state(const Eigen::MatrixXcd& hamiltonian, double beta, int sites);
GibbsEnsemble make_ensemble(const ChainModel& model);

/// Heisenberg evolution A(t) = e^{iHt} A e^{-iHt} by phase conjugation in
/// the eigenbasis. Exact evolution delocalizes: support becomes all sites.
LocalOperator evolve(const LocalOperator& a, double t, const GibbsEnsemble& ensemble);

/// Conditional-expectation localization onto the nu-ball neighbourhood of
/// the given support: normalized partial trace over the complement, tensor
/// identity.
LocalOperator localize(const LocalOperator& a_evolved, int radius,
                       const std::set<int>& around_support);

LocalOperator translate(const LocalOperator& a, int x);

/// Largest singular value of AB - BA via matrix-free power iteration.
double commutator_norm(const LocalOperator& a, const LocalOperator& b);

/// Largest singular value of a linear map given by matrix-free apply /
/// adjoint-apply callbacks (power iteration on M^dagger M).
double spectral_norm(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
                     const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& adj,
                     Eigen::Index n, double tol = 1e-10, int max_iter = 2000);

/// Observable with an optional Heisenberg time, the unit the harness sweeps.
struct Operand {
  LocalOperator op;
  double time = 0.0;
};

/// Moment functional omega(A_{i1} ... A_{ik}) over the given operands.
/// Pure-sparse t=0 tuples cost O(2^L); otherwise the evaluation runs in the
/// eigenbasis, applying time phases elementwise and splitting the trace so
/// that at most the operand product of positions 2..k needs matrix products
/// (cached across calls when those operands are untimed).
MomentProvider make_moment_provider(const GibbsEnsemble& ensemble, std::vector<Operand> operands);

}  // namespace cclab
