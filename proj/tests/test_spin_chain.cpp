#include <cmath>

#include <doctest.h>

#include "cclab/spin_chain.hpp"

using namespace cclab;

namespace {

constexpr int kL = 6;

const GibbsEnsemble& ensemble() {
  static GibbsEnsemble ens = make_ensemble(tfim_model(kL, 1.0, 1.05, 0.2));
  return ens;
}

LocalOperator pauli_at(const char* ops, int site) {
  return LocalOperator::from_pauli(pauli_string_at(kL, ops, site));
}

double dense_opnorm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

TEST_CASE("gibbs state invariants") {
  const GibbsEnsemble& ens = ensemble();
  CHECK(ens.trace_error() < 1e-12);
  CHECK(ens.stationarity_error() < 1e-10 * ens.hamiltonian_norm());
  CHECK(ens.weights().minCoeff() > 0);
  // spectral decomposition reproduces H
  const Eigen::MatrixXcd rebuilt =
      ens.eigenvectors() * ens.eigenvalues().asDiagonal() * ens.eigenvectors().adjoint();
  CHECK((rebuilt - ens.hamiltonian()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("expectation agrees between sparse and dense paths") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator z = pauli_at("Z", 2);
  const LocalOperator zd = LocalOperator::from_dense(kL, z.dense());
  CHECK(std::abs(ens.expectation(z) - ens.expectation(zd)) < 1e-12);
  // raw trace reference
  const Complex ref = (ens.rho() * z.dense()).trace();
  CHECK(std::abs(ens.expectation(z) - ref) < 1e-12);
}

TEST_CASE("translation invariance of the ensemble") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator x = pauli_at("X", 0);
  for (int shift = 1; shift < kL; ++shift)
    CHECK(std::abs(ens.expectation(x) - ens.expectation(translate(x, shift))) < 1e-10);
}

TEST_CASE("rotated operators and the LRU cache") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator z = pauli_at("Z", 1);
  auto r1 = ens.rotated(z);
  auto r2 = ens.rotated(z);
  CHECK(r1.get() == r2.get());  // cache hit for the same id
  const Eigen::MatrixXcd ref = ens.eigenvectors().adjoint() * z.dense() * ens.eigenvectors();
  CHECK((*r1 - ref).cwiseAbs().maxCoeff() < 1e-10);
  // copies share the id, new builds do not
  const LocalOperator copy = z;
  CHECK(ens.rotated(copy).get() == r1.get());
}

TEST_CASE("rotated_product multiplies in order") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator a = pauli_at("Z", 0);
  const LocalOperator b = pauli_at("X", 1);
  const std::vector<const LocalOperator*> ops = {&a, &b};
  const Eigen::MatrixXcd ref = *ens.rotated(a) * *ens.rotated(b);
  CHECK((*ens.rotated_product(ops) - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("evolution is unitary conjugation in the eigenbasis") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator z = pauli_at("Z", 0);
  const LocalOperator zt = evolve(z, 0.37, ens);
  // norm preserved, Hermiticity preserved
  CHECK(zt.norm() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK((zt.dense() - zt.dense().adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  // t = 0 is the identity map
  CHECK((evolve(z, 0.0, ens).dense() - z.dense()).cwiseAbs().maxCoeff() < 1e-14);
  // matches the brute-force exponential
  const Eigen::MatrixXcd h = ens.hamiltonian();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    phases(i) = std::exp(Complex(0, es.eigenvalues()(i) * 0.37));
  const Eigen::MatrixXcd u =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  CHECK((zt.dense() - u * z.dense() * u.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
  // group property tau_s tau_t = tau_{s+t}
  const LocalOperator z2 = evolve(evolve(z, 0.2, ens), 0.17, ens);
  CHECK((z2.dense() - zt.dense()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("localization is the normalized partial trace, tensor identity") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator z = pauli_at("Z", 0);
  const LocalOperator zt = evolve(z, 0.5, ens);
  const LocalOperator loc = localize(zt, 1, z.support());
  // support contained in the radius-1 ball around site 0
  for (int s : loc.support()) CHECK((s <= 1 || s == kL - 1));
  // idempotent
  const LocalOperator twice = localize(loc, 1, z.support());
  CHECK((twice.dense() - loc.dense()).cwiseAbs().maxCoeff() < 1e-12);
  // trace preserved (conditional expectation is unital and trace preserving)
  CHECK(std::abs(loc.dense().trace() - zt.dense().trace()) < 1e-10);
  // radius large enough reproduces the operator exactly
  const LocalOperator all = localize(zt, kL, z.support());
  CHECK((all.dense() - zt.dense()).cwiseAbs().maxCoeff() < 1e-14);
  // approximation error shrinks with radius
  const double e1 = dense_opnorm(zt.dense() - localize(zt, 1, z.support()).dense());
  const double e2 = dense_opnorm(zt.dense() - localize(zt, 2, z.support()).dense());
  CHECK(e2 <= e1 + 1e-12);
}

TEST_CASE("commutator norm matches a dense SVD") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator a = pauli_at("Z", 0);
  const LocalOperator b = pauli_at("X", 0);
  const double ref = dense_opnorm(a.dense() * b.dense() - b.dense() * a.dense());
  CHECK(commutator_norm(a, b) == doctest::Approx(ref).epsilon(1e-6));
  CHECK(commutator_norm(a, pauli_at("X", 3)) == doctest::Approx(0.0));
  // evolved (dense) against sparse
  const LocalOperator at = evolve(a, 0.4, ens);
  const double reft = dense_opnorm(at.dense() * b.dense() - b.dense() * at.dense());
  CHECK(commutator_norm(at, b) == doctest::Approx(reft).epsilon(1e-6));
}

TEST_CASE("moment provider equals dense traces, timed and untimed") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator z0 = pauli_at("Z", 0);
  const LocalOperator x1 = pauli_at("X", 1);
  const LocalOperator z2 = pauli_at("Z", 2);
  MomentProvider p = make_moment_provider(ens, {{z0, 0.6}, {x1, 0.0}, {z2, 0.25}});
  const Eigen::MatrixXcd a1 = evolve(z0, 0.6, ens).dense();
  const Eigen::MatrixXcd a3 = evolve(z2, 0.25, ens).dense();
  const Eigen::MatrixXcd& rho = ens.rho();
  const std::vector<std::vector<int>> tuples = {{1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
  for (const auto& tuple : tuples) {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(rho.rows(), rho.cols());
    for (int i : tuple) prod *= (i == 1 ? a1 : i == 2 ? x1.dense() : a3);
    const Complex ref = (rho * prod).trace();
    CHECK(std::abs(p(tuple) - ref) < 1e-9);
  }
}

TEST_CASE("moment provider sparse fast path equals the eigenbasis path") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator z0 = pauli_at("Z", 0);
  const LocalOperator z3 = pauli_at("Z", 3);
  MomentProvider sparse = make_moment_provider(ens, {{z0, 0.0}, {z3, 0.0}});
  // forcing the dense representation routes the same moments through the
  // eigenbasis split
  MomentProvider dense = make_moment_provider(
      ens, {{LocalOperator::from_dense(kL, z0.dense()), 0.0},
            {LocalOperator::from_dense(kL, z3.dense()), 0.0}});
  const std::vector<int> tuple = {1, 2};
  CHECK(std::abs(sparse(tuple) - dense(tuple)) < 1e-11);
}

TEST_CASE("dimension guards") {
  const GibbsEnsemble& ens = ensemble();
  const LocalOperator wrong = LocalOperator::from_pauli(pauli_string(4, {{0, 'Z'}}));
  CHECK_THROWS_AS(ens.expectation(wrong), std::invalid_argument);
  CHECK_THROWS_AS(make_moment_provider(ens, {{wrong, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(GibbsEnsemble(Eigen::MatrixXcd::Random(4, 4), 0.2, 2), std::invalid_argument);
}

TEST_CASE("periodic distance helpers") {
  CHECK(periodic_distance(6, 0, 5) == 1);
  CHECK(periodic_distance(6, 1, 4) == 3);
  CHECK(set_distance(6, {0, 1}, {3}) == 2);
  CHECK(support_extent({2, 3, 5}) == 3);
}
