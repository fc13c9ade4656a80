#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cclab {

struct DecayLaw {
  enum class Kind { finite, exponential, power };
  Kind kind = Kind::finite;
  double param = 1.0;  // range r / rate mu / exponent a

  /// Parses "finite:r", "exp:mu" or "pow:a".
  static DecayLaw parse(const std::string& text);
  std::string str() const;
};

struct CouplingTerm {
  std::string ops;         // Pauli string, e.g. "ZZ" or "X"
  double amplitude = 0.0;  // J
  DecayLaw decay;
};

/// Periodic spin-1/2 chain with inverse temperature and coupling terms.
struct ChainModel {
  int L = 0;
  int d = 2;
  double beta = 0.0;
  std::vector<CouplingTerm> terms;
};

/// Strict parser: unknown keys are rejected with the nearest valid key
/// named, all validation errors are collected before throwing.
ChainModel parse_chain_model(const std::string& json_text);
ChainModel load_chain_model(const std::string& path);
std::string format_chain_model(const ChainModel& model);

/// Truncation radius actually used for a term: the largest pair distance s
/// with |J * w(s)| >= 1e-12, capped at floor(L/2) on the periodic chain.
int term_truncation_radius(const CouplingTerm& term, int L);

/// Coupling weight at pair distance s (single-site terms have no distance).
double term_weight(const CouplingTerm& term, int s);

/// H = sum of terms, each embedded periodically; Hermitian by construction
/// and verified to 1e-12 in max-element norm. Dimension cap 2^14.
Eigen::MatrixXcd build_hamiltonian(const ChainModel& model);

/// Transverse-field Ising chain, the stock model of the experiments:
/// H = -J sum Z_i Z_{i+1} - h sum X_i.
ChainModel tfim_model(int L, double J, double h, double beta);

}  // namespace cclab
