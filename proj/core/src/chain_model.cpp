#include "cclab/chain_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cclab/pauli.hpp"
#include "key_match.hpp"

namespace cclab {

namespace {

using nlohmann::json;

constexpr double kCouplingFloor = 1e-12;

void check_keys(const json& obj, const std::vector<std::string>& valid,
                const std::string& where, std::vector<std::string>& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(valid.begin(), valid.end(), it.key()) == valid.end())
      errors.push_back(where + ": unknown key '" + it.key() + "' (did you mean '" +
                       detail::nearest_key(it.key(), valid) + "'?)");
  }
}

[[noreturn]] void fail(const std::vector<std::string>& errors) {
  std::string msg = "invalid model config:";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw std::invalid_argument(msg);
}

}  // namespace

DecayLaw DecayLaw::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("decay law must be 'finite:r', 'exp:mu' or 'pow:a', got '" +
                                text + "'");
  const std::string name = text.substr(0, colon);
  const double param = std::stod(text.substr(colon + 1));
  DecayLaw law;
  law.param = param;
  if (name == "finite")
    law.kind = Kind::finite;
  else if (name == "exp")
    law.kind = Kind::exponential;
  else if (name == "pow")
    law.kind = Kind::power;
  else
    throw std::invalid_argument("unknown decay law '" + name + "'");
  if (param <= 0 && law.kind != Kind::finite)
    throw std::invalid_argument("decay parameter must be positive in '" + text + "'");
  return law;
}

std::string DecayLaw::str() const {
  char buf[48];
  const char* name = kind == Kind::finite ? "finite" : kind == Kind::exponential ? "exp" : "pow";
  std::snprintf(buf, sizeof buf, "%s:%.17g", name, param);
  return buf;
}

ChainModel parse_chain_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model config is not valid JSON: ") + e.what());
  }
  std::vector<std::string> errors;
  check_keys(j, {"L", "d", "beta", "terms"}, "model", errors);

  ChainModel m;
  if (!j.contains("L") || !j["L"].is_number_integer())
    errors.push_back("model: missing or non-integer key 'L'");
  else
    m.L = j["L"].get<int>();
  m.d = j.value("d", 2);
  if (!j.contains("beta") || !j["beta"].is_number())
    errors.push_back("model: missing or non-numeric key 'beta'");
  else
    m.beta = j["beta"].get<double>();

  if (m.L < 2 && errors.empty()) errors.push_back("model: L must be at least 2");
  if (m.d != 2) errors.push_back("model: only local dimension d=2 is supported");
  if (m.beta < 0) errors.push_back("model: beta must be non-negative");

  if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty()) {
    errors.push_back("model: 'terms' must be a non-empty array");
  } else {
    int idx = 0;
    for (const auto& tj : j["terms"]) {
      const std::string where = "terms[" + std::to_string(idx++) + "]";
      if (!tj.is_object()) {
        errors.push_back(where + ": must be an object");
        continue;
      }
      check_keys(tj, {"ops", "J", "decay"}, where, errors);
      CouplingTerm t;
      if (!tj.contains("ops") || !tj["ops"].is_string())
        errors.push_back(where + ": missing string key 'ops'");
      else
        t.ops = tj["ops"].get<std::string>();
      if (!tj.contains("J") || !tj["J"].is_number())
        errors.push_back(where + ": missing numeric key 'J'");
      else
        t.amplitude = tj["J"].get<double>();
      if (tj.contains("decay")) {
        try {
          t.decay = DecayLaw::parse(tj["decay"].get<std::string>());
        } catch (const std::exception& e) {
          errors.push_back(where + ": " + e.what());
        }
      } else if (t.ops.size() >= 2) {
        errors.push_back(where + ": multi-site term needs a 'decay' law");
      }
      for (char c : t.ops)
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
          errors.push_back(where + ": invalid Pauli letter '" + std::string(1, c) +
                           "' in ops (allowed: I, X, Y, Z)");
      if (t.ops.empty()) errors.push_back(where + ": ops must be non-empty");
      if (t.ops.size() > 2 &&
          (t.decay.kind != DecayLaw::Kind::finite ||
           t.decay.param != static_cast<double>(t.ops.size()) - 1))
        errors.push_back(where + ": strings longer than 2 sites must use decay 'finite:" +
                         std::to_string(t.ops.size() - 1) + "' (contiguous placement)");
      if (m.L > 0 && static_cast<int>(t.ops.size()) > m.L)
        errors.push_back(where + ": term window exceeds chain length");
      m.terms.push_back(std::move(t));
    }
  }
  if (!errors.empty()) fail(errors);
  return m;
}

ChainModel load_chain_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_chain_model(ss.str());
}

std::string format_chain_model(const ChainModel& model) {
  json j;
  j["L"] = model.L;
  j["d"] = model.d;
  j["beta"] = model.beta;
  j["terms"] = json::array();
  for (const auto& t : model.terms)
    j["terms"].push_back({{"ops", t.ops}, {"J", t.amplitude}, {"decay", t.decay.str()}});
  return j.dump(2);
}

double term_weight(const CouplingTerm& term, int s) {
  switch (term.decay.kind) {
    case DecayLaw::Kind::finite:
      return s == static_cast<int>(term.decay.param) ? term.amplitude : 0.0;
    case DecayLaw::Kind::exponential:
      return term.amplitude * std::exp(-term.decay.param * s);
    case DecayLaw::Kind::power:
      return term.amplitude / std::pow(static_cast<double>(s), term.decay.param);
  }
  return 0.0;
}

int term_truncation_radius(const CouplingTerm& term, int L) {
  if (term.ops.size() < 2) return 0;
  const int cap = L / 2;
  if (term.decay.kind == DecayLaw::Kind::finite)
    return std::min(cap, static_cast<int>(term.decay.param));
  int radius = 0;
  for (int s = 1; s <= cap; ++s)
    if (std::abs(term_weight(term, s)) >= kCouplingFloor) radius = s;
  return radius;
}

Eigen::MatrixXcd build_hamiltonian(const ChainModel& model) {
  const int L = model.L;
  if (L < 1 || L > 14)
    throw std::invalid_argument("chain length out of range (dimension cap 16384)");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << L);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);

  auto add_sparse = [&](const PauliOp& op, double w) {
    for (std::size_t r = 0; r < op.coeff.size(); ++r)
      H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ op.flip)) += w * op.coeff[r];
  };

  for (const auto& term : model.terms) {
    const int w = static_cast<int>(term.ops.size());
    if (w == 1) {
      for (int i = 0; i < L; ++i)
        add_sparse(pauli_string(L, {{i, term.ops[0]}}), term.amplitude);
      continue;
    }
    if (w == 2) {
      const int radius = term_truncation_radius(term, L);
      for (int s = 1; s <= radius; ++s) {
        const double weight = term_weight(term, s);
        if (std::abs(weight) < kCouplingFloor) continue;
        // On the periodic chain a distance-s bond appears once per site;
        // at s == L/2 each bond would be counted twice.
        const int count = (2 * s == L) ? L / 2 : L;
        for (int i = 0; i < count; ++i)
          add_sparse(pauli_string(L, {{i, term.ops[0]}, {i + s, term.ops[1]}}), weight);
      }
      continue;
    }
    for (int i = 0; i < L; ++i) add_sparse(pauli_string_at(L, term.ops, i), term.amplitude);
  }

  const double herm = (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12)
    throw std::runtime_error("assembled Hamiltonian is not Hermitian (violation " +
                             std::to_string(herm) + ")");
  return H;
}

ChainModel tfim_model(int L, double J, double h, double beta) {
  ChainModel m;
  m.L = L;
  m.beta = beta;
  m.terms.push_back({"ZZ", -J, DecayLaw{DecayLaw::Kind::finite, 1.0}});
  m.terms.push_back({"X", -h, DecayLaw{}});
  return m;
}

}  // namespace cclab
