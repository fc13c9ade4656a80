#pragma once

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "cclab/partition.hpp"

namespace cclab {

using Complex = std::complex<double>;

/// Abstract moment functional. `eval` receives a non-empty tuple of operand
/// indices in {1..n_max}; the engine only ever asks for strictly increasing
/// tuples (the Eq.-6 ordering convention). Callers wanting repeated operands
/// register the repeat as distinct indices bound to equal operands.
struct MomentProvider {
  int n_max = 0;
  std::function<Complex(std::span<const int>)> eval;

  Complex operator()(std::span<const int> tuple) const { return eval(tuple); }
};

/// Provider backed by an explicit tuple -> value map.
MomentProvider map_moment_provider(int n_max, std::map<std::vector<int>, Complex> moments);

enum class CumulantKind { classical, free };

/// Path selection for the two independent computation routes. For classical
/// cumulants `direct` is the full partition-lattice sum with the explicit
/// (-1)^{|pi|-1}(|pi|-1)! coefficients; for free cumulants it is the Moebius
/// sum over NC(k). `recursive` solves the moments-to-cumulants relation by
/// peeling off the maximal partition.
enum class CumulantPath { direct, recursive };

Complex classical_cumulant(const MomentProvider& provider, std::span<const int> indices,
                           CumulantPath path = CumulantPath::recursive);

Complex free_cumulant(const MomentProvider& provider, std::span<const int> indices,
                      CumulantPath path = CumulantPath::recursive);

Complex cumulant(CumulantKind kind, const MomentProvider& provider,
                 std::span<const int> indices, CumulantPath path = CumulantPath::recursive);

/// c_pi / kappa_pi: product over blocks of the block cumulants, blocks read
/// against `indices` with the ordering convention preserved. A crossing
/// partition with kind == free is a domain error.
Complex multiplicative_extension(CumulantKind kind, const MomentProvider& provider,
                                 const Partition& partition, std::span<const int> indices);

/// Table of cumulants keyed by the (strictly increasing) index tuple.
struct CumulantTable {
  CumulantKind kind = CumulantKind::classical;
  std::map<std::vector<int>, Complex> values;
};

/// Cumulants of every non-empty increasing sub-tuple of `indices`.
CumulantTable cumulant_table(CumulantKind kind, const MomentProvider& provider,
                             std::span<const int> indices,
                             CumulantPath path = CumulantPath::recursive);

/// Inverse transform: sum over P(k) (classical) or NC(k) (free) of products
/// of table entries. Missing entries throw std::out_of_range.
Complex cumulants_to_moments(const CumulantTable& table, std::span<const int> indices);

}  // namespace cclab
