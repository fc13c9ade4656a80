#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cclab {

/// Set partition of {1..n} in canonical form: every block sorted
/// increasingly, blocks ordered by their least element.
struct Partition {
  int n = 0;
  std::vector<std::vector<int>> blocks;

  /// Canonicalizes and validates; throws std::invalid_argument if the
  /// blocks are not disjoint, non-empty and covering {1..n}.
  static Partition make(int n, std::vector<std::vector<int>> blocks);

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  bool is_full() const { return blocks.size() == 1; }
  bool is_singletons() const { return static_cast<int>(blocks.size()) == n; }

  bool operator==(const Partition&) const = default;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const;
};

enum class FamilyKind { all, non_crossing };

struct PartitionFamily {
  int n = 0;
  FamilyKind kind = FamilyKind::all;
  std::vector<Partition> members;

  std::size_t size() const { return members.size(); }
};

// Full enumeration caps. Bell(12) = 4'213'597 is the intended ceiling for
// the all-partitions family; exceeding a cap is an error, never a silent
// truncation.
inline constexpr int kMaxPartitionOrder = 12;
inline constexpr int kMaxNonCrossingOrder = 14;

/// All partitions of {1..n}, canonical, generated by recursing on the
/// block that contains element 1.
PartitionFamily enumerate_partitions(int n);

/// Non-crossing partitions of {1..n}: the block V containing 1 is combined
/// with independent non-crossing partitions of the consecutive runs of the
/// complement, which is exactly what enforces the non-crossing condition.
PartitionFamily enumerate_noncrossing(int n);

/// True iff no indices a<b<c<d have a,c in one block and b,d in another.
bool is_noncrossing(const Partition& p);

/// mu_P(p, 1_n) = (-1)^{|p|-1} (|p|-1)! on the full partition lattice.
long long mobius_full_classical(const Partition& p);

/// Refinement order: sigma <= pi iff every block of sigma lies inside a
/// block of pi.
bool is_refinement(const Partition& sigma, const Partition& pi);

/// Moebius function of the non-crossing partition poset, by recursive
/// inversion of zeta: sum_{sigma<=tau<=pi} mu(tau,pi) = [sigma==pi].
/// Throws std::domain_error if either argument crosses or the pair is not
/// comparable (incomparable pairs surface caller bugs, they are not mu=0).
long long mobius_nc(const Partition& sigma, const Partition& pi);

/// Coarsenings tau of sigma with sigma <= tau <= pi, all non-crossing.
std::vector<Partition> nc_interval(const Partition& sigma, const Partition& pi);

Partition full_partition(int n);
Partition singleton_partition(int n);

/// "{1,3}{2,4}" rendering used by the enumerate CLI.
std::string to_string(const Partition& p);

}  // namespace cclab
