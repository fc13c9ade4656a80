// Independent reference implementations used only by the tests. They take
// deliberately different routes than the library: partition counts come from
// restricted growth strings, non-crossing counts from the Catalan recurrence,
// and the non-crossing Moebius function from solving its defining delta
// recursion by brute force over the whole interval.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cclab/partition.hpp"

namespace oracle {

namespace detail {

// Enumerates restricted growth strings a[0]=0, a[i] <= 1 + max(a[0..i-1]).
inline void rgs_walk(int n, int i, std::vector<int>& a, int hi,
                     const std::function<void(const std::vector<int>&)>& visit) {
  if (i == n) {
    visit(a);
    return;
  }
  for (int v = 0; v <= hi; ++v) {
    a[static_cast<std::size_t>(i)] = v;
    rgs_walk(n, i + 1, a, std::max(hi, v + 1), visit);
  }
}

}  // namespace detail

/// Bell number via restricted growth strings.
inline std::uint64_t bell_rgs(int n) {
  if (n == 0) return 1;
  std::uint64_t count = 0;
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  detail::rgs_walk(n, 0, a, 0, [&](const std::vector<int>&) { ++count; });
  return count;
}

/// All set partitions of {1..n}, built from restricted growth strings.
inline std::vector<cclab::Partition> partitions_rgs(int n) {
  std::vector<cclab::Partition> out;
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  detail::rgs_walk(n, 0, a, 0, [&](const std::vector<int>& rgs) {
    int blocks = 0;
    for (int v : rgs) blocks = std::max(blocks, v + 1);
    std::vector<std::vector<int>> b(static_cast<std::size_t>(blocks));
    for (int k = 0; k < n; ++k) b[static_cast<std::size_t>(rgs[static_cast<std::size_t>(k)])].push_back(k + 1);
    out.push_back(cclab::Partition::make(n, b));
  });
  return out;
}

/// Catalan numbers by the convolution recurrence.
inline std::uint64_t catalan(int n) {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(n) + 1, 0);
  c[0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int k = 0; k < m; ++k)
      c[static_cast<std::size_t>(m)] +=
          c[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(m - 1 - k)];
  return c[static_cast<std::size_t>(n)];
}

/// Moebius function of the non-crossing lattice by brute force: solve
/// sum_{sigma <= tau <= pi} mu(tau, pi) = [sigma == pi] top-down over the
/// interval, using only the refinement order and the enumeration.
inline long long mobius_nc_bruteforce(const cclab::Partition& sigma, const cclab::Partition& pi,
                                      const cclab::PartitionFamily& family) {
  if (!cclab::is_refinement(sigma, pi))
    throw std::invalid_argument("mobius oracle: sigma not below pi");
  std::vector<const cclab::Partition*> interval;
  for (const auto& tau : family.members)
    if (cclab::is_refinement(sigma, tau) && cclab::is_refinement(tau, pi))
      interval.push_back(&tau);
  std::map<std::string, long long> mu;
  const std::string top = cclab::to_string(pi);
  std::function<long long(const cclab::Partition&)> solve =
      [&](const cclab::Partition& tau) -> long long {
    const std::string key = cclab::to_string(tau);
    auto it = mu.find(key);
    if (it != mu.end()) return it->second;
    long long value;
    if (key == top) {
      value = 1;
    } else {
      value = 0;
      for (const cclab::Partition* up : interval)
        if (cclab::is_refinement(tau, *up) && cclab::to_string(*up) != key) value -= solve(*up);
    }
    mu[key] = value;
    return value;
  };
  return solve(sigma);
}

}  // namespace oracle
