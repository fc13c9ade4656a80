#include "cclab/partition.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cclab {

namespace {

// Enumerates partitions of an arbitrary sorted ground set by choosing the
// block that contains the smallest element, then recursing on the rest.
void enumerate_ground(const std::vector<int>& ground,
                      std::vector<std::vector<int>>& acc,
                      const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
  if (ground.empty()) {
    emit(acc);
    return;
  }
  const int first = ground[0];
  const int m = static_cast<int>(ground.size()) - 1;
  // Every subset of ground[1..] joined with `first` is a candidate block.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<int> block{first};
    std::vector<int> rest;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1)
        block.push_back(ground[i + 1]);
      else
        rest.push_back(ground[i + 1]);
    }
    acc.push_back(std::move(block));
    enumerate_ground(rest, acc, emit);
    acc.pop_back();
  }
}

// Non-crossing variant: the block containing the smallest element splits
// the complement into consecutive runs (consecutive in the ground set),
// each of which is partitioned independently.
void enumerate_nc_ground(const std::vector<int>& ground,
                         std::vector<std::vector<int>>& acc,
                         const std::function<void(const std::vector<std::vector<int>>&)>& emit);

void enumerate_nc_runs(const std::vector<std::vector<int>>& runs, std::size_t k,
                       std::vector<std::vector<int>>& acc,
                       const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
  if (k == runs.size()) {
    emit(acc);
    return;
  }
  enumerate_nc_ground(runs[k], acc, [&](const std::vector<std::vector<int>>&) {
    enumerate_nc_runs(runs, k + 1, acc, emit);
  });
}

void enumerate_nc_ground(const std::vector<int>& ground,
                         std::vector<std::vector<int>>& acc,
                         const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
  if (ground.empty()) {
    emit(acc);
    return;
  }
  const int first = ground[0];
  const int m = static_cast<int>(ground.size()) - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<int> block{first};
    std::vector<std::vector<int>> runs;
    bool open = false;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        block.push_back(ground[i + 1]);
        open = false;
      } else {
        if (!open) runs.emplace_back();
        runs.back().push_back(ground[i + 1]);
        open = true;
      }
    }
    acc.push_back(std::move(block));
    enumerate_nc_runs(runs, 0, acc, emit);
    acc.pop_back();
  }
}

void check_order(int n, int cap) {
  if (n < 1) throw std::invalid_argument("partition order must be positive");
  if (n > cap)
    throw std::invalid_argument("partition order " + std::to_string(n) +
                                " exceeds enumeration cap " + std::to_string(cap));
}

std::string key_of(const Partition& p) { return to_string(p); }

}  // namespace

Partition Partition::make(int n, std::vector<std::vector<int>> blocks) {
  if (n < 1) throw std::invalid_argument("ground-set size must be positive");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::size_t count = 0;
  for (auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("empty block");
    std::sort(b.begin(), b.end());
    for (int e : b) {
      if (e < 1 || e > n) throw std::invalid_argument("element out of range");
      if (seen[e]) throw std::invalid_argument("element repeated across blocks");
      seen[e] = 1;
      ++count;
    }
  }
  if (count != static_cast<std::size_t>(n))
    throw std::invalid_argument("blocks do not cover {1..n}");
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Partition p;
  p.n = n;
  p.blocks = std::move(blocks);
  return p;
}

std::size_t PartitionHash::operator()(const Partition& p) const {
  std::size_t h = static_cast<std::size_t>(p.n);
  for (const auto& b : p.blocks) {
    h = h * 1000003u + 0x9e3779b9u;
    for (int e : b) h = h * 131u + static_cast<std::size_t>(e);
  }
  return h;
}

PartitionFamily enumerate_partitions(int n) {
  check_order(n, kMaxPartitionOrder);
  PartitionFamily fam;
  fam.n = n;
  fam.kind = FamilyKind::all;
  std::vector<int> ground(n);
  for (int i = 0; i < n; ++i) ground[i] = i + 1;
  std::vector<std::vector<int>> acc;
  enumerate_ground(ground, acc, [&](const std::vector<std::vector<int>>& blocks) {
    fam.members.push_back(Partition::make(n, blocks));
  });
  return fam;
}

PartitionFamily enumerate_noncrossing(int n) {
  check_order(n, kMaxNonCrossingOrder);
  PartitionFamily fam;
  fam.n = n;
  fam.kind = FamilyKind::non_crossing;
  std::vector<int> ground(n);
  for (int i = 0; i < n; ++i) ground[i] = i + 1;
  std::vector<std::vector<int>> acc;
  enumerate_nc_ground(ground, acc, [&](const std::vector<std::vector<int>>& blocks) {
    fam.members.push_back(Partition::make(n, blocks));
  });
  return fam;
}

bool is_noncrossing(const Partition& p) {
  // a<b<c<d with a,c in one block and b,d in another.
  std::vector<int> owner(static_cast<std::size_t>(p.n) + 1, -1);
  for (int bi = 0; bi < p.num_blocks(); ++bi)
    for (int e : p.blocks[bi]) owner[e] = bi;
  // Stack scan: open a block when its first element appears; a block may
  // only close when it is on top.
  std::vector<int> stack;
  std::vector<int> remaining(p.blocks.size());
  for (std::size_t i = 0; i < p.blocks.size(); ++i)
    remaining[i] = static_cast<int>(p.blocks[i].size());
  std::vector<char> open(p.blocks.size(), 0);
  for (int e = 1; e <= p.n; ++e) {
    const int b = owner[e];
    if (!open[b]) {
      open[b] = 1;
      stack.push_back(b);
    } else if (stack.back() != b) {
      return false;
    }
    if (--remaining[b] == 0) {
      if (stack.back() != b) return false;
      stack.pop_back();
      open[b] = 0;
    }
  }
  return true;
}

long long mobius_full_classical(const Partition& p) {
  const int b = p.num_blocks();
  long long v = 1;
  for (int i = 2; i < b; ++i) v *= i;
  return (b % 2 == 1) ? v : -v;
}

bool is_refinement(const Partition& sigma, const Partition& pi) {
  if (sigma.n != pi.n) return false;
  std::vector<int> owner(static_cast<std::size_t>(pi.n) + 1, -1);
  for (int bi = 0; bi < pi.num_blocks(); ++bi)
    for (int e : pi.blocks[bi]) owner[e] = bi;
  for (const auto& b : sigma.blocks) {
    const int o = owner[b.front()];
    for (int e : b)
      if (owner[e] != o) return false;
  }
  return true;
}

std::vector<Partition> nc_interval(const Partition& sigma, const Partition& pi) {
  // Coarsenings of sigma are partitions of its blocks; merge and filter.
  std::vector<int> ids(sigma.blocks.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i) + 1;
  std::vector<Partition> out;
  std::vector<std::vector<int>> acc;
  enumerate_ground(ids, acc, [&](const std::vector<std::vector<int>>& grouping) {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(grouping.size());
    for (const auto& g : grouping) {
      std::vector<int> merged;
      for (int id : g) {
        const auto& b = sigma.blocks[static_cast<std::size_t>(id) - 1];
        merged.insert(merged.end(), b.begin(), b.end());
      }
      blocks.push_back(std::move(merged));
    }
    Partition tau = Partition::make(sigma.n, std::move(blocks));
    if (is_noncrossing(tau) && is_refinement(tau, pi)) out.push_back(std::move(tau));
  });
  return out;
}

long long mobius_nc(const Partition& sigma, const Partition& pi) {
  if (sigma.n != pi.n) throw std::domain_error("mobius_nc: mismatched ground sets");
  if (!is_noncrossing(sigma) || !is_noncrossing(pi))
    throw std::domain_error("mobius_nc: arguments must be non-crossing");
  if (!is_refinement(sigma, pi))
    throw std::domain_error("mobius_nc: arguments not comparable in refinement order");
  if (sigma == pi) return 1;

  static std::map<std::pair<std::string, std::string>, long long> memo;
  static std::mutex memo_mutex;
  const auto key = std::make_pair(key_of(sigma), key_of(pi));
  {
    std::lock_guard<std::mutex> lock(memo_mutex);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  long long value = 0;
  for (const Partition& tau : nc_interval(sigma, pi))
    if (!(tau == sigma)) value -= mobius_nc(tau, pi);
  {
    std::lock_guard<std::mutex> lock(memo_mutex);
    memo.emplace(key, value);
  }
  return value;
}

Partition full_partition(int n) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i + 1;
  return Partition::make(n, {all});
}

Partition singleton_partition(int n) {
  std::vector<std::vector<int>> blocks;
  blocks.reserve(n);
  for (int i = 1; i <= n; ++i) blocks.push_back({i});
  return Partition::make(n, std::move(blocks));
}

std::string to_string(const Partition& p) {
  std::ostringstream os;
  for (const auto& b : p.blocks) {
    os << '{';
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) os << ',';
      os << b[i];
    }
    os << '}';
  }
  return os.str();
}

}  // namespace cclab
