#include "cclab/cumulants.hpp"

#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace cclab {

namespace {

void check_tuple(const MomentProvider& provider, std::span<const int> indices, int cap) {
  if (indices.empty()) throw std::invalid_argument("empty index tuple");
  if (static_cast<int>(indices.size()) > cap)
    throw std::invalid_argument("tuple length " + std::to_string(indices.size()) +
                                " exceeds enumeration cap " + std::to_string(cap));
  int prev = 0;
  for (int i : indices) {
    if (i <= prev) throw std::invalid_argument("index tuple must be strictly increasing");
    if (i > provider.n_max) throw std::invalid_argument("index exceeds provider arity bound");
    prev = i;
  }
}

// Partition families are pure functions of the order; cache them.
const PartitionFamily& family(CumulantKind kind, int k) {
  static std::unordered_map<int, PartitionFamily> all, nc;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto& cache = (kind == CumulantKind::classical) ? all : nc;
  auto it = cache.find(k);
  if (it == cache.end())
    it = cache.emplace(k, kind == CumulantKind::classical ? enumerate_partitions(k)
                                                          : enumerate_noncrossing(k)).first;
  return it->second;
}

std::vector<int> select(std::span<const int> indices, const std::vector<int>& block) {
  std::vector<int> out;
  out.reserve(block.size());
  for (int pos : block) out.push_back(indices[static_cast<std::size_t>(pos) - 1]);
  return out;
}

using Cache = std::map<std::vector<int>, Complex>;

Complex moment_of(const MomentProvider& provider, const std::vector<int>& tuple) {
  return provider.eval(tuple);
}

// c(T) = omega(T) - sum over partitions of T with at least two blocks of
// the products of lower cumulants.
Complex recursive_cumulant(CumulantKind kind, const MomentProvider& provider,
                           const std::vector<int>& tuple, Cache& cache) {
  if (auto it = cache.find(tuple); it != cache.end()) return it->second;
  const int k = static_cast<int>(tuple.size());
  Complex value = moment_of(provider, tuple);
  if (k > 1) {
    for (const Partition& pi : family(kind, k).members) {
      if (pi.is_full()) continue;
      Complex term = 1.0;
      for (const auto& block : pi.blocks)
        term *= recursive_cumulant(kind, provider, select(tuple, block), cache);
      value -= term;
    }
  }
  cache.emplace(tuple, value);
  return value;
}

Complex direct_classical(const MomentProvider& provider, std::span<const int> indices) {
  const int k = static_cast<int>(indices.size());
  Complex sum = 0.0;
  for (const Partition& pi : family(CumulantKind::classical, k).members) {
    Complex term = static_cast<double>(mobius_full_classical(pi));
    for (const auto& block : pi.blocks) term *= moment_of(provider, select(indices, block));
    sum += term;
  }
  return sum;
}

Complex mobius_free(const MomentProvider& provider, std::span<const int> indices) {
  const int k = static_cast<int>(indices.size());
  const Partition one = full_partition(k);
  Complex sum = 0.0;
  for (const Partition& sigma : family(CumulantKind::free, k).members) {
    Complex term = static_cast<double>(mobius_nc(sigma, one));
    for (const auto& block : sigma.blocks) term *= moment_of(provider, select(indices, block));
    sum += term;
  }
  return sum;
}

}  // namespace

MomentProvider map_moment_provider(int n_max, std::map<std::vector<int>, Complex> moments) {
  auto table = std::make_shared<std::map<std::vector<int>, Complex>>(std::move(moments));
  MomentProvider p;
  p.n_max = n_max;
  p.eval = [table](std::span<const int> tuple) {
    auto it = table->find(std::vector<int>(tuple.begin(), tuple.end()));
    if (it == table->end()) throw std::out_of_range("moment table has no entry for tuple");
    return it->second;
  };
  return p;
}

Complex classical_cumulant(const MomentProvider& provider, std::span<const int> indices,
                           CumulantPath path) {
  check_tuple(provider, indices, kMaxPartitionOrder);
  if (path == CumulantPath::direct) return direct_classical(provider, indices);
  Cache cache;
  return recursive_cumulant(CumulantKind::classical, provider,
                            std::vector<int>(indices.begin(), indices.end()), cache);
}

Complex free_cumulant(const MomentProvider& provider, std::span<const int> indices,
                      CumulantPath path) {
  check_tuple(provider, indices, kMaxNonCrossingOrder);
  if (path == CumulantPath::direct) return mobius_free(provider, indices);
  Cache cache;
  return recursive_cumulant(CumulantKind::free, provider,
                            std::vector<int>(indices.begin(), indices.end()), cache);
}

Complex cumulant(CumulantKind kind, const MomentProvider& provider,
                 std::span<const int> indices, CumulantPath path) {
  return kind == CumulantKind::classical ? classical_cumulant(provider, indices, path)
                                         : free_cumulant(provider, indices, path);
}

Complex multiplicative_extension(CumulantKind kind, const MomentProvider& provider,
                                 const Partition& partition, std::span<const int> indices) {
  if (partition.n != static_cast<int>(indices.size()))
    throw std::invalid_argument("partition order does not match tuple length");
  if (kind == CumulantKind::free && !is_noncrossing(partition))
    throw std::domain_error("free multiplicative extension requires a non-crossing partition");
  Cache cache;
  Complex product = 1.0;
  for (const auto& block : partition.blocks)
    product *= recursive_cumulant(kind, provider, select(indices, block), cache);
  return product;
}

CumulantTable cumulant_table(CumulantKind kind, const MomentProvider& provider,
                             std::span<const int> indices, CumulantPath path) {
  const int k = static_cast<int>(indices.size());
  check_tuple(provider, indices,
              kind == CumulantKind::classical ? kMaxPartitionOrder : kMaxNonCrossingOrder);
  CumulantTable table;
  table.kind = kind;
  // All non-empty increasing sub-tuples.
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    std::vector<int> sub;
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) sub.push_back(indices[i]);
    table.values[sub] = cumulant(kind, provider, sub, path);
  }
  return table;
}

Complex cumulants_to_moments(const CumulantTable& table, std::span<const int> indices) {
  const int k = static_cast<int>(indices.size());
  if (k < 1) throw std::invalid_argument("empty index tuple");
  Complex sum = 0.0;
  for (const Partition& pi : family(table.kind, k).members) {
    Complex term = 1.0;
    for (const auto& block : pi.blocks) {
      auto it = table.values.find(select(indices, block));
      if (it == table.values.end())
        throw std::out_of_range("cumulant table missing entry for sub-tuple");
      term *= it->second;
    }
    sum += term;
  }
  return sum;
}

}  // namespace cclab
