#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "textens/errors.hpp"

namespace textens {

// ---------------------------------------------------------------------------
// A minimal data-parallel execution layer: datasets split into ordered
// partitions, pure functions mapped over partitions on a worker pool, and
// associative merges. Results never depend on thread scheduling: partitions
// are always combined in partition-index order.
// ---------------------------------------------------------------------------

namespace engine_detail {

inline std::atomic<std::size_t>& max_workers_slot() {
    static std::atomic<std::size_t> workers{
        std::thread::hardware_concurrency() ? std::thread::hardware_concurrency() : 1};
    return workers;
}

}  // namespace engine_detail

inline std::size_t max_workers() { return engine_detail::max_workers_slot().load(); }

inline void set_max_workers(std::size_t n) {
    engine_detail::max_workers_slot().store(n == 0 ? 1 : n);
}

namespace engine_detail {

// Runs body(i) for every i in [0, n) on up to max_workers() threads.
// If several tasks throw, the exception of the lowest index is rethrown.
template <typename Body>
void run_tasks(std::size_t n, Body&& body) {
    if (n == 0) return;
    std::vector<std::exception_ptr> errors(n);
    std::size_t pool = std::min(max_workers(), n);
    if (pool <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;  // sequential: the first error is the lowest index
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (std::size_t t = 0; t < pool; ++t) {
            threads.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : threads) th.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace engine_detail

template <typename T>
struct PartitionedDataset {
    std::vector<std::vector<T>> partitions;

    std::size_t partition_count() const { return partitions.size(); }

    std::size_t total_len() const {
        std::size_t n = 0;
        for (const auto& p : partitions) n += p.size();
        return n;
    }

    std::vector<T> flatten() const {
        std::vector<T> out;
        out.reserve(total_len());
        for (const auto& p : partitions) out.insert(out.end(), p.begin(), p.end());
        return out;
    }
};

// Contiguous block partitioning: the first (len mod p) partitions hold
// ceil(len/p) elements, the rest floor(len/p); order is preserved.
template <typename T>
PartitionedDataset<T> partition(std::vector<T> data, std::size_t p) {
    if (p == 0) throw InvalidPartitionCount();
    PartitionedDataset<T> pd;
    pd.partitions.resize(p);
    std::size_t n = data.size();
    std::size_t base = n / p;
    std::size_t extra = n % p;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < p; ++i) {
        std::size_t len = base + (i < extra ? 1 : 0);
        auto& part = pd.partitions[i];
        part.reserve(len);
        for (std::size_t k = 0; k < len; ++k) part.push_back(std::move(data[pos + k]));
        pos += len;
    }
    return pd;
}

// Element-wise application of a pure function; partition structure and
// element order are preserved. The first element-level error, taken in
// partition order then element order, is the one that propagates.
template <typename T, typename F>
auto par_map(const PartitionedDataset<T>& pd, F&& f)
    -> PartitionedDataset<std::decay_t<decltype(f(std::declval<const T&>()))>> {
    using U = std::decay_t<decltype(f(std::declval<const T&>()))>;
    PartitionedDataset<U> out;
    out.partitions.resize(pd.partition_count());
    engine_detail::run_tasks(pd.partition_count(), [&](std::size_t i) {
        const auto& src = pd.partitions[i];
        auto& dst = out.partitions[i];
        dst.reserve(src.size());
        for (const auto& elem : src) dst.push_back(f(elem));
    });
    return out;
}

// Fold each partition sequentially, then combine the per-partition results
// in partition-index order. This is the deterministic backbone for every
// aggregation in the library.
template <typename T, typename Acc, typename Fold, typename Combine>
Acc par_fold(const PartitionedDataset<T>& pd, Acc init, Fold&& fold, Combine&& combine) {
    std::size_t n = pd.partition_count();
    std::vector<Acc> partials(n, init);
    engine_detail::run_tasks(n, [&](std::size_t i) {
        Acc acc = init;
        for (const auto& elem : pd.partitions[i]) acc = fold(std::move(acc), elem);
        partials[i] = std::move(acc);
    });
    Acc result = std::move(init);
    for (std::size_t i = 0; i < n; ++i)
        result = combine(std::move(result), std::move(partials[i]));
    return result;
}

// Reduce with an associative and commutative operator. Equals the
// sequential fold of the concatenated data.
template <typename T, typename Op>
T par_reduce(const PartitionedDataset<T>& pd, Op&& op, T identity) {
    return par_fold(
        pd, std::move(identity),
        [&](T acc, const T& elem) { return op(std::move(acc), elem); },
        [&](T a, T b) { return op(std::move(a), std::move(b)); });
}

// Per-key minimum across all partitions; keys come back sorted.
template <typename K>
std::map<K, double> group_min_by_key(const PartitionedDataset<std::pair<K, double>>& pd) {
    using Map = std::map<K, double>;
    return par_fold(
        pd, Map{},
        [](Map acc, const std::pair<K, double>& kv) {
            auto [it, inserted] = acc.emplace(kv.first, kv.second);
            if (!inserted && kv.second < it->second) it->second = kv.second;
            return acc;
        },
        [](Map a, Map b) {
            for (auto& [k, v] : b) {
                auto [it, inserted] = a.emplace(k, v);
                if (!inserted && v < it->second) it->second = v;
            }
            return a;
        });
}

}  // namespace textens
