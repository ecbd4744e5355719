#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace reslab {

/// Resolves the worker count: an explicit request wins, then the
/// RESONANCE_LAB_THREADS environment variable, then hardware concurrency.
unsigned resolve_workers(unsigned requested = 0);

/// Runs fn(block) for every block in [0, nblocks) on up to `workers` threads
/// and returns the results indexed by block.  Each block must be a pure
/// function of its index, so the result vector -- and anything folded from it
/// in index order -- is identical for every worker count.
template <class Result, class Fn>
std::vector<Result> map_blocks(std::size_t nblocks, unsigned workers, Fn&& fn) {
    std::vector<Result> out(nblocks);
    if (workers <= 1 || nblocks <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) out[b] = fn(b);
        return out;
    }
    unsigned nthreads = workers;
    if (nthreads > nblocks) nthreads = static_cast<unsigned>(nblocks);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t b = next.fetch_add(1);
                if (b >= nblocks || failed.load()) return;
                try {
                    out[b] = fn(b);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace reslab
