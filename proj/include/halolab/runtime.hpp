#pragma once

// Simulated distributed runtime: ranks are threads of one process that talk
// through a non-blocking point-to-point transport (isend/irecv/wait_all) and
// a min-reduction. Only a rank's main context may communicate (funneled);
// its ThreadPool workers do compute, pack and copy work.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "halolab/thread_pool.hpp"

namespace halolab {

using Payload = std::vector<double>;

enum class IntranodePath { shared_handoff, copy_through };

std::string to_string(IntranodePath p);
IntranodePath parse_intranode_path(const std::string& text);

class CopyCounter {
 public:
  void add(std::size_t bytes) {
    copies_.fetch_add(1, std::memory_order_relaxed);
    bytes_.fetch_add(bytes, std::memory_order_relaxed);
  }
  std::uint64_t copies() const { return copies_.load(std::memory_order_relaxed); }
  std::uint64_t bytes() const { return bytes_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> copies_{0};
  std::atomic<std::uint64_t> bytes_{0};
};

// shared_handoff moves the buffer (no copy). copy_through serialises it into
// a staging buffer and copies it out again, as a network path would.
Payload transfer_intranode(IntranodePath path, Payload payload, CopyCounter* counter = nullptr);

// HALOLAB_WATCHDOG_SECS, or 60 s.
std::chrono::milliseconds default_watchdog();

struct RuntimeOptions {
  IntranodePath path = IntranodePath::shared_handoff;
  std::chrono::milliseconds watchdog = default_watchdog();
};

struct TransportStats {
  std::uint64_t messages = 0;
  std::uint64_t copies = 0;
  std::uint64_t bytes_copied = 0;
};

namespace detail {
class Transport;
struct RecvSlot;
struct RequestAccess;
}  // namespace detail

class RankContext {
 public:
  RankContext(int rank, int nranks, detail::Transport& transport, ThreadPool& pool);

  int rank() const { return rank_; }
  int nranks() const { return nranks_; }
  ThreadPool& pool() { return *pool_; }
  IntranodePath path() const;
  detail::Transport& transport() { return *transport_; }
  bool on_main_context() const { return std::this_thread::get_id() == main_thread_; }

 private:
  int rank_;
  int nranks_;
  detail::Transport* transport_;
  ThreadPool* pool_;
  std::thread::id main_thread_;
};

class Request {
 public:
  enum class Kind { send, recv };

  Kind kind() const { return kind_; }
  int peer() const { return peer_; }
  int tag() const { return tag_; }
  bool completed() const { return completed_; }

 private:
  friend struct detail::RequestAccess;

  Kind kind_ = Kind::send;
  int peer_ = -1;
  int tag_ = 0;
  int owner_rank_ = -1;
  bool completed_ = false;
  std::shared_ptr<detail::RecvSlot> slot_;
};

// Tags must be non-negative; negative tags are reserved for collectives.
Request isend(RankContext& ctx, int dest, int tag, Payload payload);
Request irecv(RankContext& ctx, int src, int tag);

// Blocks until every request completes; element i holds the payload of
// request i (empty for sends). Throws DeadlockError when the watchdog expires.
std::vector<Payload> wait_all(RankContext& ctx, std::span<Request> requests);

double allreduce_min(RankContext& ctx, double value);

// Runs rank_main(ctx) on nranks concurrent rank threads, each owning a pool of
// nthreads workers. Any rank failure aborts the others and is rethrown as a
// RankFailure naming the rank.
void spawn_ranks_erased(int nranks, int nthreads, const RuntimeOptions& options,
                        const std::function<void(RankContext&)>& rank_main, TransportStats* stats = nullptr);

template <class F>
auto spawn_ranks(int nranks, int nthreads, const RuntimeOptions& options, F&& rank_main,
                 TransportStats* stats = nullptr) {
  using R = std::invoke_result_t<F&, RankContext&>;
  if constexpr (std::is_void_v<R>) {
    spawn_ranks_erased(nranks, nthreads, options, [&](RankContext& ctx) { rank_main(ctx); }, stats);
  } else {
    std::vector<std::optional<R>> slots(static_cast<std::size_t>(nranks > 0 ? nranks : 0));
    spawn_ranks_erased(
        nranks, nthreads, options, [&](RankContext& ctx) { slots[ctx.rank()].emplace(rank_main(ctx)); }, stats);
    std::vector<R> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  }
}

}  // namespace halolab
