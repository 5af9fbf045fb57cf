#include "halolab/runtime.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>

#include "halolab/error.hpp"

namespace halolab {

namespace detail {

struct RecvSlot {
  int src = -1;
  int tag = 0;
  bool ready = false;
  Payload data;
};

struct Mailbox {
  using Key = std::pair<int, int>;  // (src, tag)

  std::mutex mutex;
  std::condition_variable cv;
  std::map<Key, std::deque<Payload>> arrived;
  std::map<Key, std::deque<std::shared_ptr<RecvSlot>>> pending;
};

class Transport {
 public:
  Transport(int nranks, const RuntimeOptions& options)
      : options_(options), boxes_(static_cast<std::size_t>(nranks)) {
    for (auto& b : boxes_) b = std::make_unique<Mailbox>();
  }

  int nranks() const { return static_cast<int>(boxes_.size()); }
  const RuntimeOptions& options() const { return options_; }
  CopyCounter& copies() { return copies_; }
  std::uint64_t messages() const { return messages_.load(std::memory_order_relaxed); }

  void send(int src, int dest, int tag, Payload payload) {
    Payload staged = stage(std::move(payload));
    messages_.fetch_add(1, std::memory_order_relaxed);
    Mailbox& box = *boxes_[dest];
    {
      std::lock_guard lock(box.mutex);
      const Mailbox::Key key{src, tag};
      auto it = box.pending.find(key);
      if (it != box.pending.end() && !it->second.empty()) {
        auto slot = it->second.front();
        it->second.pop_front();
        slot->data = std::move(staged);
        slot->ready = true;
      } else {
        box.arrived[key].push_back(std::move(staged));
      }
    }
    box.cv.notify_all();
  }

  std::shared_ptr<RecvSlot> post_recv(int self, int src, int tag) {
    auto slot = std::make_shared<RecvSlot>();
    slot->src = src;
    slot->tag = tag;
    Mailbox& box = *boxes_[self];
    std::lock_guard lock(box.mutex);
    const Mailbox::Key key{src, tag};
    auto it = box.arrived.find(key);
    if (it != box.arrived.end() && !it->second.empty()) {
      slot->data = std::move(it->second.front());
      it->second.pop_front();
      slot->ready = true;
    } else {
      box.pending[key].push_back(slot);
    }
    return slot;
  }

  // False on timeout. Throws AbortedError when another rank failed.
  bool wait_ready(int self, const RecvSlot& slot, std::chrono::steady_clock::time_point deadline) {
    Mailbox& box = *boxes_[self];
    std::unique_lock lock(box.mutex);
    const bool ok = box.cv.wait_until(lock, deadline, [&] { return slot.ready || aborted_.load(); });
    if (!slot.ready && aborted_.load()) throw AbortedError("aborted: another rank failed");
    return ok;
  }

  Payload take(RecvSlot& slot) {
    if (options_.path == IntranodePath::copy_through) {
      Payload out(slot.data);
      copies_.add(out.size() * sizeof(double));
      slot.data.clear();
      slot.data.shrink_to_fit();
      return out;
    }
    return std::move(slot.data);
  }

  void abort() {
    aborted_.store(true);
    for (auto& b : boxes_) {
      std::lock_guard lock(b->mutex);
      b->cv.notify_all();
    }
  }

 private:
  Payload stage(Payload payload) {
    if (options_.path == IntranodePath::copy_through) {
      Payload staging(payload);
      copies_.add(staging.size() * sizeof(double));
      return staging;
    }
    return payload;
  }

  RuntimeOptions options_;
  std::vector<std::unique_ptr<Mailbox>> boxes_;
  CopyCounter copies_;
  std::atomic<std::uint64_t> messages_{0};
  std::atomic<bool> aborted_{false};
};

struct RequestAccess {
  static Request make_send(int owner, int dest, int tag) {
    Request r;
    r.kind_ = Request::Kind::send;
    r.peer_ = dest;
    r.tag_ = tag;
    r.owner_rank_ = owner;
    return r;
  }
  static Request make_recv(int owner, int src, int tag, std::shared_ptr<RecvSlot> slot) {
    Request r;
    r.kind_ = Request::Kind::recv;
    r.peer_ = src;
    r.tag_ = tag;
    r.owner_rank_ = owner;
    r.slot_ = std::move(slot);
    return r;
  }
  static int owner(const Request& r) { return r.owner_rank_; }
  static RecvSlot* slot(Request& r) { return r.slot_.get(); }
  static void complete(Request& r) {
    r.completed_ = true;
    r.slot_.reset();
  }
};

}  // namespace detail

namespace {

constexpr int kReduceTag = -1;

void require_main(const RankContext& ctx, const char* op) {
  if (!ctx.on_main_context())
    throw ProtocolError(std::string(op) + " called off the main context of rank " + std::to_string(ctx.rank()));
}

void require_peer(const RankContext& ctx, int peer, const char* op) {
  if (peer < 0 || peer >= ctx.nranks())
    throw DomainError(std::string(op) + ": rank " + std::to_string(peer) + " outside [0, " +
                      std::to_string(ctx.nranks()) + ")");
}

Request post_send(RankContext& ctx, int dest, int tag, Payload payload) {
  ctx.transport().send(ctx.rank(), dest, tag, std::move(payload));
  return detail::RequestAccess::make_send(ctx.rank(), dest, tag);
}

Request post_recv(RankContext& ctx, int src, int tag) {
  auto slot = ctx.transport().post_recv(ctx.rank(), src, tag);
  return detail::RequestAccess::make_recv(ctx.rank(), src, tag, std::move(slot));
}

}  // namespace

std::string to_string(IntranodePath p) {
  return p == IntranodePath::shared_handoff ? "shared-handoff" : "copy-through";
}

IntranodePath parse_intranode_path(const std::string& text) {
  if (text == "shared-handoff" || text == "shared_handoff" || text == "shared") return IntranodePath::shared_handoff;
  if (text == "copy-through" || text == "copy_through" || text == "copy") return IntranodePath::copy_through;
  throw ConfigError("unknown intranode path '" + text + "' (expected shared-handoff or copy-through)");
}

Payload transfer_intranode(IntranodePath path, Payload payload, CopyCounter* counter) {
  if (path == IntranodePath::shared_handoff) return payload;
  Payload staging(payload);
  if (counter) counter->add(staging.size() * sizeof(double));
  payload.clear();
  Payload delivered(staging);
  if (counter) counter->add(delivered.size() * sizeof(double));
  return delivered;
}

std::chrono::milliseconds default_watchdog() {
  if (const char* env = std::getenv("HALOLAB_WATCHDOG_SECS")) {
    char* end = nullptr;
    const double secs = std::strtod(env, &end);
    if (end != env && secs > 0.0) return std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
  }
  return std::chrono::seconds(60);
}

RankContext::RankContext(int rank, int nranks, detail::Transport& transport, ThreadPool& pool)
    : rank_(rank), nranks_(nranks), transport_(&transport), pool_(&pool), main_thread_(std::this_thread::get_id()) {}

IntranodePath RankContext::path() const { return transport_->options().path; }

Request isend(RankContext& ctx, int dest, int tag, Payload payload) {
  require_main(ctx, "isend");
  require_peer(ctx, dest, "isend");
  if (tag < 0) throw DomainError("isend: negative tags are reserved");
  return post_send(ctx, dest, tag, std::move(payload));
}

Request irecv(RankContext& ctx, int src, int tag) {
  require_main(ctx, "irecv");
  require_peer(ctx, src, "irecv");
  if (tag < 0) throw DomainError("irecv: negative tags are reserved");
  return post_recv(ctx, src, tag);
}

std::vector<Payload> wait_all(RankContext& ctx, std::span<Request> requests) {
  require_main(ctx, "wait_all");
  for (const Request& r : requests) {
    if (detail::RequestAccess::owner(r) != ctx.rank())
      throw ProtocolError("wait_all: request belongs to rank " + std::to_string(detail::RequestAccess::owner(r)));
    if (r.completed()) throw ProtocolError("wait_all: request already completed");
  }
  std::vector<Payload> out(requests.size());
  auto& transport = ctx.transport();
  const auto deadline = std::chrono::steady_clock::now() + transport.options().watchdog;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    Request& r = requests[i];
    if (r.kind() == Request::Kind::recv) {
      auto* slot = detail::RequestAccess::slot(r);
      if (!transport.wait_ready(ctx.rank(), *slot, deadline)) {
        std::ostringstream msg;
        msg << "deadlock: rank " << ctx.rank() << " watchdog expired with pending receives:";
        for (std::size_t k = i; k < requests.size(); ++k) {
          Request& q = requests[k];
          if (q.kind() == Request::Kind::recv && !detail::RequestAccess::slot(q)->ready)
            msg << " (src=" << q.peer() << ", tag=" << q.tag() << ")";
        }
        throw DeadlockError(msg.str());
      }
      out[i] = transport.take(*slot);
    }
    detail::RequestAccess::complete(r);
  }
  return out;
}

double allreduce_min(RankContext& ctx, double value) {
  require_main(ctx, "allreduce_min");
  if (ctx.nranks() == 1) return value;
  if (ctx.rank() == 0) {
    std::vector<Request> reqs;
    for (int r = 1; r < ctx.nranks(); ++r) reqs.push_back(post_recv(ctx, r, kReduceTag));
    double result = value;
    for (const auto& p : wait_all(ctx, reqs)) result = std::min(result, p.at(0));
    std::vector<Request> sends;
    for (int r = 1; r < ctx.nranks(); ++r) sends.push_back(post_send(ctx, r, kReduceTag, Payload{result}));
    wait_all(ctx, sends);
    return result;
  }
  std::vector<Request> reqs;
  reqs.push_back(post_send(ctx, 0, kReduceTag, Payload{value}));
  reqs.push_back(post_recv(ctx, 0, kReduceTag));
  return wait_all(ctx, reqs)[1].at(0);
}

void spawn_ranks_erased(int nranks, int nthreads, const RuntimeOptions& options,
                        const std::function<void(RankContext&)>& rank_main, TransportStats* stats) {
  if (nranks < 1) throw ConfigError("ranks must be at least 1");
  if (nthreads < 1) throw ConfigError("threads must be at least 1");

  detail::Transport transport(nranks, options);
  struct Outcome {
    std::exception_ptr error;
    std::string what;
    bool secondary = false;  // aborted because of another rank
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(nranks));

  auto run = [&](int rank) {
    try {
      ThreadPool pool(nthreads);
      RankContext ctx(rank, nranks, transport, pool);
      rank_main(ctx);
    } catch (const AbortedError& e) {
      outcomes[rank] = {std::current_exception(), e.what(), true};
    } catch (const std::exception& e) {
      outcomes[rank] = {std::current_exception(), e.what(), false};
      transport.abort();
    } catch (...) {
      outcomes[rank] = {std::current_exception(), "unknown exception", false};
      transport.abort();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(nranks));
  for (int r = 0; r < nranks; ++r) threads.emplace_back(run, r);
  for (auto& t : threads) t.join();

  if (stats) {
    stats->messages = transport.messages();
    stats->copies = transport.copies().copies();
    stats->bytes_copied = transport.copies().bytes();
  }

  std::string msg;
  int first = -1;
  for (int r = 0; r < nranks; ++r) {
    const auto& o = outcomes[r];
    if (!o.error || o.secondary) continue;
    if (first < 0) first = r;
    msg += (msg.empty() ? "" : "; ") + ("rank " + std::to_string(r) + ": " + o.what);
  }
  if (first < 0)
    for (int r = 0; r < nranks; ++r)
      if (outcomes[r].error) {
        first = r;
        msg = "rank " + std::to_string(r) + ": " + outcomes[r].what;
        break;
      }
  if (first >= 0) throw RankFailure(msg, first, outcomes[first].error);
}

}  // namespace halolab
