#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "halolab/error.hpp"
#include "halolab/runtime.hpp"

using namespace halolab;
using namespace std::chrono_literals;

namespace {

RuntimeOptions quick(IntranodePath path = IntranodePath::shared_handoff, std::chrono::milliseconds wd = 5000ms) {
  RuntimeOptions o;
  o.path = path;
  o.watchdog = wd;
  return o;
}

template <class E>
bool cause_is(const RankFailure& f) {
  try {
    std::rethrow_exception(f.cause());
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

TEST(SpawnRanks, RunsEachRankOnce) {
  std::atomic<int> calls{0};
  spawn_ranks(1, 1, quick(), [&](RankContext&) { ++calls; });
  EXPECT_EQ(calls.load(), 1);
  const auto ids = spawn_ranks(4, 2, quick(), [](RankContext& ctx) { return ctx.rank(); });
  EXPECT_EQ(ids, (std::vector<int>{0, 1, 2, 3}));
}

TEST(SpawnRanks, FailureNamesTheRankAndAbortsPeers) {
  try {
    spawn_ranks(3, 1, quick(), [](RankContext& ctx) {
      if (ctx.rank() == 2) throw SolverError("boom");
      // Blocks until the transport aborts.
      std::vector<Request> r{irecv(ctx, 2, 1)};
      wait_all(ctx, r);
    });
    FAIL() << "expected RankFailure";
  } catch (const RankFailure& e) {
    EXPECT_EQ(e.rank(), 2);
    EXPECT_TRUE(cause_is<SolverError>(e));
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(PointToPoint, SelfSendRoundTripsBitwise) {
  for (auto path : {IntranodePath::shared_handoff, IntranodePath::copy_through}) {
    spawn_ranks(1, 1, quick(path), [](RankContext& ctx) {
      Payload p{1.0, -0.0, 3.5e-300, std::nan("1")};
      const Payload copy = p;
      std::vector<Request> reqs{isend(ctx, 0, 3, std::move(p)), irecv(ctx, 0, 3)};
      const auto out = wait_all(ctx, reqs);
      ASSERT_EQ(out.size(), 2u);
      EXPECT_TRUE(out[0].empty());
      ASSERT_EQ(out[1].size(), copy.size());
      EXPECT_EQ(std::memcmp(out[1].data(), copy.data(), copy.size() * sizeof(double)), 0);
      EXPECT_TRUE(reqs[0].completed() && reqs[1].completed());
    });
  }
}

TEST(PointToPoint, SameTagArrivesInPostingOrder) {
  spawn_ranks(2, 1, quick(), [](RankContext& ctx) {
    if (ctx.rank() == 0) {
      std::vector<Request> s;
      for (int n = 0; n < 50; ++n) s.push_back(isend(ctx, 1, 7, Payload{static_cast<double>(n)}));
      wait_all(ctx, s);
    } else {
      std::vector<Request> r;
      for (int n = 0; n < 50; ++n) r.push_back(irecv(ctx, 0, 7));
      const auto out = wait_all(ctx, r);
      for (int n = 0; n < 50; ++n) ASSERT_EQ(out[n].at(0), n);
    }
  });
}

TEST(PointToPoint, RecvBeforeAndAfterSend) {
  spawn_ranks(2, 1, quick(), [](RankContext& ctx) {
    if (ctx.rank() == 1) {
      // Posted first, completes once rank 0 sends.
      std::vector<Request> r{irecv(ctx, 0, 1)};
      EXPECT_EQ(wait_all(ctx, r)[0].at(0), 11.0);
      std::vector<Request> go{isend(ctx, 0, 2, Payload{})};
      wait_all(ctx, go);
    } else {
      std::this_thread::sleep_for(20ms);
      std::vector<Request> s{isend(ctx, 1, 1, Payload{11.0})};
      wait_all(ctx, s);
      std::vector<Request> r{irecv(ctx, 1, 2)};
      wait_all(ctx, r);
      // Message is queued before the receive exists.
      std::vector<Request> self{isend(ctx, 0, 9, Payload{4.0})};
      wait_all(ctx, self);
      std::vector<Request> late{irecv(ctx, 0, 9)};
      EXPECT_EQ(wait_all(ctx, late)[0].at(0), 4.0);
    }
  });
}

TEST(PointToPoint, EmptyWaitAllAndZeroLengthPayloads) {
  spawn_ranks(1, 1, quick(), [](RankContext& ctx) {
    std::vector<Request> none;
    EXPECT_TRUE(wait_all(ctx, none).empty());
    std::vector<Request> r{isend(ctx, 0, 0, Payload{}), irecv(ctx, 0, 0)};
    EXPECT_TRUE(wait_all(ctx, r)[1].empty());
  });
}

TEST(PointToPoint, ArgumentErrors) {
  spawn_ranks(2, 1, quick(), [](RankContext& ctx) {
    EXPECT_THROW(isend(ctx, 2, 0, Payload{}), DomainError);
    EXPECT_THROW(irecv(ctx, -1, 0), DomainError);
    EXPECT_THROW(isend(ctx, 0, -1, Payload{}), DomainError);
    std::vector<Request> r{isend(ctx, ctx.rank(), 0, Payload{1.0}), irecv(ctx, ctx.rank(), 0)};
    wait_all(ctx, r);
    EXPECT_THROW(wait_all(ctx, r), ProtocolError);
  });
}

TEST(PointToPoint, RequestsAreOwnedByTheirRank) {
  std::mutex mu;
  std::vector<Request> foreign;
  EXPECT_THROW(spawn_ranks(2, 1, quick(), [&](RankContext& ctx) {
                 if (ctx.rank() == 0) {
                   std::lock_guard lock(mu);
                   foreign.push_back(irecv(ctx, 0, 4));
                 }
                 std::vector<Request> b{isend(ctx, 1 - ctx.rank(), 5, Payload{}), irecv(ctx, 1 - ctx.rank(), 5)};
                 wait_all(ctx, b);
                 if (ctx.rank() == 1) {
                   std::lock_guard lock(mu);
                   wait_all(ctx, foreign);
                 }
               }),
               RankFailure);
}

TEST(PointToPoint, FunneledContractRejectsWorkerCalls) {
  std::atomic<int> rejected{0}, tried{0};
  spawn_ranks(1, 4, quick(), [&](RankContext& ctx) {
    ctx.pool().parallel_for(16, Scheduling::static_blocked(), [&](std::size_t) {
      if (ctx.on_main_context()) return;
      ++tried;
      try {
        isend(ctx, 0, 1, Payload{});
      } catch (const ProtocolError&) {
        ++rejected;
      }
    });
  });
  EXPECT_GT(tried.load(), 0);
  EXPECT_EQ(rejected.load(), tried.load());
}

TEST(PointToPoint, RandomizedSchedulesDeliverExactlyOnceInOrder) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    std::mt19937_64 rng(seed);
    const int nranks = 2 + static_cast<int>(rng() % 4);
    struct Msg {
      int src, dst, tag;
      double id;
    };
    std::vector<Msg> msgs;
    for (int n = 0; n < 300; ++n)
      msgs.push_back({static_cast<int>(rng() % nranks), static_cast<int>(rng() % nranks), static_cast<int>(rng() % 4),
                      static_cast<double>(n)});

    std::mutex mu;
    std::map<double, int> delivered;
    bool order_ok = true;
    spawn_ranks(nranks, 1, quick(seed % 2 ? IntranodePath::copy_through : IntranodePath::shared_handoff),
                [&](RankContext& ctx) {
                  std::mt19937_64 local(seed * 100 + ctx.rank());
                  std::vector<Msg> sends, recvs;
                  for (const auto& m : msgs) {
                    if (m.src == ctx.rank()) sends.push_back(m);
                    if (m.dst == ctx.rank()) recvs.push_back(m);
                  }
                  std::vector<Request> reqs;
                  std::vector<const Msg*> expect;
                  std::size_t si = 0, ri = 0;
                  // Interleave posts randomly; per-(src,tag) receive order follows message order.
                  while (si < sends.size() || ri < recvs.size()) {
                    const bool do_send = ri == recvs.size() || (si < sends.size() && local() % 2 == 0);
                    if (do_send) {
                      const auto& m = sends[si++];
                      reqs.push_back(isend(ctx, m.dst, m.tag, Payload{m.id}));
                      expect.push_back(nullptr);
                    } else {
                      const auto& m = recvs[ri++];
                      reqs.push_back(irecv(ctx, m.src, m.tag));
                      expect.push_back(&m);
                    }
                    if (local() % 8 == 0) std::this_thread::yield();
                  }
                  const auto out = wait_all(ctx, reqs);
                  std::lock_guard lock(mu);
                  for (std::size_t n = 0; n < out.size(); ++n) {
                    if (!expect[n]) continue;
                    if (out[n].size() != 1 || out[n][0] != expect[n]->id) order_ok = false;
                    if (!out[n].empty()) ++delivered[out[n][0]];
                  }
                });
    EXPECT_TRUE(order_ok) << "seed " << seed;
    ASSERT_EQ(delivered.size(), msgs.size()) << "seed " << seed;
    for (const auto& [id, count] : delivered) ASSERT_EQ(count, 1) << "message " << id;
  }
}

TEST(Watchdog, MismatchedTagTimesOut) {
  const auto start = std::chrono::steady_clock::now();
  try {
    spawn_ranks(2, 1, quick(IntranodePath::shared_handoff, 200ms), [](RankContext& ctx) {
      if (ctx.rank() == 0) {
        std::vector<Request> r{irecv(ctx, 1, 5)};
        wait_all(ctx, r);
      } else {
        std::vector<Request> s{isend(ctx, 0, 6, Payload{1.0})};
        wait_all(ctx, s);
      }
    });
    FAIL() << "expected a watchdog timeout";
  } catch (const RankFailure& e) {
    EXPECT_TRUE(cause_is<DeadlockError>(e));
    EXPECT_NE(std::string(e.what()).find("src=1, tag=5"), std::string::npos) << e.what();
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, 10s);
}

TEST(Watchdog, DefaultIsSixtySecondsAndEnvOverrides) {
  ::unsetenv("HALOLAB_WATCHDOG_SECS");
  EXPECT_EQ(default_watchdog(), 60000ms);
  ::setenv("HALOLAB_WATCHDOG_SECS", "2.5", 1);
  EXPECT_EQ(default_watchdog(), 2500ms);
  ::unsetenv("HALOLAB_WATCHDOG_SECS");
}

TEST(AllreduceMin, Examples) {
  spawn_ranks(1, 1, quick(), [](RankContext& ctx) { EXPECT_EQ(allreduce_min(ctx, 3.0), 3.0); });
  const auto got = spawn_ranks(3, 1, quick(), [](RankContext& ctx) {
    const double v[3] = {0.2, 0.1, 0.3};
    return allreduce_min(ctx, v[ctx.rank()]);
  });
  for (double g : got) EXPECT_EQ(g, 0.1);
  const auto same = spawn_ranks(5, 1, quick(), [](RankContext& ctx) { return allreduce_min(ctx, 1.0 / 3.0); });
  for (double g : same) EXPECT_EQ(g, 1.0 / 3.0);
}

TEST(AllreduceMin, RepeatedRoundsWithUserTraffic) {
  spawn_ranks(4, 1, quick(), [](RankContext& ctx) {
    for (int round = 0; round < 50; ++round) {
      const int peer = (ctx.rank() + 1) % ctx.nranks();
      const int from = (ctx.rank() + ctx.nranks() - 1) % ctx.nranks();
      std::vector<Request> r{isend(ctx, peer, 0, Payload{double(round)}), irecv(ctx, from, 0)};
      EXPECT_EQ(wait_all(ctx, r)[1].at(0), round);
      EXPECT_EQ(allreduce_min(ctx, 100.0 - ctx.rank() - round), 100.0 - 3 - round);
    }
  });
}

TEST(IntranodePath, CopyCounting) {
  const Payload big(16 * 1024 * 1024 / sizeof(double), 1.25);
  CopyCounter shared, copy;
  const auto a = transfer_intranode(IntranodePath::shared_handoff, big, &shared);
  const auto b = transfer_intranode(IntranodePath::copy_through, big, &copy);
  EXPECT_EQ(shared.copies(), 0u);
  EXPECT_EQ(copy.copies(), 2u);
  EXPECT_EQ(copy.bytes(), 2u * 16 * 1024 * 1024);
  EXPECT_EQ(a, big);
  EXPECT_EQ(b, big);
  EXPECT_TRUE(transfer_intranode(IntranodePath::copy_through, Payload{}, &copy).empty());
  const Payload kib(128, -3.0);
  EXPECT_EQ(transfer_intranode(IntranodePath::shared_handoff, kib), transfer_intranode(IntranodePath::copy_through, kib));
}

TEST(IntranodePath, TransportCountsCopiesPerMessage) {
  for (auto path : {IntranodePath::shared_handoff, IntranodePath::copy_through}) {
    TransportStats stats;
    spawn_ranks(
        2, 1, quick(path),
        [](RankContext& ctx) {
          std::vector<Request> r{isend(ctx, 1 - ctx.rank(), 0, Payload(1024, 1.0)), irecv(ctx, 1 - ctx.rank(), 0)};
          wait_all(ctx, r);
        },
        &stats);
    EXPECT_EQ(stats.messages, 2u);
    EXPECT_EQ(stats.copies, path == IntranodePath::copy_through ? 4u : 0u);
  }
  EXPECT_EQ(parse_intranode_path("copy-through"), IntranodePath::copy_through);
  EXPECT_EQ(to_string(IntranodePath::shared_handoff), "shared-handoff");
  EXPECT_THROW(parse_intranode_path("rdma"), ConfigError);
}
