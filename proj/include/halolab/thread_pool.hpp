#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace halolab {

struct Scheduling {
  enum class Kind { static_blocked, dynamic };

  Kind kind = Kind::static_blocked;
  int chunk = 1;

  static Scheduling static_blocked() { return {Kind::static_blocked, 1}; }
  // Throws ConfigError for chunk < 1.
  static Scheduling dynamic(int chunk = 1);

  bool operator==(const Scheduling&) const = default;
};

std::string to_string(const Scheduling& s);
// "static", "dynamic" or "dynamic:<chunk>".
Scheduling parse_scheduling(const std::string& text);

// Fork-join pool of `nthreads` workers; the calling thread acts as worker 0,
// so nthreads == 1 runs everything inline.
class ThreadPool {
 public:
  explicit ThreadPool(int nthreads);
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return nthreads_; }

  // Runs task(i) for every i in [0, count) exactly once and returns after all
  // complete. A throwing task is reported as TaskError after the barrier.
  void parallel_for(std::size_t count, Scheduling sched, const std::function<void(std::size_t)>& task);

  // As parallel_for, but the calling thread also invokes on_complete(i) for
  // each successfully completed task, in completion order, while the loop is
  // still running.
  void parallel_for_notify(std::size_t count, Scheduling sched, const std::function<void(std::size_t)>& task,
                           const std::function<void(std::size_t)>& on_complete);

 private:
  struct Job {
    std::size_t count = 0;
    Scheduling sched;
    const std::function<void(std::size_t)>* task = nullptr;
    bool notify = false;
  };

  void worker_loop(int worker);
  void run_share(int worker, bool is_caller);
  bool next_index(int worker, std::size_t& cursor, std::size_t& end, std::size_t& out);
  void record_done(std::size_t index);
  void record_failure(std::size_t index, std::exception_ptr e);
  void drain_completions(const std::function<void(std::size_t)>& on_complete);

  int nthreads_;
  std::vector<std::thread> workers_;

  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  std::size_t generation_ = 0;
  bool stopping_ = false;
  Job job_;
  std::size_t next_ = 0;  // dynamic cursor, guarded by mutex_
  int active_workers_ = 0;
  std::size_t remaining_ = 0;
  std::vector<std::size_t> completed_;
  std::size_t failed_index_ = 0;
  std::exception_ptr failure_;
};

}  // namespace halolab
