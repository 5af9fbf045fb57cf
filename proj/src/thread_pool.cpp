#include "halolab/thread_pool.hpp"

#include <string>

#include "halolab/error.hpp"

namespace halolab {

Scheduling Scheduling::dynamic(int chunk) {
  if (chunk < 1) throw ConfigError("dynamic scheduling chunk must be >= 1 (got " + std::to_string(chunk) + ")");
  return {Kind::dynamic, chunk};
}

std::string to_string(const Scheduling& s) {
  if (s.kind == Scheduling::Kind::static_blocked) return "static";
  return s.chunk == 1 ? "dynamic" : "dynamic:" + std::to_string(s.chunk);
}

Scheduling parse_scheduling(const std::string& text) {
  if (text == "static") return Scheduling::static_blocked();
  if (text == "dynamic") return Scheduling::dynamic(1);
  if (text.rfind("dynamic:", 0) == 0) {
    int chunk = 0;
    try {
      std::size_t used = 0;
      chunk = std::stoi(text.substr(8), &used);
      if (used != text.size() - 8) chunk = 0;
    } catch (const std::exception&) {
      chunk = 0;
    }
    return Scheduling::dynamic(chunk);
  }
  throw ConfigError("unknown scheduling '" + text + "' (expected static, dynamic or dynamic:<chunk>)");
}

ThreadPool::ThreadPool(int nthreads) : nthreads_(nthreads) {
  if (nthreads < 1) throw ConfigError("threads must be at least 1");
  workers_.reserve(static_cast<std::size_t>(nthreads - 1));
  for (int w = 1; w < nthreads; ++w) workers_.emplace_back([this, w] { worker_loop(w); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void ThreadPool::worker_loop(int worker) {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
    }
    run_share(worker, false);
    std::lock_guard lock(mutex_);
    if (--active_workers_ == 0) done_cv_.notify_all();
  }
}

bool ThreadPool::next_index(int worker, std::size_t& cursor, std::size_t& end, std::size_t& out) {
  if (job_.sched.kind == Scheduling::Kind::static_blocked) {
    if (cursor >= end) return false;
    out = cursor++;
    return true;
  }
  if (cursor >= end) {
    std::lock_guard lock(mutex_);
    if (next_ >= job_.count) return false;
    cursor = next_;
    end = std::min(job_.count, next_ + static_cast<std::size_t>(job_.sched.chunk));
    next_ = end;
  }
  (void)worker;
  out = cursor++;
  return true;
}

void ThreadPool::record_done(std::size_t index) {
  std::lock_guard lock(mutex_);
  if (job_.notify) completed_.push_back(index);
  --remaining_;
  done_cv_.notify_all();
}

void ThreadPool::record_failure(std::size_t index, std::exception_ptr e) {
  std::lock_guard lock(mutex_);
  if (!failure_ || index < failed_index_) {
    failure_ = e;
    failed_index_ = index;
  }
  --remaining_;
  done_cv_.notify_all();
}

void ThreadPool::run_share(int worker, bool is_caller) {
  std::size_t cursor = 0, end = 0;
  if (job_.sched.kind == Scheduling::Kind::static_blocked) {
    const auto n = job_.count;
    const auto t = static_cast<std::size_t>(nthreads_);
    const auto w = static_cast<std::size_t>(worker);
    cursor = w * n / t;
    end = (w + 1) * n / t;
  }
  std::size_t index = 0;
  while (next_index(worker, cursor, end, index)) {
    try {
      (*job_.task)(index);
      record_done(index);
    } catch (...) {
      record_failure(index, std::current_exception());
    }
    (void)is_caller;
  }
}

void ThreadPool::drain_completions(const std::function<void(std::size_t)>& on_complete) {
  std::vector<std::size_t> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(completed_);
  }
  for (auto i : batch) on_complete(i);
}

void ThreadPool::parallel_for(std::size_t count, Scheduling sched, const std::function<void(std::size_t)>& task) {
  parallel_for_notify(count, sched, task, nullptr);
}

void ThreadPool::parallel_for_notify(std::size_t count, Scheduling sched,
                                     const std::function<void(std::size_t)>& task,
                                     const std::function<void(std::size_t)>& on_complete) {
  if (count == 0) return;
  if (sched.kind == Scheduling::Kind::dynamic && sched.chunk < 1) throw ConfigError("dynamic chunk must be >= 1");
  {
    std::lock_guard lock(mutex_);
    job_ = Job{count, sched, &task, static_cast<bool>(on_complete)};
    next_ = 0;
    remaining_ = count;
    completed_.clear();
    failure_ = nullptr;
    active_workers_ = nthreads_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr callback_error;
  if (!on_complete) {
    run_share(0, true);
  } else try {
    // The caller interleaves its own share with draining completions.
    std::size_t cursor = 0, end = 0;
    if (sched.kind == Scheduling::Kind::static_blocked) end = count / static_cast<std::size_t>(nthreads_);
    std::size_t index = 0;
    while (next_index(0, cursor, end, index)) {
      try {
        task(index);
        record_done(index);
      } catch (...) {
        record_failure(index, std::current_exception());
      }
      drain_completions(on_complete);
    }
    for (;;) {
      std::unique_lock lock(mutex_);
      done_cv_.wait(lock, [&] { return remaining_ == 0 || !completed_.empty(); });
      const bool finished = remaining_ == 0;
      lock.unlock();
      drain_completions(on_complete);
      if (finished) break;
    }
  } catch (...) {
    // Workers still reference the task; finish the barrier before rethrowing.
    callback_error = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [&] { return active_workers_ == 0 && (remaining_ == 0 || callback_error); });
  if (callback_error) {
    failure_ = nullptr;
    lock.unlock();
    std::rethrow_exception(callback_error);
  }
  if (failure_) {
    std::string what = "unknown exception";
    try {
      std::rethrow_exception(failure_);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    const auto idx = failed_index_;
    failure_ = nullptr;
    throw TaskError("task " + std::to_string(idx) + " failed: " + what, idx);
  }
}

}  // namespace halolab
