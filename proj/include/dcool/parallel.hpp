#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dcool {

// Minimal fixed-size pool exposing a blocking parallel_for. Work items must
// be independent per index; every index is executed exactly once, in
// unspecified order, so results are identical to a sequential loop whenever
// the body only writes to index-owned slots. workers == 1 runs inline
// without spawning any threads.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) : workers_(workers < 1 ? 1 : workers) {
    for (int t = 1; t < workers_; ++t)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~ThreadPool() {
    {
      std::unique_lock lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int workers() const { return workers_; }

  void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    if (workers_ == 1 || n == 1) {
      for (int i = 0; i < n; ++i) body(i);
      return;
    }
    {
      std::unique_lock lk(m_);
      body_ = &body;
      n_ = n;
      next_.store(0, std::memory_order_relaxed);
      remaining_ = n;
      ++generation_;
    }
    cv_.notify_all();
    run_share();
    std::unique_lock lk(m_);
    done_cv_.wait(lk, [this] { return remaining_ == 0; });
    body_ = nullptr;
  }

 private:
  void run_share() {
    const std::function<void(int)>* body;
    int n;
    {
      std::unique_lock lk(m_);
      body = body_;
      n = n_;
    }
    if (!body) return;
    int finished = 0;
    for (;;) {
      const int i = next_.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      (*body)(i);
      ++finished;
    }
    if (finished > 0) {
      std::unique_lock lk(m_);
      remaining_ -= finished;
      if (remaining_ == 0) done_cv_.notify_all();
    }
  }

  void worker_loop() {
    long seen = 0;
    for (;;) {
      {
        std::unique_lock lk(m_);
        cv_.wait(lk, [this, seen] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      run_share();
    }
  }

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* body_ = nullptr;
  int n_ = 0;
  std::atomic<int> next_{0};
  int remaining_ = 0;
  long generation_ = 0;
  bool stop_ = false;
};

}  // namespace dcool
