#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/decoders/decoder.hpp"

namespace seqsearch {

/// Multi-producer multi-consumer FIFO with a capacity bound. push() blocks
/// while full; pop() blocks while empty and returns nullopt once the queue
/// is closed and drained.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("queue capacity must be >= 1");
  }

  void push(T item) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) throw UsageError("push on a closed queue");
    items_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
  bool closed_ = false;
  std::mutex mu_;
  std::condition_variable not_empty_, not_full_;
};

/// Outbound item: the position of the sentence in the output and the sentence.
struct Job {
  std::size_t index = 0;
  SourceSentence source;
};

/// Inbound item. Exactly one per job; `result` is empty for failures.
struct JobResult {
  std::size_t index = 0;
  std::size_t sentence_id = 0;
  std::size_t worker = 0;
  std::optional<SearchResult> result;
  std::string error;
  double seconds = 0.0;

  bool failed() const { return !result || result->failed(); }
};

/// Decodes one sentence. Each worker owns its own instance (and with it
/// its own predictor replicas).
using DecodeFn = std::function<SearchResult(const SourceSentence&)>;
using WorkerFactory = std::function<DecodeFn(std::size_t worker)>;

struct PipelineStats {
  std::size_t submitted = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

/// Scheduler -> jobs queue -> W workers -> results queue -> collector.
/// The collector hands results to `emit` strictly in input order, on its
/// own thread. A worker whose decode throws reports the job as failed and
/// keeps going.
inline PipelineStats run_pipeline(std::span<const SourceSentence> inputs, std::size_t workers,
                                  std::size_t queue_capacity, const WorkerFactory& make_worker,
                                  const std::function<void(JobResult&&)>& emit) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  BoundedQueue<Job> jobs(queue_capacity);
  BoundedQueue<JobResult> results(queue_capacity);
  PipelineStats stats;

  std::thread scheduler([&] {
    for (std::size_t i = 0; i < inputs.size(); ++i) jobs.push(Job{i, inputs[i]});
    jobs.close();
  });

  std::mutex done_mu;
  std::size_t running = workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      DecodeFn decode;
      std::string setup_error;
      try {
        decode = make_worker(w);
      } catch (const std::exception& e) {
        setup_error = std::string("worker setup failed: ") + e.what();
      }
      while (auto job = jobs.pop()) {
        JobResult r;
        r.index = job->index;
        r.sentence_id = job->source.id;
        r.worker = w;
        const auto t0 = std::chrono::steady_clock::now();
        if (!setup_error.empty()) {
          r.error = setup_error;
        } else {
          try {
            r.result = decode(job->source);
            if (r.result->failed()) r.error = "no complete hypothesis";
          } catch (const std::exception& e) {
            r.error = e.what();
          } catch (...) {
            r.error = "unknown failure";
          }
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push(std::move(r));
      }
      std::lock_guard lock(done_mu);
      if (--running == 0) results.close();
    });
  }

  std::thread collector([&] {
    std::map<std::size_t, JobResult> pending;
    std::size_t next = 0;
    while (auto r = results.pop()) {
      pending.emplace(r->index, std::move(*r));
      for (auto it = pending.find(next); it != pending.end(); it = pending.find(next)) {
        JobResult out = std::move(it->second);
        pending.erase(it);
        ++next;
        if (out.failed()) {
          ++stats.failed;
        } else {
          ++stats.completed;
        }
        emit(std::move(out));
      }
    }
  });

  scheduler.join();
  stats.submitted = inputs.size();
  for (auto& t : pool) t.join();
  collector.join();
  return stats;
}

}  // namespace seqsearch
