#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace swarmsched {

// Persistent pool of workers executing index ranges. Work items never share
// mutable state (each index touches its own slot), so the pool provides
// deterministic results for any worker count; merging of per-index results
// is always done serially by the caller afterwards.
class WorkerPool {
public:
    explicit WorkerPool(int workers) : workers_(workers < 1 ? 1 : workers) {
        for (int w = 1; w < workers_; ++w) {
            threads_.emplace_back([this, w] { worker_loop(w); });
        }
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        {
            std::unique_lock<std::mutex> lock(mutex_);
            stop_ = true;
            ++generation_;
        }
        cv_start_.notify_all();
        for (auto& t : threads_) t.join();
    }

    int workers() const { return workers_; }

    // Runs fn(i) for i in [0, count). The calling thread participates; the
    // call returns only after every index has been processed.
    void parallel_for(int count, const std::function<void(int)>& fn) {
        if (count <= 0) return;
        if (workers_ == 1 || count == 1) {
            for (int i = 0; i < count; ++i) fn(i);
            return;
        }
        {
            std::unique_lock<std::mutex> lock(mutex_);
            fn_ = &fn;
            count_ = count;
            pending_ = workers_ - 1;
            ++generation_;
        }
        cv_start_.notify_all();
        run_slice(0);
        std::unique_lock<std::mutex> lock(mutex_);
        cv_done_.wait(lock, [this] { return pending_ == 0; });
        fn_ = nullptr;
    }

private:
    void worker_loop(int id) {
        uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_start_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_) return;
            }
            run_slice(id);
            {
                std::unique_lock<std::mutex> lock(mutex_);
                if (--pending_ == 0) cv_done_.notify_one();
            }
        }
    }

    // Static block partition: worker w handles one contiguous slice.
    void run_slice(int worker_id) {
        const int per = (count_ + workers_ - 1) / workers_;
        const int lo = worker_id * per;
        const int hi = std::min(count_, lo + per);
        for (int i = lo; i < hi; ++i) (*fn_)(i);
    }

    const int workers_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_start_;
    std::condition_variable cv_done_;
    const std::function<void(int)>* fn_ = nullptr;
    int count_ = 0;
    int pending_ = 0;
    uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace swarmsched
