#include "spfh/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spfh {

namespace {

std::atomic<int> g_budget{0};
thread_local bool t_inside = false;

}  // namespace

void set_worker_budget(int workers) { g_budget = std::max(1, workers); }

int worker_budget() {
    int b = g_budget.load();
    if (b > 0) return b;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    int workers = std::min(worker_budget(), count);
    if (workers <= 1 || t_inside) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        t_inside = true;
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
        t_inside = false;
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace spfh
