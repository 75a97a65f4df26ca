#include "satground/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace satground {

namespace {
std::atomic<int> g_max_jobs{0};
}

void set_max_jobs(int jobs) { g_max_jobs.store(jobs < 0 ? 0 : jobs); }

int max_jobs() {
    int j = g_max_jobs.load();
    if (j > 0) return j;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

void parallel_for(int begin, int end, const std::function<void(int, int)>& chunk_body) {
    const int n = end - begin;
    if (n <= 0) return;
    const int workers = std::min(max_jobs(), n);
    if (workers <= 1) {
        chunk_body(begin, end);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const int base = n / workers, extra = n % workers;
    int start = begin;
    for (int w = 0; w < workers; ++w) {
        int len = base + (w < extra ? 1 : 0);
        int stop = start + len;
        threads.emplace_back([&chunk_body, start, stop] { chunk_body(start, stop); });
        start = stop;
    }
    for (auto& t : threads) t.join();
}

}  // namespace satground
