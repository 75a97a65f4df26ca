#pragma once

#include <functional>

namespace satground {

// Process-wide worker cap. 0 restores the default (hardware concurrency).
// Set once at startup (CLI --jobs); not synchronized against running loops.
void set_max_jobs(int jobs);
int max_jobs();

// Runs chunk_body(begin_i, end_i) over a partition of [begin, end) into
// contiguous chunks, one per worker. Chunks must only write state they own;
// the partition depends only on the range, so outputs are independent of the
// worker count.
void parallel_for(int begin, int end, const std::function<void(int, int)>& chunk_body);

}  // namespace satground
