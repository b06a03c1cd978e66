#pragma once

#include <cstdint>
#include <functional>

namespace attrikit {

// Worker-count resolution order: explicit set_worker_count(n>0), else the
// ATTRIKIT_THREADS environment variable, else hardware concurrency.
int worker_count();
void set_worker_count(int n);  // n <= 0 restores automatic selection

// Runs body(i) for i in [0, count). Each index writes only its own output
// slot, so results are identical for any worker count or schedule.
void parallel_indexed(std::int64_t count, const std::function<void(std::int64_t)>& body);

}  // namespace attrikit
