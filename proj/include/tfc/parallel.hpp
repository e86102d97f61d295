// Fixed-partition task runner. Callers decide the partition plan from problem
// data only, write into per-task slots, and reduce in task order, so results do
// not depend on the thread count.

#pragma once

#include <cstddef>
#include <functional>

namespace tfc::parallel {

/// 0 selects std::thread::hardware_concurrency().
void set_thread_count(int n);
int thread_count();

/// Runs task(i) for every i in [0, n_tasks). If tasks throw, the exception of the
/// lowest task index is rethrown after all workers finish.
void run_tasks(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

}  // namespace tfc::parallel
