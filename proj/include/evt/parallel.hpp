#pragma once

namespace evt {

/// Number of OpenMP workers used by the parallel kernels (1 without OpenMP).
int worker_count();
void set_worker_count(int n);

}  // namespace evt
