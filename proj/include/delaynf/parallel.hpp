#pragma once

#include <string>

namespace delaynf {

// Serial runs are the reference; parallel runs must reproduce them bit for bit.
enum class Execution { serial, parallel };

// Worker count for parallel kernels: DELAYNF_THREADS if set and positive,
// otherwise the OpenMP default.
int worker_count();

// Overrides worker_count() until reset with 0.
void set_worker_count(int n);

std::string to_string(Execution e);

}  // namespace delaynf
