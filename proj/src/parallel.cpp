#include "delaynf/parallel.hpp"

#include <atomic>
#include <cstdlib>

#include <omp.h>

namespace delaynf {

namespace {
std::atomic<int> forced_workers{0};
}

int worker_count() {
  if (const int n = forced_workers.load(); n > 0) return n;
  if (const char* env = std::getenv("DELAYNF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

void set_worker_count(int n) { forced_workers.store(n > 0 ? n : 0); }

std::string to_string(Execution e) { return e == Execution::serial ? "serial" : "parallel"; }

}  // namespace delaynf
