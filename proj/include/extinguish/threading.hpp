#ifndef EXTINGUISH_THREADING_HPP
#define EXTINGUISH_THREADING_HPP

#include <cstdlib>
#include <thread>

namespace extinguish {

// Worker pool size: hardware concurrency, capped by EXTINGUISH_THREADS.
inline int worker_count() {
  int n = int(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("EXTINGUISH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

}  // namespace extinguish

#endif
