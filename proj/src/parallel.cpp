#include "smmd/parallel.hpp"

namespace smmd {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_num_threads(unsigned threads) { g_threads = threads; }

unsigned num_threads() {
  const unsigned t = g_threads.load();
  if (t != 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace smmd
