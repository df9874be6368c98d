#include "spinwave/parallel.hpp"

#include <atomic>

namespace spinwave {

namespace {
std::atomic<unsigned> g_threads{1};
}

unsigned default_threads() { return g_threads.load(); }

void set_default_threads(unsigned threads) {
  g_threads.store(threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads);
}

}  // namespace spinwave
