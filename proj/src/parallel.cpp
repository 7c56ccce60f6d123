#include "hofer/parallel.hpp"

#include <atomic>

namespace hofer {

namespace {
std::atomic<unsigned> workers{1};
}

void set_worker_count(unsigned n) {
    workers.store(n == 0 ? 1 : n);
}

unsigned worker_count() {
    return workers.load();
}

}  // namespace hofer
