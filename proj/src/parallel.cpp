#include "wgkit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace wgkit {

int resolve_threads(int requested, std::size_t tasks) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("WGKIT_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) n = std::min(n, cap);
        } catch (...) {
        }
    }
    n = std::max(n, 1);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(tasks, 1)));
}

}  // namespace wgkit
