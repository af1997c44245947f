#include "fastsketch/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fastsketch {

std::size_t resolve_threads(std::optional<std::size_t> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("FASTSKETCH_THREADS")) {
        try {
            const long long v = std::stoll(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            // fall through to hardware concurrency
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace fastsketch
