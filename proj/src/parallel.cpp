#include "reslab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace reslab {

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RESONANCE_LAB_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
            // fall through to hardware default on malformed values
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace reslab
