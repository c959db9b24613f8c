#include "rlhmmddm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rlhmmddm {

int default_threads() {
    if (const char* env = std::getenv("RLHMMDDM_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

}  // namespace rlhmmddm
