#include "surpmark/parallel.hpp"

#include <cstdlib>
#include <string>

namespace surpmark {

std::size_t thread_count(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  if (const char* env = std::getenv("SURPMARK_THREADS"); env != nullptr && *env != '\0') {
    try {
      const auto cap = static_cast<std::size_t>(std::stoul(env));
      if (cap > 0 && cap < n) n = cap;
    } catch (const std::exception&) {
      // unparsable cap is ignored
    }
  }
  return n;
}

}  // namespace surpmark
