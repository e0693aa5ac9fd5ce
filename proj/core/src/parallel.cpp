#include "promptllr/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace promptllr {

unsigned default_thread_count() noexcept {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LLR_THREADS"); env != nullptr) {
    std::string_view text(env);
    unsigned cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) hw = std::min(hw, cap);
  }
  return hw;
}

}  // namespace promptllr
