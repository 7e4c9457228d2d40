#include "idp/util/random.hpp"

#include <sys/random.h>

#include <cerrno>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace idp::util {

void secure_random(std::span<std::byte> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const auto n = getrandom(out.data() + done, out.size() - done, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "getrandom");
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string random_token(std::size_t length, std::string_view alphabet) {
  if (alphabet.empty() || alphabet.size() > 256) throw std::invalid_argument("bad alphabet");
  // Largest multiple of the alphabet size that fits in a byte; bytes above it
  // are rejected so every symbol is equally likely.
  const unsigned limit = 256 - 256 % static_cast<unsigned>(alphabet.size());
  std::string out;
  std::vector<std::byte> buffer(length * 2 + 8);
  while (out.size() < length) {
    secure_random(buffer);
    for (auto b : buffer) {
      const auto v = static_cast<unsigned>(b);
      if (v >= limit) continue;
      out += alphabet[v % alphabet.size()];
      if (out.size() == length) break;
    }
  }
  return out;
}

}  // namespace idp::util
