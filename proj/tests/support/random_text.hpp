#pragma once

#include <random>
#include <string>

namespace idp::test {

// Fragments that exercise every lexical class, glued together at random.
inline std::string random_source(std::mt19937& rng, int pieces) {
  static const char* kFragments[] = {
      "vocabulary", "theory", "structure", "procedure", "type", " ", "\n", "\t", "{", "}", "(", ")",
      "[", "]", ":", ".", ",", ";", "!", "?", "&", "|", "~", "=>", "<=>", "=", "<", ">", ":=", "+",
      "-", "*", "/", "%", "x", "fly", "Animal", "p", "q", "42", "\"str\"", "\"unterminated", "// c\n",
      "/* block */", "/* open", "#", "@", "\xff", "\xc3", "\xc3\xa9", "∀", "⇒", "¬", "true", "false",
      "ct", "cf", "if", "while", "else", "\\", "'", "\r\n",
  };
  constexpr int kCount = sizeof(kFragments) / sizeof(kFragments[0]);
  std::uniform_int_distribution<int> pick(0, kCount - 1);
  std::string out;
  for (int i = 0; i < pieces; ++i) out += kFragments[pick(rng)];
  return out;
}

inline std::string random_bytes(std::mt19937& rng, int length) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::string out;
  for (int i = 0; i < length; ++i) out += static_cast<char>(byte(rng));
  return out;
}

}  // namespace idp::test
