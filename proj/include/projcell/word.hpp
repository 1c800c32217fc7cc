#pragma once

// Words over a generator alphabet. Generators are single lowercase letters;
// the matching uppercase letter denotes the inverse.

#include "projcell/core.hpp"

#include <cctype>
#include <string>
#include <string_view>

namespace projcell::word {

inline char inverse_letter(char c) {
  return std::islower(static_cast<unsigned char>(c))
             ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
             : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

/// Free reduction: cancels adjacent letter/inverse pairs.
inline std::string reduce(std::string_view w) {
  std::string out;
  out.reserve(w.size());
  for (char c : w) {
    if (c == ' ') continue;
    if (!out.empty() && out.back() == inverse_letter(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

inline std::string inverse(std::string_view w) {
  std::string out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (*it == ' ') continue;
    out.push_back(inverse_letter(*it));
  }
  return out;
}

inline std::string concat(std::string_view a, std::string_view b) {
  std::string s(a);
  s += b;
  return reduce(s);
}

/// w^k for any integer k (negative powers use the inverse word).
inline std::string power(std::string_view w, long k) {
  std::string base = k < 0 ? inverse(w) : std::string(w);
  std::string out;
  for (long i = 0; i < std::labs(k); ++i) out += base;
  return reduce(out);
}

inline bool is_generator_letter(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

}  // namespace projcell::word
