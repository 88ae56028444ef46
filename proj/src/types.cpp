#include "types.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cubicstrata {

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string format_complex(Complex v, int precision) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.*g%+.*gi", precision, v.real(), precision, v.imag());
  return buf;
}

namespace {

// Parses a full double at s, requiring the number to end exactly at *end.
bool parse_double_exact(const char* s, const char* end, double* out) {
  if (s == end) return false;
  char* stop = nullptr;
  errno = 0;
  double v = std::strtod(s, &stop);
  if (stop != end || errno == ERANGE) return false;
  *out = v;
  return true;
}

}  // namespace

std::optional<Complex> parse_complex(const std::string& text) {
  const char* s = text.c_str();
  size_t n = text.size();
  if (n < 2 || s[n - 1] != 'i') return std::nullopt;
  // The separator is a '+' or '-' that is not the leading sign and not part
  // of an exponent.
  size_t sep = std::string::npos;
  for (size_t k = 1; k + 1 < n; ++k) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') sep = k;
  }
  if (sep == std::string::npos) return std::nullopt;
  double re = 0.0, im = 0.0;
  if (!parse_double_exact(s, s + sep, &re)) return std::nullopt;
  // The imaginary part keeps its sign character; "+i"/"-i" alone are not
  // accepted, the digits are mandatory.
  if (!parse_double_exact(s + sep, s + n - 1, &im)) return std::nullopt;
  return Complex(re, im);
}

}  // namespace cubicstrata
