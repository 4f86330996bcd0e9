// Copyright 2026 the pvbell authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "text_io.hpp"

#include <cfenv>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "errors.hpp"

namespace pvbell {

namespace {

double parse_double(std::string_view text, std::string_view token) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(Errc::parse_error,
         "malformed number '" + std::string(text) + "' in complex token '" +
             std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::complex<double> parse_complex(std::string_view token) {
  if (token.empty()) fail(Errc::parse_error, "empty complex token");
  std::string_view body = token;
  bool imaginary_tail = false;
  if (body.back() == 'j' || body.back() == 'J') {
    imaginary_tail = true;
    body.remove_suffix(1);
    if (body.empty())
      fail(Errc::parse_error, "malformed complex token '" + std::string(token) + "'");
  }
  // Find the sign separating the two parts; skip index 0 and exponent signs.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = 1; i < body.size(); ++i) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;  // keep the last such sign: exponents precede it
    }
  }
  if (split == std::string_view::npos) {
    const double v = parse_double(body, token);
    return imaginary_tail ? std::complex<double>(0.0, v)
                          : std::complex<double>(v, 0.0);
  }
  if (!imaginary_tail) {
    fail(Errc::parse_error, "complex token '" + std::string(token) +
                                "' has two parts but no trailing 'j'");
  }
  const double re = parse_double(body.substr(0, split), token);
  const double im = parse_double(body.substr(split), token);
  return {re, im};
}

std::string format_complex(std::complex<double> z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

std::string format_percent3(double p) {
  // nearbyint() honours the default FE_TONEAREST mode, which rounds ties to
  // even — the convention of the reference tables.
  const double scaled = std::nearbyint(p * 100.0 * 1000.0);
  const long long units = static_cast<long long>(scaled);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%lld.%03lld", units / 1000,
                std::llabs(units % 1000));
  return buf;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace pvbell
