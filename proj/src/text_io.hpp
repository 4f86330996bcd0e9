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

#pragma once

#include <complex>
#include <string>
#include <string_view>

namespace pvbell {

// Parses one complex token written as `re+imj` (e.g. "0.5-0.5j", "1+0j",
// "-2.5e-3+1e-4j").  A bare real ("0.5") or a bare imaginary ("-0.5j") is
// also accepted.  Throws Error(parse_error) on malformed input.
std::complex<double> parse_complex(std::string_view token);

// Formats a complex number in the `re+imj` form accepted by parse_complex,
// with enough digits to round-trip.
std::string format_complex(std::complex<double> z);

// Formats a probability (in [0,1]) as a percentage with exactly three
// decimals, rounding half to even: 0.54893 -> "54.893", 1.0 -> "100.000".
std::string format_percent3(double p);

// Fixed-precision decimal formatting used for byte-reproducible CSV output.
std::string format_fixed(double v, int decimals);

}  // namespace pvbell
