#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "freequiver/representation.hpp"

namespace freequiver::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kRegularityError = 3 };

/// Version of the machine-format record layout.
inline constexpr int kReportVersion = 1;

/// "u=3,v=2" -> {u: 3, v: 2}. Throws Error on malformed input.
Dims parse_dims(std::string_view text);
/// Several profiles separated by ';'.
std::vector<Dims> parse_dim_profiles(std::string_view text);
/// "1,4,0,3" -> coefficients k0, k1, ... (real).
std::vector<Complex> parse_poly(std::string_view text);

/// Entry point of the freequiver tool. Reports go to `out` (or --out), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freequiver::cli
