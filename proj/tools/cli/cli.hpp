// Command-line front end. Commands: pressure, dimension, certify, gibbs, lyapunov,
// multifractal. Exit codes: 0 ok, 1 input error, 2 partial or uncertified result.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfc::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kInputError = 1, kPartial = 2 };

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Scientific notation with 15 significant digits.
std::string format_double(double x);

/// JSON text with floats rendered by format_double and two-space indentation.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace tfc::cli
