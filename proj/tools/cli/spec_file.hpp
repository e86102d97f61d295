// Cocycle spec files (JSON).
//
//   {
//     "d": 2,
//     "alphabet": 2,
//     "adjacency": [[1, 1], [1, 1]],
//     "matrices": [[2, 0, 0, 1], [[1, 0], [0, 3]]],   // row-major flat or nested rows
//     "theta": 0.5,
//     "holder_alpha": 1.0,
//     "description": "optional free text"
//   }
//
// Block cocycles replace "matrices" with "block_radius": k and
// "blocks": {"121": matrix, ...} keyed by 1-based (2k+1)-blocks; they are recoded to a
// one-step cocycle whose symbols are the admissible blocks in lexicographic order.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tfc/cocycle.hpp"

namespace tfc::cli {

/// Load failure with a location prefix ("file:line:col" or "file: /json/pointer").
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedSpec {
  Cocycle cocycle;
  std::optional<BlockCocycle> block;
  std::string sha256;
};

LoadedSpec parse_spec_text(const std::string& text, const std::string& source);
LoadedSpec load_spec_file(const std::string& path);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Reads a whole file; throws SpecError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace tfc::cli
