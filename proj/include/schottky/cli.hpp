#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "schottky/constants.hpp"
#include "schottky/words.hpp"

namespace schottky::cli {

enum class Command {
  Validate,
  Classes,
  Fn,
  Eta,
  TorusDet,
  TorusCheck,
  Eisenstein,
  Kronecker,
  Kernels,
  Cocycle,
  Periods,
  Sweep,
};

enum class Format { Json, Csv };

std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view name);

struct RunConfig {
  Command command = Command::Validate;
  std::optional<std::filesystem::path> group_path;
  int n = 2;
  int maxlen = 8;
  double tol = 1e-10;
  std::optional<Complex> tau;
  std::optional<double> s;
  std::optional<Complex> z;
  std::optional<Word> word;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<std::filesystem::path> output;
  Format format = Format::Json;
  bool errors_json = false;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs one command, writing the primary output to `out` and errors to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Same, with the output going to config.output (or stdout) and errors to stderr.
int run(const RunConfig& config);

/// Parses argv and runs. --help prints usage and returns 0.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "1,-2,1" -> {1, -2, 1}; throws InvalidInput on anything else.
Word parse_word(std::string_view text);

}  // namespace schottky::cli
