#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mmroute/error.hpp"
#include "mmroute/run_config.hpp"

namespace mmroute {

// Parsed command-line state shared by every subcommand. Unset optionals fall
// back to the config file, then to built-in defaults.
struct CliOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<bool> log_x;
  bool allow_oracle = false;

  std::optional<std::filesystem::path> outcomes;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> pool;
  std::optional<bool> normalize_costs;
  std::optional<std::string> fusion_override;

  std::optional<std::filesystem::path> router;  // transfer: saved router file
  std::string mask = "image";                   // transfer: text | image | none

  std::optional<std::filesystem::path> run_dir;  // report
};

// Config file plus command-line overrides.
RunConfig resolve_config(const CliOptions& options);

// Each returns a process exit code and reports errors on `err`.
int cmd_ingest(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_gen(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_transfer(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const CliOptions& options, std::ostream& out, std::ostream& err);

// Maps the error hierarchy onto exit codes (2 validation, 3 config, 4 runtime).
int exit_code_for(const std::exception& e);

}  // namespace mmroute
