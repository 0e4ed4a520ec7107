#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "dsage/inference.hpp"
#include "dsage/kb.hpp"

namespace dsage::cli {

// Stable process exit codes.
enum class ExitStatus : int { success = 0, invalid = 1, usage = 2, io = 3 };

constexpr int code(ExitStatus s) { return static_cast<int>(s); }

// Thrown by command bodies; main() prints the message to stderr and exits.
struct Failure {
  ExitStatus status;
  std::string message;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Reads and parses a .dkb file. Parse errors are printed to `diag` and
// reported as Failure{invalid}; unreadable files as Failure{io}.
KnowledgeBase load_kb_file(const std::filesystem::path& path, std::ostream& diag);

// "<object> <verb> <value> [cf]". Multi-word objects and values are joined
// with underscores ("soil moisture is high 0.5"). Omitted CF means 1.0 with
// source=default. Throws Failure{usage} when malformed.
Observation parse_observation_text(std::string_view text);

// "obj verb value" premise for the editor.
Condition parse_condition_text(std::string_view text);

void register_kb_commands(CLI::App& app);
void register_consult_command(CLI::App& app);
void register_serve_command(CLI::App& app);

}  // namespace dsage::cli
