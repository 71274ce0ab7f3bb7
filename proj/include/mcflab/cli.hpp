#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mcflab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. args excludes the program name. Exit codes: 0 ok,
/// 1 domain error (or a failed verify suite), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

/// Reads a `key = value` file into `--key=value` tokens. Blank lines and
/// lines starting with '#' are skipped. Throws ParseError on malformed lines
/// or repeated keys.
std::vector<std::string> read_config(const std::filesystem::path& path);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// The invariant suite behind `verify`. "fast" takes seconds; "full" adds the
/// entropy and flow checks.
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed, int threads,
                                   std::ostream& progress);

} // namespace mcflab::cli
