#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qot::cli {

inline constexpr std::uint64_t kDefaultSeed = 12345;
inline constexpr int kUsageError = 2;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
/// Returns the process exit code: 0 on success (protocol aborts included),
/// 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

/// "1,2,5" or "1..100" or a mix ("1..10,20,50"); throws on malformed input.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// "150" ticks, or a multiple of the announce delay such as "2T" / "0.5T".
double parse_lifetime(const std::string& text, double announce_delay);

}  // namespace qot::cli
