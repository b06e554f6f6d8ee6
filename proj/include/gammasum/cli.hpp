#pragma once

#include "gammasum/distribution.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gammasum::cli {

enum class Command { pdf, cdf, quantile, outage_table, validate, moments };
enum class OutputFormat { json, csv };

/// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitValidation = 3;

/// Bad flags, malformed values, or out-of-range parameters. The message
/// names the offending flag.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// --help was requested; what() holds the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation points. For outage-table the points are thresholds, given in
/// dB when `in_db` is set (converted with 10^(dB/10) before evaluation).
struct Grid {
    std::vector<double> points;
    bool in_db = false;
};

struct RunSpec {
    Command command = Command::cdf;
    std::optional<GammaSumParams> params;         // always set after parse_args
    std::optional<NakagamiMrcConfig> nakagami;    // set in --m mode
    std::vector<double> snr_db;                   // as given in --snr-db, for the report
    Grid grid;
    OutputFormat format = OutputFormat::json;
    std::string output = "-";                     // "-" is standard output
    EvalPath method = EvalPath::automatic;
    double tol = 1e-12;
    int inversion_order = 20;

    // validate
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    double delta = 1e-6;
    std::size_t ks_grid = 2000;
    double sample_scale = 1.0;  // scales the betas used for sampling only (negative control)
};

/// `args` excludes the program name. Throws UsageError or HelpRequested.
RunSpec parse_args(const std::vector<std::string>& args);

/// Executes the command; the report goes to spec.output (or `out` for "-"),
/// diagnostics to `err`. Returns one of the kExit* statuses.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + run with exit-status mapping; what main() calls.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "a:b:n" -> n evenly spaced points from a to b inclusive.
std::vector<double> parse_sweep(const std::string& text, const std::string& flag);
/// "1,0.5;0.5,1" -> rows separated by ';', entries by ','.
SquareMatrix parse_inline_matrix(const std::string& text, const std::string& flag);
std::vector<double> parse_list(const std::string& text, const std::string& flag);

}  // namespace gammasum::cli
