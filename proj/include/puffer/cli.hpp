#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>
#include <puffer/linalg.hpp>
#include <puffer/penalties.hpp>

namespace puffer::cli {

struct Dataset
{
    Matrix x;
    Vector y;
    std::vector<std::string> column_names;  // columns of x, header order
    std::string response_name;
};

/*
 * Reads a headed, all-numeric CSV. `response` is a header name or, failing
 * that, a 0-based column index. Every other column goes to X in header order;
 * no intercept is added.
 */
Dataset load_dataset(const std::string& path, const std::string& response);

// Writes response first, then the columns of x, 17 significant digits.
void save_dataset(const Dataset& d, const std::string& path);

enum class Command { fit, path, precondition, verify, inspect };
enum class Transform { none, puffer, puffer_scaled, puffer_tau };
enum class OutputFormat { json, csv };

struct RunConfig
{
    Command command = Command::fit;
    std::string input_path;
    std::string response_column;
    PenaltySpec penalty = PenaltySpec::lasso();
    std::optional<double> lambda;
    std::vector<double> lambda_grid;
    std::optional<double> tau;
    std::optional<double> sigma;
    Transform transform = Transform::none;
    std::uint64_t seed = 20140101;
    int trials = 200;
    std::string output_path;  // empty: stdout
    OutputFormat output_format = OutputFormat::json;

    // Throws InputError on inconsistent combinations.
    void validate() const;
};

enum ExitCode : int {
    exit_ok = 0,
    exit_verification_failed = 1,
    exit_input_error = 2,
    exit_numerical_error = 3,
};

// Parses argv into a RunConfig. Throws InputError on bad usage; returns
// nullopt when help was printed.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

// Executes the command. Errors become a single-line JSON record on `err`
// and a nonzero exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// parse_args + run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace puffer::cli
