#pragma once

#include "ko/matrixops.hpp"
#include "ko/nonlinearity.hpp"
#include "ko/radial_ode.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ko::cli {

enum class Command { Classify, Shoot, Operator, Dichotomy, Verify, Sweep };
enum class Format { Csv, Json };
enum class OpKind { PPlus, MPlus, MMinus };

const char* to_string(Command c) noexcept;

/// Raised by parse_args; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::Classify;
    std::string spec_path;
    std::optional<NonlinearitySpec> spec;
    ShootConfig shoot;
    std::string output_path;
    std::string plot_path;
    Format format = Format::Json;
    std::uint64_t seed = 20240901;
    std::size_t points = 1000;
    double tolerance = 1e-6;
    /// exists | notexists | holds | fails | global | blowup | pass
    std::string expect;

    OpKind op = OpKind::PPlus;
    std::size_t k = 1;
    std::size_t n = 3;
    double lambda = 1.0;
    double Lambda = 1.0;
    std::string matrix_path;
    std::optional<SymMatrix> matrix;

    std::vector<double> c_list;
    double a_from = 0.0;
    double a_to = 0.0;
    std::size_t a_steps = 1;
};

/// argv[0] is the program name. Loads and validates referenced files.
RunConfig parse_args(const std::vector<std::string>& argv);

/// Exit codes: 0 success, 1 verdict differs from --expect, 2 usage error,
/// 3 numerical failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run with diagnostics on `err`.
int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace ko::cli
