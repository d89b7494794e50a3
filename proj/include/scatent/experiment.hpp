#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scatent/scatter.hpp"
#include "scatent/smatrix.hpp"

namespace scatent {

enum class ScanAxis { mass_ratio, sigma_ratio, potential_strength, k };
enum class OutputFormat { csv, json };

const char* to_string(ScanAxis axis) noexcept;

struct StateConfig {
    double k = 5.0;
    double a = 10.0;
    double sigma1 = 0.5;
    double sigma2 = 0.5;
    double m1 = 1.0;
    double m2 = 1.0;
};

// Inclusive range start, start + step, ... up to stop.
struct ScanConfig {
    ScanAxis axis = ScanAxis::k;
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;
};

struct AmplitudeRange {
    std::optional<double> q_min;  // defaults to k / 100
    std::optional<double> q_max;  // defaults to 2 k
    std::size_t count = 1000;
};

struct ExperimentConfig {
    StateConfig state;
    PotentialModel potential = DeltaBarrier{5.0};
    std::size_t grid_n = 256;
    double window = 8.0;
    CoveragePolicy coverage = CoveragePolicy::error;
    std::optional<ScanConfig> scan;  // empty for a single point
    AmplitudeRange amplitudes;
    std::string output_path;  // empty for stdout
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 0;     // 0 picks the hardware concurrency
};

// Parses and validates a JSON config; throws ConfigError with a readable message.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Re-checks a config after programmatic edits (e.g. command-line overrides).
void validate(const ExperimentConfig& config);

// Scan values in ascending order, or an empty vector for a single point.
std::vector<double> scan_values(const ExperimentConfig& config);

// Config of one scan point with the scan removed.
ExperimentConfig at_scan_point(const ExperimentConfig& config, double value);

GaussianProductState in_state(const ExperimentConfig& config);
ScatterOptions scatter_options(const ExperimentConfig& config);

struct ResultRow {
    double scan_value = 0.0;
    double transmission = 0.0;
    double reflection = 0.0;
    double p_exact = 0.0;
    double p_const_amp = 0.0;
    double p_qubit = 0.0;
    double p_reflection = 0.0;
    double schulman_residual = 0.0;
    double ie_purity = 0.0;
    double p_tra = 0.0;
    double p_ref = 0.0;
    double mode_overlap = 0.0;
    std::optional<double> variation_t;  // empty when |t(k)| = 0
    std::optional<double> variation_r;
    std::size_t grid_n = 0;
};

// One row per scan point, ordered by scan value. Scan points run in parallel;
// the result does not depend on the thread count. A single-point config
// yields one row whose scan value is NaN.
std::vector<ResultRow> run(const ExperimentConfig& config);

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// Invariant suite at the configured point (the unscanned base config).
std::vector<CheckResult> check(const ExperimentConfig& config);

struct AmplitudeRow {
    double q = 0.0;
    cplx t;
    cplx r;
};

std::vector<AmplitudeRow> amplitude_table(const ExperimentConfig& config);

// Fixed-format writers: 12 significant digits, "nan"/null for undefined values.
std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format);
std::string format_checks(const std::vector<CheckResult>& checks, OutputFormat format);
std::string format_amplitudes(const std::vector<AmplitudeRow>& rows, OutputFormat format);

// Column names of the result table, schema version 1.
const std::vector<std::string>& result_columns();
inline constexpr int kResultSchemaVersion = 1;

}  // namespace scatent
