#pragma once

#include "echosite/trace.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace echosite {

/// Scoring window. Without an explicit start the window opens where both
/// traces overlap (0 for traces that start at t = 0).
struct EvalWindow {
    std::optional<double> start;
    double length = 5.0;  // s
};

/// Both traces sampled on one grid at the lower of their rates, mean removed
/// over the window.
struct WindowedPair {
    std::vector<double> est;
    std::vector<double> ref;
    double rate = 0.0;
    double start = 0.0;
    bool resampled = false;  // the traces had different rates
};

/// Throws InvalidInput if either trace does not cover the window.
WindowedPair window_pair(const DisplacementTrace& est, const DisplacementTrace& ref, const EvalWindow& window = {});

/// Normalized correlation of two zero-mean sequences. Throws
/// UndefinedMetricError if either has zero energy.
double correlation(std::span<const double> est, std::span<const double> ref);
double correlation(const DisplacementTrace& est, const DisplacementTrace& ref, const EvalWindow& window = {});

struct ScaleFit {
    double epsilon = 0.0;  // m
    double alpha = 0.0;
};

/// alpha = <est, ref> / <ref, ref>, epsilon = RMS(est - alpha ref).
ScaleFit rms_error(std::span<const double> est, std::span<const double> ref);
ScaleFit rms_error(const DisplacementTrace& est, const DisplacementTrace& ref, const EvalWindow& window = {});

struct Alignment {
    double lag = 0.0;               // s; est is delayed by this much to match ref
    long lag_samples = 0;           // at the common sample period
    double rho = 0.0;               // correlation at the chosen lag
    DisplacementTrace shifted;      // est with t0 advanced by lag
};

/// Integer-sample lag search in [-max_lag, max_lag] at the common sample
/// period. All lags are scored on the same interior window. Ties go to the
/// smaller |lag|, then to the positive lag. Requires max_lag < duration / 4.
Alignment align(const DisplacementTrace& est, const DisplacementTrace& ref, double max_lag);

// ---------------------------------------------------------------------------
// Reports

struct EvalCase {
    DisplacementTrace est;
    DisplacementTrace ref;
    std::string site;
    std::string method;
    std::string trial;  // cases sharing method and trial form one table row
};

struct CaseScore {
    std::string method;
    std::string trial;
    std::string site;
    double rho = 0.0;
    double epsilon = 0.0;  // m
    double alpha = 0.0;
    double lag = 0.0;      // s
};

struct ReportRow {
    std::string method;
    std::string trial;
    std::vector<std::optional<double>> rho;      // per site column
    std::vector<std::optional<double>> epsilon;  // m
};

struct MethodSummary {
    std::string method;
    std::size_t cases = 0;
    double mean_rho = 0.0;
    double mean_epsilon = 0.0;  // m
};

struct EvalReport {
    std::vector<std::string> sites;  // column order, by first appearance
    std::vector<CaseScore> cases;
    std::vector<ReportRow> rows;
    std::vector<MethodSummary> methods;
    std::vector<std::string> warnings;
    double window = 5.0;  // s
};

struct ReportOptions {
    EvalWindow window;
    double max_lag = 0.0;  // s; 0 disables alignment
};

CaseScore score_case(const EvalCase& c, const ReportOptions& options, std::vector<std::string>* warnings = nullptr);

/// Scores every case and aggregates. Throws InvalidInput for no cases.
EvalReport make_report(std::span<const EvalCase> cases, const ReportOptions& options = {});

/// Builds rows and per-method means from precomputed scores.
EvalReport aggregate(std::vector<CaseScore> scores, double window = 5.0);

/// `method,trial,rho_<site>...,eps_<site>_um...` rows followed by one
/// `mean` row per method.
std::string report_to_csv(const EvalReport& report);
/// Fixed-width table with the same columns.
std::string report_to_text(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

} // namespace echosite
