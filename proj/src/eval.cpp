#include "echosite/eval.hpp"

#include "echosite/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace echosite {

namespace {

constexpr double kTimeTolerance = 1e-9;

double last_sample_time(const DisplacementTrace& t) { return t.time(t.size() - 1); }

void remove_mean(std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

std::vector<double> sample_on_grid(const DisplacementTrace& t, double start, double rate, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = t.value_at(start + static_cast<double>(i) / rate);
    return out;
}

void check_trace(const DisplacementTrace& t, const char* label) {
    t.validate();
    if (t.size() < 2) throw InvalidInput(std::string(label) + " trace needs at least two samples");
}

} // namespace

WindowedPair window_pair(const DisplacementTrace& est, const DisplacementTrace& ref, const EvalWindow& window) {
    check_trace(est, "estimated");
    check_trace(ref, "reference");
    if (!(window.length > 0.0)) throw InvalidInput("evaluation window must be positive");

    WindowedPair out;
    out.rate = std::min(est.sample_rate, ref.sample_rate);
    out.resampled = std::abs(est.sample_rate - ref.sample_rate) > 1e-9 * out.rate;
    out.start = window.start.value_or(std::max(est.t0, ref.t0));
    const auto count = static_cast<std::size_t>(std::floor(window.length * out.rate + 1e-9));
    if (count < 2) throw InvalidInput("evaluation window holds fewer than two samples");
    const double stop = out.start + static_cast<double>(count - 1) / out.rate;
    for (const DisplacementTrace* t : {&est, &ref}) {
        if (out.start < t->t0 - kTimeTolerance || stop > last_sample_time(*t) + kTimeTolerance) {
            throw InvalidInput("evaluation window is not covered by both traces");
        }
    }
    out.est = sample_on_grid(est, out.start, out.rate, count);
    out.ref = sample_on_grid(ref, out.start, out.rate, count);
    remove_mean(out.est);
    remove_mean(out.ref);
    return out;
}

double correlation(std::span<const double> est, std::span<const double> ref) {
    if (est.size() != ref.size() || est.empty()) throw InvalidInput("correlation needs equal, non-empty sequences");
    double ee = 0.0, rr = 0.0, er = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        ee += est[i] * est[i];
        rr += ref[i] * ref[i];
        er += est[i] * ref[i];
    }
    if (ee == 0.0 || rr == 0.0) throw UndefinedMetricError("correlation is undefined for a zero-energy trace");
    return std::clamp(er / std::sqrt(ee * rr), -1.0, 1.0);
}

double correlation(const DisplacementTrace& est, const DisplacementTrace& ref, const EvalWindow& window) {
    const WindowedPair p = window_pair(est, ref, window);
    return correlation(p.est, p.ref);
}

ScaleFit rms_error(std::span<const double> est, std::span<const double> ref) {
    if (est.size() != ref.size() || est.empty()) throw InvalidInput("rms error needs equal, non-empty sequences");
    double rr = 0.0, er = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        rr += ref[i] * ref[i];
        er += est[i] * ref[i];
    }
    if (rr == 0.0) throw UndefinedMetricError("scale fit is undefined for a zero-energy reference");
    ScaleFit fit;
    fit.alpha = er / rr;
    double sq = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double r = est[i] - fit.alpha * ref[i];
        sq += r * r;
    }
    fit.epsilon = std::sqrt(sq / static_cast<double>(est.size()));
    return fit;
}

ScaleFit rms_error(const DisplacementTrace& est, const DisplacementTrace& ref, const EvalWindow& window) {
    const WindowedPair p = window_pair(est, ref, window);
    return rms_error(p.est, p.ref);
}

Alignment align(const DisplacementTrace& est, const DisplacementTrace& ref, double max_lag) {
    check_trace(est, "estimated");
    check_trace(ref, "reference");
    if (!(max_lag >= 0.0)) throw InvalidInput("max lag must be non-negative");
    if (max_lag >= std::min(est.duration(), ref.duration()) / 4.0) {
        throw InvalidInput("max lag must be shorter than a quarter of the trace duration");
    }
    const double rate = std::min(est.sample_rate, ref.sample_rate);
    const double start = std::max(est.t0, ref.t0);
    const double stop = std::min(last_sample_time(est), last_sample_time(ref));
    if (stop <= start) throw InvalidInput("traces do not overlap");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) * rate + 1e-9)) + 1;
    const auto max_k = static_cast<std::size_t>(std::floor(max_lag * rate + 1e-9));
    if (n <= 2 * max_k + 2) throw InvalidInput("overlap too short for the requested lag range");

    const std::vector<double> e = sample_on_grid(est, start, rate, n);
    const std::vector<double> f = sample_on_grid(ref, start, rate, n);
    const std::size_t len = n - 2 * max_k;
    std::vector<double> fw(f.begin() + static_cast<std::ptrdiff_t>(max_k),
                           f.begin() + static_cast<std::ptrdiff_t>(max_k + len));
    remove_mean(fw);

    auto score = [&](long k) {
        const auto first = static_cast<std::ptrdiff_t>(static_cast<long>(max_k) - k);
        std::vector<double> ew(e.begin() + first, e.begin() + first + static_cast<std::ptrdiff_t>(len));
        remove_mean(ew);
        return correlation(ew, fw);
    };

    Alignment out;
    out.rho = score(0);
    for (std::size_t j = 1; j <= max_k; ++j) {
        for (long k : {static_cast<long>(j), -static_cast<long>(j)}) {
            const double rho = score(k);
            if (rho > out.rho) {
                out.rho = rho;
                out.lag_samples = k;
            }
        }
    }
    out.lag = static_cast<double>(out.lag_samples) / rate;
    out.shifted = est;
    out.shifted.t0 = est.t0 + out.lag;
    return out;
}

CaseScore score_case(const EvalCase& c, const ReportOptions& options, std::vector<std::string>* warnings) {
    CaseScore s{c.method, c.trial, c.site};
    const DisplacementTrace* est = &c.est;
    Alignment aligned;
    if (options.max_lag > 0.0) {
        aligned = align(c.est, c.ref, options.max_lag);
        s.lag = aligned.lag;
        est = &aligned.shifted;
    }
    const WindowedPair p = window_pair(*est, c.ref, options.window);
    if (p.resampled && warnings) {
        warnings->push_back("case " + c.method + "/" + c.trial + "/" + c.site + ": sample rates differ, resampled to " +
                            std::to_string(p.rate) + " Hz");
    }
    s.rho = correlation(p.est, p.ref);
    const ScaleFit fit = rms_error(p.est, p.ref);
    s.epsilon = fit.epsilon;
    s.alpha = fit.alpha;
    return s;
}

EvalReport make_report(std::span<const EvalCase> cases, const ReportOptions& options) {
    if (cases.empty()) throw InvalidInput("report needs at least one case");
    std::vector<std::string> warnings;
    std::vector<CaseScore> scores;
    scores.reserve(cases.size());
    for (const EvalCase& c : cases) scores.push_back(score_case(c, options, &warnings));
    EvalReport report = aggregate(std::move(scores), options.window.length);
    report.warnings = std::move(warnings);
    return report;
}

EvalReport aggregate(std::vector<CaseScore> scores, double window) {
    if (scores.empty()) throw InvalidInput("report needs at least one case");
    EvalReport report;
    report.window = window;
    auto index_of = [](std::vector<std::string>& list, const std::string& key) {
        const auto it = std::find(list.begin(), list.end(), key);
        if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
        list.push_back(key);
        return list.size() - 1;
    };

    std::vector<std::string> methods;
    std::vector<std::string> row_keys;
    for (const CaseScore& s : scores) {
        index_of(report.sites, s.site);
        index_of(methods, s.method);
        index_of(row_keys, s.method + '\x1f' + s.trial);
    }
    const std::size_t n_sites = report.sites.size();
    report.rows.resize(row_keys.size());
    for (const CaseScore& s : scores) {
        ReportRow& row = report.rows[index_of(row_keys, s.method + '\x1f' + s.trial)];
        if (row.rho.empty()) {
            row.method = s.method;
            row.trial = s.trial;
            row.rho.resize(n_sites);
            row.epsilon.resize(n_sites);
        }
        const std::size_t col = index_of(report.sites, s.site);
        if (row.rho[col]) throw InvalidInput("duplicate case " + s.method + "/" + s.trial + "/" + s.site);
        row.rho[col] = s.rho;
        row.epsilon[col] = s.epsilon;
    }
    for (const std::string& m : methods) {
        MethodSummary summary{m};
        for (const CaseScore& s : scores) {
            if (s.method != m) continue;
            ++summary.cases;
            summary.mean_rho += s.rho;
            summary.mean_epsilon += s.epsilon;
        }
        summary.mean_rho /= static_cast<double>(summary.cases);
        summary.mean_epsilon /= static_cast<double>(summary.cases);
        report.methods.push_back(summary);
    }
    report.cases = std::move(scores);
    return report;
}

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string cell(const std::optional<double>& v, double scale, int digits) {
    return v ? fixed(*v * scale, digits) : std::string();
}

struct RowMeans {
    double rho;
    double epsilon;
};

RowMeans row_means(const ReportRow& row) {
    double r = 0.0, e = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < row.rho.size(); ++i) {
        if (!row.rho[i]) continue;
        r += *row.rho[i];
        e += *row.epsilon[i];
        ++n;
    }
    return {r / static_cast<double>(n), e / static_cast<double>(n)};
}

std::vector<std::vector<std::string>> table_cells(const EvalReport& report, int rho_digits, int um_digits) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> header{"method", "trial"};
    for (const auto& s : report.sites) header.push_back("rho_" + s);
    for (const auto& s : report.sites) header.push_back("eps_" + s + "_um");
    header.push_back("rho_mean");
    header.push_back("eps_mean_um");
    out.push_back(header);
    for (const ReportRow& row : report.rows) {
        std::vector<std::string> line{row.method, row.trial};
        for (const auto& v : row.rho) line.push_back(cell(v, 1.0, rho_digits));
        for (const auto& v : row.epsilon) line.push_back(cell(v, 1e6, um_digits));
        const RowMeans m = row_means(row);
        line.push_back(fixed(m.rho, rho_digits));
        line.push_back(fixed(m.epsilon * 1e6, um_digits));
        out.push_back(line);
    }
    for (const MethodSummary& m : report.methods) {
        std::vector<std::string> line{m.method, "mean"};
        for (std::size_t pass = 0; pass < 2; ++pass) {
            for (const std::string& site : report.sites) {
                double sum = 0.0;
                std::size_t n = 0;
                for (const CaseScore& c : report.cases) {
                    if (c.method != m.method || c.site != site) continue;
                    sum += pass == 0 ? c.rho : c.epsilon;
                    ++n;
                }
                line.push_back(n == 0 ? std::string() : pass == 0 ? fixed(sum / static_cast<double>(n), rho_digits)
                                                                   : fixed(sum / static_cast<double>(n) * 1e6, um_digits));
            }
        }
        line.push_back(fixed(m.mean_rho, rho_digits));
        line.push_back(fixed(m.mean_epsilon * 1e6, um_digits));
        out.push_back(line);
    }
    return out;
}

} // namespace

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    for (const auto& line : table_cells(report, 6, 4)) {
        for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << line[i];
        out << '\n';
    }
    return out.str();
}

std::string report_to_text(const EvalReport& report) {
    const auto cells = table_cells(report, 2, 1);
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) out << "  ";
            const std::size_t pad = width[i] - line[i].size();
            if (i < 2) out << line[i] << std::string(pad, ' ');
            else out << std::string(pad, ' ') << line[i];
        }
        out << '\n';
    }
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    return out.str();
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["window_s"] = report.window;
    j["sites"] = report.sites;
    j["cases"] = nlohmann::json::array();
    for (const CaseScore& c : report.cases) {
        j["cases"].push_back({{"method", c.method},
                              {"trial", c.trial},
                              {"site", c.site},
                              {"rho", c.rho},
                              {"epsilon_m", c.epsilon},
                              {"alpha", c.alpha},
                              {"lag_s", c.lag}});
    }
    j["methods"] = nlohmann::json::array();
    for (const MethodSummary& m : report.methods) {
        j["methods"].push_back(
            {{"method", m.method}, {"cases", m.cases}, {"mean_rho", m.mean_rho}, {"mean_epsilon_m", m.mean_epsilon}});
    }
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

} // namespace echosite
