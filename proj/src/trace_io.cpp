#include "echosite/trace.hpp"

#include "echosite/errors.hpp"
#include "echosite/map_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace echosite {

double DisplacementTrace::value_at(double t) const {
    if (samples.empty()) throw InvalidInput("empty trace");
    const double pos = (t - t0) * sample_rate;
    if (pos <= 0.0) return samples.front();
    const double last = static_cast<double>(samples.size() - 1);
    if (pos >= last) return samples.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return samples[i] + frac * (samples[i + 1] - samples[i]);
}

DisplacementTrace DisplacementTrace::resampled(double rate, double start, std::size_t count) const {
    DisplacementTrace out;
    out.sample_rate = rate;
    out.t0 = start;
    out.low_signal = low_signal;
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) out.samples[i] = value_at(start + static_cast<double>(i) / rate);
    return out;
}

void DisplacementTrace::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw InvalidInput("trace sample rate must be positive");
    if (!std::isfinite(t0)) throw InvalidInput("trace start time must be finite");
    for (double v : samples) {
        if (!std::isfinite(v)) throw InvalidInput("trace has a non-finite sample");
    }
}

std::string trace_to_csv(const DisplacementTrace& trace) {
    std::ostringstream out;
    out << "t,displacement_m\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) out << trace.time(i) << ',' << trace.samples[i] << '\n';
    return out.str();
}

DisplacementTrace trace_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> times, values;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("expected 't,value'", line_no);
        double t = 0.0, v = 0.0;
        const auto rt = std::from_chars(line.data(), line.data() + comma, t);
        const auto rv = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
        if (rt.ec != std::errc{} || rv.ec != std::errc{}) {
            if (times.empty()) continue;  // header row
            throw FormatError("cannot parse trace row", line_no);
        }
        times.push_back(t);
        values.push_back(v);
    }
    if (times.size() < 2) throw InvalidInput("trace needs at least two samples");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) throw InvalidInput("trace times must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-3 * dt) {
            throw FormatError("trace is not uniformly sampled", i + 1);
        }
    }
    DisplacementTrace trace;
    trace.samples = std::move(values);
    trace.sample_rate = 1.0 / dt;
    trace.t0 = times.front();
    return trace;
}

DisplacementTrace load_trace(const std::filesystem::path& path) {
    return trace_from_csv(read_text_file(path));
}

void save_trace(const DisplacementTrace& trace, const std::filesystem::path& path) {
    write_text_file(path, trace_to_csv(trace));
}

} // namespace echosite
