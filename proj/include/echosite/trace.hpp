#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace echosite {

/// Uniformly sampled displacement waveform, in meters.
struct DisplacementTrace {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz
    double t0 = 0.0;           // time of samples[0], s
    bool low_signal = false;   // set by extraction when the beamformer output vanished

    std::size_t size() const noexcept { return samples.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
    /// Span covered by the samples: size / rate.
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
    double end_time() const { return t0 + duration(); }

    /// Linear interpolation; clamps outside [t0, last sample].
    double value_at(double t) const;
    /// Resampled onto `rate` starting at `start` with `count` samples.
    DisplacementTrace resampled(double rate, double start, std::size_t count) const;

    /// Throws InvalidInput for a non-positive rate or non-finite samples.
    void validate() const;
};

/// CSV with header `t,displacement_m`. Reading infers the rate from the mean
/// time step and rejects non-uniform sampling (relative jitter > 1e-3).
std::string trace_to_csv(const DisplacementTrace& trace);
DisplacementTrace trace_from_csv(const std::string& text);
DisplacementTrace load_trace(const std::filesystem::path& path);
void save_trace(const DisplacementTrace& trace, const std::filesystem::path& path);

} // namespace echosite
