#pragma once

#include "echosite/radar_config.hpp"
#include "echosite/trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace echosite {

/// Plane-wave phase signature of a uniform linear array:
///   a_m = exp(j m 2 pi d sin(theta)), m = 1..M, with d in wavelengths.
/// For d = 1/2 this is exp(j m pi sin(theta)). Requires |theta| < pi/2.
Eigen::VectorXcd steering_vector(double theta, unsigned elements, double spacing_wavelengths = 0.5);

// ---------------------------------------------------------------------------
// Pulse-wave displacement templates

enum class PulseTemplate { GaussianTrain, File };

struct PulseSpec {
    PulseTemplate kind = PulseTemplate::GaussianTrain;
    double heart_rate_bpm = 60.0;
    double amplitude = 100e-6;  // peak |d| after mean removal, m
    double ptt = 0.0;           // circular delay, s
    double duration = 30.0;     // s
    double sample_rate = 145.6; // Hz
    double pulse_width = 0.1;   // Gaussian sigma as a fraction of the beat period
    DisplacementTrace file_template;  // used when kind == File
};

struct PulseWaveform {
    DisplacementTrace trace;
    bool resampled = false;  // file template had a different rate
};

/// Zero-mean periodic pulse waveform scaled so that max |d| = amplitude,
/// delayed circularly by `ptt`.
PulseWaveform pulse_waveform(const PulseSpec& spec);

// ---------------------------------------------------------------------------
// Scene and radar cube

struct SceneTarget {
    double range = 1.0;       // m
    double theta = 0.0;       // rad, broadside = 0
    Complex reflectivity{1.0, 0.0};
    DisplacementTrace displacement;
};

struct RangeAxis {
    double start = 0.0;    // center of bin 0, m
    double spacing = 0.0;  // m
    std::size_t bins = 0;

    double center(std::size_t bin) const { return start + spacing * static_cast<double>(bin); }
    /// Bin whose center is closest to `range` (clamped).
    std::size_t nearest(double range) const;
};

/// Complex slow-time samples x_m(bin, t), stored element-major, then range,
/// then time.
class RadarCube {
public:
    RadarCube() = default;
    RadarCube(const RadarConfig& cfg, const RangeAxis& axis, std::size_t times, double t0 = 0.0);

    std::size_t elements() const noexcept { return elements_; }
    std::size_t bins() const noexcept { return axis_.bins; }
    std::size_t times() const noexcept { return times_; }
    const RangeAxis& range_axis() const noexcept { return axis_; }
    const RadarConfig& config() const noexcept { return cfg_; }
    double slow_time_rate() const noexcept { return cfg_.slow_time_rate; }
    double t0() const noexcept { return t0_; }
    double time(std::size_t t) const { return t0_ + static_cast<double>(t) / cfg_.slow_time_rate; }

    Complex& at(std::size_t m, std::size_t bin, std::size_t t) { return data_[index(m, bin, t)]; }
    const Complex& at(std::size_t m, std::size_t bin, std::size_t t) const { return data_[index(m, bin, t)]; }
    /// Array vector x(bin, t).
    Eigen::VectorXcd snapshot(std::size_t bin, std::size_t t) const;

    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> data() const noexcept { return data_; }

    std::optional<std::uint64_t> seed;
    std::optional<double> snr_db;

    /// Throws InvalidInput if sizes disagree or any sample is non-finite.
    void validate() const;

private:
    std::size_t index(std::size_t m, std::size_t bin, std::size_t t) const {
        return (m * axis_.bins + bin) * times_ + t;
    }

    RadarConfig cfg_;
    RangeAxis axis_;
    std::size_t elements_ = 0;
    std::size_t times_ = 0;
    double t0_ = 0.0;
    std::vector<Complex> data_;
};

/// Range point-spread after range compression: sinc with its first null at
/// one resolution cell, Hann-tapered to +-3 cells.
double range_psf(double offset, double resolution);

inline constexpr double kPsfHalfWidthCells = 3.0;

enum class NoiseReference {
    StrongestTarget,  // SNR relative to max |reflectivity| of the scene
    Absolute,         // SNR relative to SimOptions::reference_amplitude
};

struct SimOptions {
    RangeAxis axis;                 // bins == 0 picks spacing = resolution, start 0, covering all targets
    std::optional<double> snr_db;   // per element, per slow-time sample
    std::uint64_t seed = 0;
    NoiseReference noise_reference = NoiseReference::StrongestTarget;
    double reference_amplitude = 1.0;
};

/// x_m(bin, t) = sum_n a_n g(r_bin - r_n) exp(-j 2k r_n) a_m(theta_n) exp(j 2k d_n(t)) + noise.
/// Noise is circular complex white Gaussian, drawn from a stream keyed by
/// (seed, t) so results do not depend on the thread count.
RadarCube simulate_cube(std::span<const SceneTarget> targets, const RadarConfig& cfg, const SimOptions& options = {});

/// Raw cube file: complex64 little-endian samples in storage order, plus a
/// JSON sidecar at `<path>.json` with the configuration, axes and seed.
void save_cube(const RadarCube& cube, const std::filesystem::path& path);
RadarCube load_cube(const std::filesystem::path& path);

} // namespace echosite
