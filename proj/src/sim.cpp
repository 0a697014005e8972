#include "echosite/sim.hpp"

#include "echosite/errors.hpp"
#include "echosite/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace echosite {

std::size_t RangeAxis::nearest(double range) const {
    if (bins == 0) throw InvalidInput("empty range axis");
    const double pos = std::round((range - start) / spacing);
    if (pos <= 0.0) return 0;
    return std::min(bins - 1, static_cast<std::size_t>(pos));
}

RadarCube::RadarCube(const RadarConfig& cfg, const RangeAxis& axis, std::size_t times, double t0)
    : cfg_(cfg), axis_(axis), elements_(cfg.virtual_elements()), times_(times), t0_(t0),
      data_(elements_ * axis.bins * times, Complex{}) {
    cfg_.validate();
}

Eigen::VectorXcd RadarCube::snapshot(std::size_t bin, std::size_t t) const {
    if (bin >= bins() || t >= times_) throw std::out_of_range("cube snapshot index out of range");
    Eigen::VectorXcd x(elements_);
    for (std::size_t m = 0; m < elements_; ++m) x[static_cast<Eigen::Index>(m)] = at(m, bin, t);
    return x;
}

void RadarCube::validate() const {
    if (elements_ != cfg_.virtual_elements()) throw InvalidInput("cube element count disagrees with its config");
    if (data_.size() != elements_ * axis_.bins * times_) throw InvalidInput("cube data size disagrees with its axes");
    for (const Complex& v : data_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidInput("cube holds a non-finite sample");
    }
}

double range_psf(double offset, double resolution) {
    const double u = offset / resolution;
    if (std::abs(u) >= kPsfHalfWidthCells) return 0.0;
    const double sinc = u == 0.0 ? 1.0 : std::sin(kPi * u) / (kPi * u);
    const double hann = 0.5 * (1.0 + std::cos(kPi * u / kPsfHalfWidthCells));
    return sinc * hann;
}

namespace {

void check_targets(std::span<const SceneTarget> targets, const RadarConfig& cfg) {
    if (targets.empty()) throw InvalidInput("scene has no targets");
    const DisplacementTrace& first = targets.front().displacement;
    const double max_disp = cfg.range_resolution() / 4.0;
    for (const SceneTarget& t : targets) {
        if (!(t.range > 0.0)) throw InvalidInput("target range must be positive");
        if (!(std::abs(t.theta) < kPi / 2)) throw InvalidInput("target direction must satisfy |theta| < pi/2");
        t.displacement.validate();
        if (t.displacement.size() != first.size() ||
            std::abs(t.displacement.sample_rate - first.sample_rate) > 1e-9 * first.sample_rate) {
            throw InvalidInput("target traces differ in duration or sample rate");
        }
        for (double d : t.displacement.samples) {
            if (std::abs(d) >= max_disp) throw InvalidInput("target displacement exceeds a quarter range cell");
        }
    }
    if (std::abs(first.sample_rate - cfg.slow_time_rate) > 1e-9 * cfg.slow_time_rate) {
        throw InvalidInput("target traces are not sampled at the slow-time rate");
    }
    if (first.size() == 0) throw InvalidInput("target traces are empty");
}

} // namespace

RadarCube simulate_cube(std::span<const SceneTarget> targets, const RadarConfig& cfg, const SimOptions& options) {
    cfg.validate();
    check_targets(targets, cfg);

    RangeAxis axis = options.axis;
    const double resolution = cfg.range_resolution();
    if (axis.bins == 0) {
        double far = 0.0;
        for (const auto& t : targets) far = std::max(far, t.range);
        axis.start = 0.0;
        axis.spacing = resolution;
        axis.bins = static_cast<std::size_t>(std::ceil(far / resolution + kPsfHalfWidthCells)) + 1;
    }
    if (!(axis.spacing > 0.0)) throw InvalidInput("range axis spacing must be positive");

    const std::size_t times = targets.front().displacement.size();
    RadarCube cube(cfg, axis, times, targets.front().displacement.t0);
    const std::size_t elements = cube.elements();
    const double k = cfg.wavenumber();

    // Static part of each target per (element, bin): a_n g(.) exp(-j2k r_n) a_m(theta_n).
    struct Static {
        std::size_t bin;
        std::vector<Complex> per_element;
    };
    std::vector<std::vector<Static>> statics(targets.size());
    double strongest = 0.0;
    for (std::size_t n = 0; n < targets.size(); ++n) {
        const SceneTarget& tg = targets[n];
        strongest = std::max(strongest, std::abs(tg.reflectivity));
        const Eigen::VectorXcd steer = steering_vector(tg.theta, static_cast<unsigned>(elements),
                                                       cfg.element_spacing_wavelengths);
        const Complex base = tg.reflectivity * std::polar(1.0, -2.0 * k * tg.range);
        for (std::size_t b = 0; b < axis.bins; ++b) {
            const double g = range_psf(axis.center(b) - tg.range, resolution);
            if (g == 0.0) continue;
            Static s{b, std::vector<Complex>(elements)};
            for (std::size_t m = 0; m < elements; ++m) s.per_element[m] = base * g * steer[static_cast<Eigen::Index>(m)];
            statics[n].push_back(std::move(s));
        }
    }

    double sigma = 0.0;
    if (options.snr_db) {
        const double reference =
            options.noise_reference == NoiseReference::Absolute ? options.reference_amplitude : strongest;
        if (!(reference > 0.0)) throw InvalidInput("SNR requested against a zero-amplitude reference");
        sigma = reference / std::sqrt(std::pow(10.0, *options.snr_db / 10.0));
        cube.snr_db = options.snr_db;
        cube.seed = options.seed;
    }

    parallel_for(times, [&](std::size_t t) {
        for (std::size_t n = 0; n < targets.size(); ++n) {
            const Complex mod = std::polar(1.0, 2.0 * k * targets[n].displacement.samples[t]);
            for (const Static& s : statics[n]) {
                for (std::size_t m = 0; m < elements; ++m) cube.at(m, s.bin, t) += s.per_element[m] * mod;
            }
        }
        if (sigma > 0.0) {
            std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                              static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(std::uint64_t{t} >> 32)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> normal(0.0, sigma / std::sqrt(2.0));
            for (std::size_t m = 0; m < elements; ++m) {
                for (std::size_t b = 0; b < axis.bins; ++b) {
                    const double re = normal(rng);
                    const double im = normal(rng);
                    cube.at(m, b, t) += Complex(re, im);
                }
            }
        }
    });
    return cube;
}

} // namespace echosite
