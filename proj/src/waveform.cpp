#include "echosite/errors.hpp"
#include "echosite/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace echosite {

Eigen::VectorXcd steering_vector(double theta, unsigned elements, double spacing_wavelengths) {
    if (!(std::abs(theta) < kPi / 2)) throw InvalidInput("steering angle must satisfy |theta| < pi/2");
    Eigen::VectorXcd a(elements);
    const double step = 2.0 * kPi * spacing_wavelengths * std::sin(theta);
    for (unsigned m = 0; m < elements; ++m) a[m] = std::polar(1.0, static_cast<double>(m + 1) * step);
    return a;
}

namespace {

double wrap_into(double t, double period) {
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    return u;
}

double gaussian_train(double t, double period, double sigma) {
    const double u = wrap_into(t, period);
    double v = 0.0;
    for (int k = -1; k <= 1; ++k) {
        const double d = u - k * period;
        v += std::exp(-0.5 * d * d / (sigma * sigma));
    }
    return v;
}

} // namespace

PulseWaveform pulse_waveform(const PulseSpec& spec) {
    if (!(spec.duration > 0.0)) throw InvalidInput("pulse duration must be positive");
    if (!(spec.sample_rate > 0.0)) throw InvalidInput("pulse sample rate must be positive");
    if (!(spec.amplitude >= 0.0)) throw InvalidInput("pulse amplitude must be non-negative");

    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    if (n < 2) throw InvalidInput("pulse duration shorter than two samples");
    const double span = static_cast<double>(n) / spec.sample_rate;

    PulseWaveform out;
    out.trace.sample_rate = spec.sample_rate;
    out.trace.samples.resize(n);

    if (spec.kind == PulseTemplate::GaussianTrain) {
        if (!(spec.heart_rate_bpm > 0.0)) throw InvalidInput("heart rate must be positive");
        if (!(spec.pulse_width > 0.0 && spec.pulse_width < 0.5)) throw InvalidInput("pulse width must be in (0, 0.5)");
        const double period = 60.0 / spec.heart_rate_bpm;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = wrap_into(static_cast<double>(i) / spec.sample_rate - spec.ptt, span);
            out.trace.samples[i] = gaussian_train(t, period, spec.pulse_width * period);
        }
    } else {
        const DisplacementTrace& tpl = spec.file_template;
        tpl.validate();
        if (tpl.size() < 2) throw InvalidInput("pulse template file needs at least two samples");
        out.resampled = std::abs(tpl.sample_rate - spec.sample_rate) > 1e-9 * spec.sample_rate;
        const double tpl_span = tpl.duration();
        for (std::size_t i = 0; i < n; ++i) {
            const double t = wrap_into(static_cast<double>(i) / spec.sample_rate - spec.ptt, span);
            out.trace.samples[i] = tpl.value_at(tpl.t0 + wrap_into(t, tpl_span));
        }
    }

    auto& s = out.trace.samples;
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
    double peak = 0.0;
    for (double& v : s) {
        v -= mean;
        peak = std::max(peak, std::abs(v));
    }
    const double gain = peak > 0.0 ? spec.amplitude / peak : 0.0;
    for (double& v : s) v *= gain;
    return out;
}

} // namespace echosite
