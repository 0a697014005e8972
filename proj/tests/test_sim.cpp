#include <doctest.h>

#include "echosite/errors.hpp"
#include "echosite/sim.hpp"

#include <cmath>
#include <numeric>

using namespace echosite;

namespace {

const RadarConfig kCfg{};

DisplacementTrace sampled(double duration, const std::function<double(double)>& f) {
    DisplacementTrace tr;
    tr.sample_rate = kCfg.slow_time_rate;
    const auto n = static_cast<std::size_t>(std::llround(duration * tr.sample_rate));
    for (std::size_t i = 0; i < n; ++i) tr.samples.push_back(f(static_cast<double>(i) / tr.sample_rate));
    return tr;
}

RangeAxis axis_for(std::size_t bins) {
    return {0.0, kCfg.range_resolution(), bins};
}

/// Target placed on the center of bin `bin` of the default axis.
double bin_center(std::size_t bin) {
    return kCfg.range_resolution() * static_cast<double>(bin);
}

} // namespace

TEST_CASE("steering vector") {
    const auto broadside = steering_vector(0.0, 12);
    for (Eigen::Index m = 0; m < 12; ++m) CHECK(std::abs(broadside[m] - Complex(1, 0)) < 1e-15);

    const auto a30 = steering_vector(kPi / 6, 12);
    for (Eigen::Index m = 0; m + 1 < 12; ++m) {
        CHECK(std::arg(a30[m + 1] / a30[m]) == doctest::Approx(kPi / 2).epsilon(1e-12));
    }
    CHECK(std::arg(a30[0]) == doctest::Approx(kPi / 2).epsilon(1e-12));  // m starts at 1

    for (double theta : {-1.2, -0.3, 0.1, 0.9, 1.5}) {
        const auto a = steering_vector(theta, 12);
        CHECK(std::abs(a.squaredNorm() - 12.0) < 1e-12);
        for (Eigen::Index m = 0; m < 12; ++m) CHECK(std::abs(std::abs(a[m]) - 1.0) < 1e-15);
    }
    CHECK_THROWS_AS(steering_vector(kPi / 2, 12), InvalidInput);
}

TEST_CASE("radar config derived quantities") {
    CHECK(kCfg.virtual_elements() == 12);
    CHECK(kCfg.range_resolution() == doctest::Approx(0.0440871).epsilon(1e-5));
    CHECK(kCfg.wavelength() == doctest::Approx(3.7948e-3).epsilon(1e-4));
    CHECK(2 * kCfg.wavenumber() * 100e-6 == doctest::Approx(0.331).epsilon(0.001 / 0.331));
    RadarConfig bad = kCfg;
    bad.slow_time_rate = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("pulse waveform templates") {
    PulseSpec spec;
    spec.amplitude = 100e-6;
    spec.heart_rate_bpm = 60;
    spec.duration = 5;

    const auto base = pulse_waveform(spec).trace;
    REQUIRE(base.size() == 728);
    const auto [lo, hi] = std::minmax_element(base.samples.begin(), base.samples.end());
    CHECK(*hi - *lo <= 200e-6 + 1e-15);
    CHECK(std::max(std::abs(*lo), std::abs(*hi)) == doctest::Approx(100e-6).epsilon(1e-12));
    CHECK(std::abs(std::accumulate(base.samples.begin(), base.samples.end(), 0.0)) < 1e-15);

    SUBCASE("fundamental at the heart rate") {
        const double n = static_cast<double>(base.size());
        std::size_t best = 0;
        double best_mag = 0.0;
        for (std::size_t k = 1; k < base.size() / 2; ++k) {
            Complex acc{};
            for (std::size_t i = 0; i < base.size(); ++i) {
                acc += base.samples[i] * std::polar(1.0, -2 * kPi * static_cast<double>(k * i) / n);
            }
            if (std::abs(acc) > best_mag) {
                best_mag = std::abs(acc);
                best = k;
            }
        }
        CHECK(static_cast<double>(best) * base.sample_rate / n == doctest::Approx(1.0).epsilon(0.01));
    }
    SUBCASE("ptt appears as the cross-correlation lag") {
        PulseSpec delayed = spec;
        delayed.ptt = 0.05;
        const auto late = pulse_waveform(delayed).trace;
        const std::size_t n = base.size();
        long best_lag = 0;
        double best = -INFINITY;
        for (long lag = -30; lag <= 30; ++lag) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += late.samples[i] * base.samples[static_cast<std::size_t>((static_cast<long>(i) - lag + static_cast<long>(n)) % static_cast<long>(n))];
            }
            if (acc > best) {
                best = acc;
                best_lag = lag;
            }
        }
        CHECK(std::abs(static_cast<double>(best_lag) / spec.sample_rate - 0.05) <= 1.0 / spec.sample_rate + 1e-12);
    }
    SUBCASE("zero amplitude") {
        PulseSpec zero = spec;
        zero.amplitude = 0;
        for (double v : pulse_waveform(zero).trace.samples) CHECK(v == 0.0);
    }
    SUBCASE("file template at another rate is resampled") {
        PulseSpec file = spec;
        file.kind = PulseTemplate::File;
        DisplacementTrace tpl;
        tpl.sample_rate = 200.0;
        for (int i = 0; i < 200; ++i) tpl.samples.push_back(std::sin(2 * kPi * i / 200.0));
        file.file_template = tpl;
        const auto out = pulse_waveform(file);
        CHECK(out.resampled);
        CHECK(out.trace.sample_rate == spec.sample_rate);
        CHECK(out.trace.size() == 728);
        CHECK(*std::max_element(out.trace.samples.begin(), out.trace.samples.end()) <= 100e-6 + 1e-15);
    }
    SUBCASE("bad parameters") {
        PulseSpec bad = spec;
        bad.duration = 0;
        CHECK_THROWS_AS(pulse_waveform(bad), InvalidInput);
        bad = spec;
        bad.heart_rate_bpm = -1;
        CHECK_THROWS_AS(pulse_waveform(bad), InvalidInput);
    }
}

TEST_CASE("static target: constant in time with the steering phase across elements") {
    const double theta = 0.3;
    const std::size_t bin = 23;
    SceneTarget tg{bin_center(bin), theta, Complex(0.7, -0.2), sampled(2.0, [](double) { return 0.0; })};
    const RadarCube cube = simulate_cube(std::vector{tg}, kCfg, {.axis = axis_for(40)});
    const auto a = steering_vector(theta, 12);
    const Eigen::VectorXcd x0 = cube.snapshot(bin, 0);
    for (std::size_t t = 1; t < cube.times(); t += 13) CHECK((cube.snapshot(bin, t) - x0).norm() < 1e-12);
    const Complex common = x0[0] / a[0];
    CHECK((x0 - common * a).norm() < 1e-12);
    CHECK(std::abs(common) == doctest::Approx(std::abs(tg.reflectivity)).epsilon(1e-12));
}

TEST_CASE("sinusoidal displacement appears as 2k d(t) in the phase") {
    const double D = 50e-6, f = 1.2, k = kCfg.wavenumber();
    const std::size_t bin = 20;
    SceneTarget tg{bin_center(bin), -0.2, Complex(1, 0), sampled(5.0, [&](double t) { return D * std::sin(2 * kPi * f * t); })};
    const RadarCube cube = simulate_cube(std::vector{tg}, kCfg, {.axis = axis_for(30)});
    for (std::size_t m : {0u, 5u, 11u}) {
        const Complex ref = cube.at(m, bin, 0);
        double worst = 0.0;
        for (std::size_t t = 0; t < cube.times(); ++t) {
            const double phase = std::arg(cube.at(m, bin, t) / ref);  // small, no unwrap needed
            const double expected = 2 * k * (tg.displacement.samples[t] - tg.displacement.samples[0]);
            worst = std::max(worst, std::abs(phase - expected));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("two targets in one bin sum their steering-weighted phasors") {
    const std::size_t bin = 25;
    const double k = kCfg.wavenumber();
    SceneTarget a{bin_center(bin), 20 * kPi / 180, Complex(1, 0), sampled(1.0, [](double t) { return 40e-6 * std::sin(2 * kPi * t); })};
    SceneTarget b{bin_center(bin), -20 * kPi / 180, Complex(0.5, 0.4), sampled(1.0, [](double t) { return 30e-6 * std::cos(2 * kPi * 1.7 * t); })};
    const RadarCube cube = simulate_cube(std::vector{a, b}, kCfg, {.axis = axis_for(35)});
    const auto sa = steering_vector(a.theta, 12);
    const auto sb = steering_vector(b.theta, 12);
    double worst = 0.0;
    for (std::size_t t = 0; t < cube.times(); t += 7) {
        for (std::size_t m = 0; m < 12; ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            const Complex expected =
                a.reflectivity * std::polar(1.0, -2 * k * a.range) * sa[mi] * std::polar(1.0, 2 * k * a.displacement.samples[t]) +
                b.reflectivity * std::polar(1.0, -2 * k * b.range) * sb[mi] * std::polar(1.0, 2 * k * b.displacement.samples[t]);
            worst = std::max(worst, std::abs(cube.at(m, bin, t) - expected));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("noiseless simulation is linear in the target set") {
    SceneTarget a{0.93, 0.25, Complex(1, 0), sampled(1.0, [](double t) { return 60e-6 * std::sin(2 * kPi * 1.1 * t); })};
    SceneTarget b{1.02, -0.4, Complex(0.3, -0.6), sampled(1.0, [](double t) { return 20e-6 * std::sin(2 * kPi * 0.7 * t); })};
    const SimOptions opts{.axis = axis_for(30)};
    const RadarCube ab = simulate_cube(std::vector{a, b}, kCfg, opts);
    const RadarCube ca = simulate_cube(std::vector{a}, kCfg, opts);
    const RadarCube cb = simulate_cube(std::vector{b}, kCfg, opts);
    double worst = 0.0;
    for (std::size_t i = 0; i < ab.data().size(); ++i) {
        worst = std::max(worst, std::abs(ab.data()[i] - ca.data()[i] - cb.data()[i]));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("range PSF keeps at least 90% of a lone target's energy within one bin") {
    const double res = kCfg.range_resolution();
    CHECK(range_psf(0.0, res) == 1.0);
    CHECK(std::abs(range_psf(res, res)) < 1e-15);
    CHECK(range_psf(3.0 * res, res) == 0.0);
    for (double frac : {0.0, 0.2, 0.45}) {
        const double range = res * (20.0 + frac);
        SceneTarget tg{range, 0.1, Complex(1, 0), sampled(0.1, [](double) { return 0.0; })};
        const RadarCube cube = simulate_cube(std::vector{tg}, kCfg, {.axis = axis_for(40)});
        const std::size_t center = cube.range_axis().nearest(range);
        double total = 0.0, near = 0.0;
        for (std::size_t b = 0; b < cube.bins(); ++b) {
            double e = 0.0;
            for (std::size_t m = 0; m < 12; ++m) e += std::norm(cube.at(m, b, 0));
            total += e;
            if (b + 1 >= center && b <= center + 1) near += e;
        }
        CAPTURE(frac);
        CHECK(near / total >= 0.9);
    }
}

TEST_CASE("noise: reproducible by seed and scaled to the requested SNR") {
    SceneTarget tg{bin_center(10), 0.0, Complex(2, 0), sampled(10.0, [](double) { return 0.0; })};
    const SimOptions opts{.axis = axis_for(40), .snr_db = 20.0, .seed = 42};
    const RadarCube a = simulate_cube(std::vector{tg}, kCfg, opts);
    const RadarCube b = simulate_cube(std::vector{tg}, kCfg, opts);
    CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
    CHECK(a.seed == 42u);
    REQUIRE(a.snr_db);

    SimOptions other = opts;
    other.seed = 43;
    const RadarCube c = simulate_cube(std::vector{tg}, kCfg, other);
    CHECK(!std::equal(a.data().begin(), a.data().end(), c.data().begin()));

    // Bins 30..39 hold noise only; variance is |a|^2 / SNR.
    double power = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < 12; ++m)
        for (std::size_t bin = 30; bin < 40; ++bin)
            for (std::size_t t = 0; t < a.times(); ++t) {
                power += std::norm(a.at(m, bin, t));
                ++count;
            }
    CHECK(power / static_cast<double>(count) == doctest::Approx(4.0 / 100.0).epsilon(0.02));

    SimOptions absolute = opts;
    absolute.noise_reference = NoiseReference::Absolute;
    absolute.reference_amplitude = 1.0;
    const RadarCube d = simulate_cube(std::vector{tg}, kCfg, absolute);
    power = 0.0;
    for (std::size_t t = 0; t < d.times(); ++t) power += std::norm(d.at(0, 35, t));
    CHECK(power / static_cast<double>(d.times()) == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("scene validation") {
    SceneTarget tg{1.0, 0.0, Complex(1, 0), sampled(1.0, [](double) { return 0.0; })};
    CHECK_THROWS_AS(simulate_cube(std::vector<SceneTarget>{}, kCfg), InvalidInput);

    SceneTarget wide = tg;
    wide.theta = kPi / 2;
    CHECK_THROWS_AS(simulate_cube(std::vector{wide}, kCfg), InvalidInput);

    SceneTarget shorter = tg;
    shorter.displacement.samples.pop_back();
    CHECK_THROWS_AS(simulate_cube(std::vector{tg, shorter}, kCfg), InvalidInput);

    SceneTarget large = tg;
    large.displacement.samples[3] = kCfg.range_resolution() / 4;
    CHECK_THROWS_AS(simulate_cube(std::vector{large}, kCfg), InvalidInput);

    SceneTarget wrong_rate = tg;
    wrong_rate.displacement.sample_rate = 100.0;
    CHECK_THROWS_AS(simulate_cube(std::vector{wrong_rate}, kCfg), InvalidInput);

    SceneTarget silent = tg;
    silent.reflectivity = 0.0;
    CHECK_THROWS_AS(simulate_cube(std::vector{silent}, kCfg, {.snr_db = 10.0}), InvalidInput);
}

TEST_CASE("automatic range axis covers every target") {
    SceneTarget tg{1.3, 0.0, Complex(1, 0), sampled(0.5, [](double) { return 0.0; })};
    const RadarCube cube = simulate_cube(std::vector{tg}, kCfg);
    CHECK(cube.range_axis().spacing == doctest::Approx(kCfg.range_resolution()));
    CHECK(cube.range_axis().center(cube.bins() - 1) > 1.3);
    CHECK(cube.range_axis().nearest(1.3) == 29);
    CHECK_NOTHROW(cube.validate());
}
