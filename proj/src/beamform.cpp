#include "echosite/beamform.hpp"

#include "echosite/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numeric>

namespace echosite {

CorrelationMatrix correlation_from_snapshots(const Eigen::MatrixXcd& snapshots, double loading,
                                             CorrelationMode mode) {
    const auto m = snapshots.rows();
    const auto t = snapshots.cols();
    if (m == 0 || t == 0) throw InvalidInput("no snapshots");
    if (loading < 0.0) throw InvalidInput("diagonal loading must be non-negative");
    if (t < m && loading == 0.0) throw InvalidInput("fewer snapshots than elements; diagonal loading is required");

    const Eigen::MatrixXcd raw = snapshots * snapshots.adjoint() / static_cast<double>(t);
    const double raw_power = raw.trace().real() / static_cast<double>(m);
    if (raw_power == 0.0 && loading == 0.0) {
        throw SingularMatrixError("all-zero snapshots give a singular correlation matrix; use diagonal loading");
    }

    CorrelationMatrix out;
    out.samples = static_cast<std::size_t>(t);
    out.loading = loading;
    out.mode = mode;
    if (mode == CorrelationMode::Raw) {
        out.r = raw;
    } else {
        const Eigen::VectorXcd mean = snapshots.rowwise().mean();
        const Eigen::MatrixXcd centered = snapshots.colwise() - mean;
        out.r = centered * centered.adjoint() / static_cast<double>(t);
    }
    out.loading_added = loading * raw_power;
    out.r.diagonal().array() += out.loading_added;
    // Exact Hermitian symmetry for the solver.
    out.r = 0.5 * (out.r + out.r.adjoint()).eval();
    return out;
}

Eigen::MatrixXcd cube_snapshots(const RadarCube& cube, std::size_t bin) {
    if (bin >= cube.bins()) throw InvalidInput("range bin " + std::to_string(bin) + " outside the cube");
    Eigen::MatrixXcd x(static_cast<Eigen::Index>(cube.elements()), static_cast<Eigen::Index>(cube.times()));
    for (std::size_t m = 0; m < cube.elements(); ++m) {
        for (std::size_t t = 0; t < cube.times(); ++t) {
            x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) = cube.at(m, bin, t);
        }
    }
    return x;
}

CorrelationMatrix estimate_correlation(const RadarCube& cube, std::size_t bin, double loading, CorrelationMode mode) {
    return correlation_from_snapshots(cube_snapshots(cube, bin), loading, mode);
}

Eigen::VectorXcd mvdr_solve(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& a) {
    if (r.rows() != r.cols() || r.rows() != a.size()) throw InvalidInput("correlation and steering sizes differ");
    const Eigen::LLT<Eigen::MatrixXcd> llt(r);
    if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12)) {
        throw SingularMatrixError("correlation matrix is singular or ill-conditioned; apply diagonal loading");
    }
    const Eigen::VectorXcd u = llt.solve(a);
    const Complex gain = a.dot(u);  // a^H R^-1 a
    return u / std::conj(gain);
}

BeamWeights mvdr_weights(const CorrelationMatrix& r, double theta, double spacing_wavelengths) {
    const Eigen::VectorXcd a = steering_vector(theta, static_cast<unsigned>(r.r.rows()), spacing_wavelengths);
    BeamWeights out{mvdr_solve(r.r, a), theta};
    const Complex response = out.w.dot(a);
    if (std::abs(response - Complex(1.0, 0.0)) > 1e-9) {
        throw std::logic_error("MVDR weights violate the distortionless constraint");
    }
    return out;
}

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.begin(), wrapped.end());
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double step = wrapped[i] - wrapped[i - 1];
        if (step > kPi) offset -= 2.0 * kPi * std::ceil((step - kPi) / (2.0 * kPi));
        else if (step < -kPi) offset += 2.0 * kPi * std::ceil((-step - kPi) / (2.0 * kPi));
        out[i] = wrapped[i] + offset;
    }
    return out;
}

DisplacementTrace phase_to_displacement(std::span<const double> unwrapped, double wavenumber, double sample_rate,
                                        double t0) {
    if (!(wavenumber > 0.0)) throw InvalidInput("wavenumber must be positive");
    DisplacementTrace trace;
    trace.sample_rate = sample_rate;
    trace.t0 = t0;
    trace.samples.resize(unwrapped.size());
    const double scale = 1.0 / (2.0 * wavenumber);
    for (std::size_t i = 0; i < unwrapped.size(); ++i) trace.samples[i] = unwrapped[i] * scale;
    if (!trace.samples.empty()) {
        const double mean = std::accumulate(trace.samples.begin(), trace.samples.end(), 0.0) /
                            static_cast<double>(trace.samples.size());
        for (double& v : trace.samples) v -= mean;
    }
    return trace;
}

DisplacementTrace extract_displacement(const RadarCube& cube, std::size_t bin, double theta, double wavenumber,
                                       const ExtractOptions& options) {
    const Eigen::MatrixXcd x = cube_snapshots(cube, bin);
    const CorrelationMatrix r = correlation_from_snapshots(x, options.loading, options.mode);
    const BeamWeights weights = mvdr_weights(r, theta, cube.config().element_spacing_wavelengths);
    const Eigen::VectorXcd y = (weights.w.adjoint() * x).transpose();

    std::vector<double> phase(static_cast<std::size_t>(y.size()));
    bool low = false;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        phase[static_cast<std::size_t>(t)] = std::arg(y[t]);
        if (std::abs(y[t]) < 1e-12) low = true;
    }
    DisplacementTrace trace = phase_to_displacement(unwrap_phase(phase), wavenumber, cube.slow_time_rate(), cube.t0());
    trace.low_signal = low;
    return trace;
}

std::size_t peak_power_bin(const RadarCube& cube) {
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t b = 0; b < cube.bins(); ++b) {
        double power = 0.0;
        for (std::size_t m = 0; m < cube.elements(); ++m)
            for (std::size_t t = 0; t < cube.times(); ++t) power += std::norm(cube.at(m, b, t));
        if (power > best_power) {
            best_power = power;
            best = b;
        }
    }
    return best;
}

std::vector<double> mvdr_spectrum(const CorrelationMatrix& r, std::span<const double> thetas,
                                  double spacing_wavelengths) {
    const Eigen::LLT<Eigen::MatrixXcd> llt(r.r);
    if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12)) {
        throw SingularMatrixError("correlation matrix is singular or ill-conditioned; apply diagonal loading");
    }
    std::vector<double> out;
    out.reserve(thetas.size());
    for (double theta : thetas) {
        const Eigen::VectorXcd a = steering_vector(theta, static_cast<unsigned>(r.r.rows()), spacing_wavelengths);
        out.push_back(1.0 / a.dot(llt.solve(a)).real());
    }
    return out;
}

double mvdr_peak_direction(const CorrelationMatrix& r, double max_angle, std::size_t grid_points,
                           double spacing_wavelengths) {
    if (grid_points < 2 || !(max_angle > 0.0 && max_angle < kPi / 2)) throw InvalidInput("bad spectrum grid");
    std::vector<double> thetas(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        thetas[i] = -max_angle + 2.0 * max_angle * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    }
    const auto spectrum = mvdr_spectrum(r, thetas, spacing_wavelengths);
    return thetas[static_cast<std::size_t>(std::max_element(spectrum.begin(), spectrum.end()) - spectrum.begin())];
}

} // namespace echosite
