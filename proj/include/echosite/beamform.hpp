#pragma once

#include "echosite/sim.hpp"
#include "echosite/trace.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace echosite {

/// How the array correlation matrix is formed from slow-time snapshots.
enum class CorrelationMode {
    Raw,       // (1/T) sum x x^H
    Centered,  // snapshots minus their slow-time mean; static echoes drop out
};

struct CorrelationMatrix {
    Eigen::MatrixXcd r;
    std::size_t samples = 0;
    double loading = 0.0;          // relative factor epsilon
    double loading_added = 0.0;    // absolute value added to the diagonal
    CorrelationMode mode = CorrelationMode::Raw;
};

/// R = (1/T) sum_t x x^H + epsilon (tr R_raw / M) I over the columns of
/// `snapshots` (M x T). Loading is always scaled by the raw (uncentered)
/// power so that it stays meaningful for static scenes in Centered mode.
/// Throws SingularMatrixError for all-zero data without loading and
/// InvalidInput when T < M without loading.
CorrelationMatrix correlation_from_snapshots(const Eigen::MatrixXcd& snapshots, double loading,
                                             CorrelationMode mode = CorrelationMode::Raw);

/// Snapshots x(bin, t) of a cube, as an M x T matrix.
Eigen::MatrixXcd cube_snapshots(const RadarCube& cube, std::size_t bin);

CorrelationMatrix estimate_correlation(const RadarCube& cube, std::size_t bin, double loading,
                                       CorrelationMode mode = CorrelationMode::Raw);

struct BeamWeights {
    Eigen::VectorXcd w;
    double theta = 0.0;
};

/// Minimum-variance distortionless weights for steering vector `a`:
///   w = R^-1 a / (a^H R^-1 a),
/// computed with a Cholesky solve. Throws SingularMatrixError when R is not
/// positive definite or its reciprocal condition number is below 1e-12.
Eigen::VectorXcd mvdr_solve(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& a);

BeamWeights mvdr_weights(const CorrelationMatrix& r, double theta, double spacing_wavelengths = 0.5);

/// Sequential unwrap: adds multiples of 2 pi whenever successive samples
/// jump by more than pi.
std::vector<double> unwrap_phase(std::span<const double> wrapped);

/// d(t) = phase / (2k), mean removed.
DisplacementTrace phase_to_displacement(std::span<const double> unwrapped, double wavenumber, double sample_rate,
                                        double t0 = 0.0);

struct ExtractOptions {
    double loading = 1e-3;
    CorrelationMode mode = CorrelationMode::Centered;
};

/// Beamformed phase demodulation at one range bin and look direction:
///   d(t) = unwrap(angle(w^H x(bin, t))) / (2k), mean removed.
/// Sets `low_signal` on the result if |w^H x| < 1e-12 at any sample.
DisplacementTrace extract_displacement(const RadarCube& cube, std::size_t bin, double theta, double wavenumber,
                                       const ExtractOptions& options = {});

/// Bin with the highest mean power summed over elements.
std::size_t peak_power_bin(const RadarCube& cube);

/// MVDR spatial spectrum 1 / (a^H R^-1 a) over `thetas`.
std::vector<double> mvdr_spectrum(const CorrelationMatrix& r, std::span<const double> thetas,
                                  double spacing_wavelengths = 0.5);

/// Direction of the largest MVDR spectrum value on a uniform grid in
/// [-max_angle, max_angle].
double mvdr_peak_direction(const CorrelationMatrix& r, double max_angle, std::size_t grid_points,
                           double spacing_wavelengths = 0.5);

} // namespace echosite
