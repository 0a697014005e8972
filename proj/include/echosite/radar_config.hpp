#pragma once

#include "echosite/geometry.hpp"

#include <cstddef>

namespace echosite {

/// MIMO FMCW radar parameters. Defaults describe a 79 GHz, 3 TX x 4 RX module
/// with a 12-element half-wavelength virtual array.
struct RadarConfig {
    double center_frequency = 79.0e9;  // Hz
    double bandwidth = 3.4e9;          // Hz
    unsigned tx_count = 3;
    unsigned rx_count = 4;
    double element_spacing_wavelengths = 0.5;
    double slow_time_rate = 145.6;  // Hz
    double impedance = kFreeSpaceImpedance;

    double wavelength() const { return kSpeedOfLight / center_frequency; }
    double wavenumber() const { return 2.0 * kPi * center_frequency / kSpeedOfLight; }
    unsigned virtual_elements() const { return tx_count * rx_count; }
    double element_spacing() const { return element_spacing_wavelengths * wavelength(); }
    /// c / 2B
    double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth); }

    /// Throws InvalidInput if any field is out of its domain.
    void validate() const;
};

} // namespace echosite
