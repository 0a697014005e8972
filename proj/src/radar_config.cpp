#include "echosite/radar_config.hpp"

#include "echosite/errors.hpp"

namespace echosite {

void RadarConfig::validate() const {
    if (!(center_frequency > 0.0)) throw InvalidInput("center frequency must be positive");
    if (!(bandwidth > 0.0)) throw InvalidInput("bandwidth must be positive");
    if (tx_count == 0 || rx_count == 0) throw InvalidInput("antenna counts must be positive");
    if (!(element_spacing_wavelengths > 0.0)) throw InvalidInput("element spacing must be positive");
    if (!(slow_time_rate > 0.0)) throw InvalidInput("slow-time rate must be positive");
    if (!(impedance > 0.0)) throw InvalidInput("impedance must be positive");
}

} // namespace echosite
