#pragma once

#include <cmath>

#include "edgetwin/errors.hpp"
#include "edgetwin/rng.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

// One fading draw over a user->server link. Rayleigh power fading: the gain
// magnitude is rho = sqrt(gamma * s) with s ~ Exp(1), so |rho|^2 = gamma * s.
struct ChannelState {
    double distance_m = 0.0;
    double path_gain = 0.0;      // gamma = (d0/d)^eta
    double fading_power = 0.0;   // s draw
    double rho_squared = 0.0;    // gamma * s
};

inline double path_gain(double distance_m, const ChannelParams& p) {
    if (!(distance_m > 0.0) || !std::isfinite(distance_m))
        throw NumericError("path_gain: distance must be finite and > 0");
    return std::pow(p.reference_distance_m / distance_m, p.path_loss_exponent);
}

inline ChannelState sample_channel(Rng& rng, double distance_m, const ChannelParams& p) {
    ChannelState st;
    st.distance_m = distance_m;
    st.path_gain = path_gain(distance_m, p);
    st.fading_power = rng.exponential(1.0);
    st.rho_squared = st.path_gain * st.fading_power;
    return st;
}

// Shannon rate in bits/s. distance_scaled_snr keeps an extra /d inside the
// SNR; with it off the rate is the textbook B*log2(1 + p*|rho|^2/sigma^2).
inline double transmission_rate(double bandwidth_hz, double tx_power_w,
                                const ChannelState& ch, double noise_power_w,
                                bool distance_scaled_snr) {
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw NumericError("transmission_rate: bandwidth must be finite and > 0");
    if (!(tx_power_w >= 0.0) || !std::isfinite(tx_power_w))
        throw NumericError("transmission_rate: tx power must be finite and >= 0");
    if (!(noise_power_w > 0.0) || !std::isfinite(noise_power_w))
        throw NumericError("transmission_rate: noise power must be finite and > 0");
    if (!(ch.distance_m > 0.0) || !(ch.rho_squared >= 0.0))
        throw NumericError("transmission_rate: bad channel state");

    double snr = tx_power_w * ch.rho_squared / noise_power_w;
    if (distance_scaled_snr) snr /= ch.distance_m;
    const double rate = bandwidth_hz * std::log2(1.0 + snr);
    if (!std::isfinite(rate)) throw NumericError("transmission_rate: nonfinite rate");
    return rate;
}

}  // namespace edgetwin
