#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cavlink/common.hpp"

namespace cavlink {

/// Absorber-loading presets for the reverberant enclosure. The decay
/// constant follows tau = Q / (2*pi*f0) at f0 = 2.432 GHz; the direct-path
/// Rician factor reflects how strongly the loading damps the scattered field
/// around the short near-field link.
struct LoadingPreset {
    std::string name = "Empty";
    double decay_constant_tau = 650e-9;  // seconds
    double k_factor = 0.5;               // direct-to-scattered power ratio

    static LoadingPreset empty(double k_scale = 1.0);
    static LoadingPreset side_loaded(double k_scale = 1.0);
    static LoadingPreset corner_loaded(double k_scale = 1.0);
    static LoadingPreset custom(double tau, double k);
    static LoadingPreset by_name(const std::string& name, double k_scale = 1.0);
};

struct ChannelTap {
    int delay = 0;  // samples
    Complex gain;
};

/// One draw of the cavity impulse response; total tap power is exactly 1.
struct ChannelRealization {
    std::vector<ChannelTap> taps;
    LoadingPreset preset;
    uint64_t seed = 0;
};

struct Impairments {
    double snr_db = std::numeric_limits<double>::infinity();
    double cfo_hz = 0.0;
    size_t timing_offset = 0;  // leading zero samples
    uint64_t noise_seed = 0;
};

/// Direct tap power k/(k+1) plus an exponential tapped-delay-line scattered
/// profile out to 5*tau; total power renormalized to 1.
ChannelRealization draw_channel(const LoadingPreset& preset, uint64_t seed, double sample_rate = 20e6);

/// Ideal single-tap channel (loopback reference).
ChannelRealization identity_channel();

/// DFT of the tap sequence on an n_bins grid over the sampling bandwidth.
std::vector<Complex> frequency_response(const ChannelRealization& realization, int n_bins,
                                        double sample_rate = 20e6);

/// Half-power coherence bandwidth from the frequency autocorrelation of the
/// per-realization power response |H(f)|^2 on a dense 1024-bin grid.
/// Returns the full bandwidth if the correlation never falls below threshold.
double coherence_bandwidth(const ChannelRealization& realization, double correlation_threshold = 0.5,
                           double sample_rate = 20e6);

/// RMS delay spread of the realized tap powers, in seconds.
double rms_delay_spread(const ChannelRealization& realization, double sample_rate = 20e6);

/// Convolve with the taps, rotate by the CFO, delay, and add white noise
/// with per-sample variance set from the mean convolved signal power over
/// its nonzero support.
IqWaveform apply_channel(const IqWaveform& waveform, const ChannelRealization& realization,
                         const Impairments& imp);

std::string realization_to_json(const ChannelRealization& realization);
ChannelRealization realization_from_json(const std::string& text);

}  // namespace cavlink
