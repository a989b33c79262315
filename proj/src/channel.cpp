#include "cavlink/channel.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace cavlink {

namespace {

// Default decay constants from tau = Q/(2*pi*f0) at f0 = 2.432 GHz:
// Q = 10000 / 1000 / 500 for the empty, side-loaded and corner-loaded cases.
constexpr double kTauEmpty = 650e-9;
constexpr double kTauSide = 65e-9;
constexpr double kTauCorner = 33e-9;

// Rician factors at the default 25 mm link; absorbers near the link (side
// preset) damp the scattered field less than absorbers in the corner, and an
// empty enclosure keeps almost all energy in the scattered field.
constexpr double kKEmpty = 0.5;
constexpr double kKSide = 4.0;
constexpr double kKCorner = 50.0;

}  // namespace

LoadingPreset LoadingPreset::empty(double k_scale) { return {"Empty", kTauEmpty, kKEmpty * k_scale}; }
LoadingPreset LoadingPreset::side_loaded(double k_scale) { return {"SideLoaded", kTauSide, kKSide * k_scale}; }
LoadingPreset LoadingPreset::corner_loaded(double k_scale) { return {"CornerLoaded", kTauCorner, kKCorner * k_scale}; }
LoadingPreset LoadingPreset::custom(double tau, double k) { return {"Custom", tau, k}; }

LoadingPreset LoadingPreset::by_name(const std::string& name, double k_scale) {
    if (name == "Empty") return empty(k_scale);
    if (name == "SideLoaded") return side_loaded(k_scale);
    if (name == "CornerLoaded") return corner_loaded(k_scale);
    throw std::invalid_argument("unknown loading preset: " + name);
}

ChannelRealization draw_channel(const LoadingPreset& preset, uint64_t seed, double sample_rate) {
    if (preset.decay_constant_tau <= 0) throw std::invalid_argument("decay constant must be positive");
    if (preset.k_factor < 0) throw std::invalid_argument("k_factor must be nonnegative");

    const double ts = 1.0 / sample_rate;
    const int n_taps = std::max(1, int(std::ceil(5.0 * preset.decay_constant_tau / ts - 1e-9)));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double k = preset.k_factor;
    const double scattered_total = 1.0 / (k + 1.0);
    const double direct_power = k / (k + 1.0);

    // exponential power-delay profile, normalized to the scattered budget
    std::vector<double> pdp(static_cast<size_t>(n_taps), 0.0);
    double sum = 0.0;
    for (int m = 0; m < n_taps; ++m) {
        pdp[size_t(m)] = std::exp(-double(m) * ts / preset.decay_constant_tau);
        sum += pdp[size_t(m)];
    }
    for (auto& p : pdp) p *= scattered_total / sum;

    ChannelRealization real;
    real.preset = preset;
    real.seed = seed;
    real.taps.resize(size_t(n_taps));
    for (int m = 0; m < n_taps; ++m) {
        const double s = std::sqrt(pdp[size_t(m)] / 2.0);
        real.taps[size_t(m)] = {m, Complex(s * gauss(rng), s * gauss(rng))};
    }
    const double phase = 2.0 * M_PI * uni(rng);
    real.taps[0].gain += std::sqrt(direct_power) * Complex(std::cos(phase), std::sin(phase));

    double power = 0.0;
    for (const auto& t : real.taps) power += std::norm(t.gain);
    const double norm = 1.0 / std::sqrt(power);
    for (auto& t : real.taps) t.gain *= norm;
    return real;
}

ChannelRealization identity_channel() {
    ChannelRealization real;
    real.preset = LoadingPreset::custom(1e-12, 1.0);
    real.taps = {{0, Complex(1.0, 0.0)}};
    return real;
}

std::vector<Complex> frequency_response(const ChannelRealization& realization, int n_bins, double) {
    std::vector<Complex> h(size_t(n_bins), Complex(0, 0));
    for (int i = 0; i < n_bins; ++i) {
        Complex acc(0, 0);
        for (const auto& t : realization.taps) {
            const double ang = -2.0 * M_PI * double(i) * double(t.delay) / double(n_bins);
            acc += t.gain * Complex(std::cos(ang), std::sin(ang));
        }
        h[size_t(i)] = acc;
    }
    return h;
}

double coherence_bandwidth(const ChannelRealization& realization, double correlation_threshold,
                           double sample_rate) {
    if (correlation_threshold <= 0.0 || correlation_threshold >= 1.0)
        throw std::invalid_argument("correlation threshold must lie in (0,1)");
    constexpr int kGrid = 1024;
    const auto h = frequency_response(realization, kGrid, sample_rate);

    // circular complex autocorrelation of H over the dense grid; its squared
    // normalized magnitude is the envelope correlation, whose half crossing
    // sits near 1/(2*pi*tau) for an exponential profile
    std::vector<Complex> g(h);
    fft_inplace(g, true);
    for (auto& v : g) v = Complex(std::norm(v), 0.0);  // realized PDP on the grid
    fft_inplace(g, false);

    const double r0 = std::abs(g[0]);
    if (r0 < 1e-30) return sample_rate;
    for (int lag = 1; lag <= kGrid / 2; ++lag) {
        const double rho = std::norm(g[size_t(lag)] / r0);
        if (rho < correlation_threshold)
            return double(lag) * sample_rate / double(kGrid);
    }
    return sample_rate;  // flat channel never decorrelates
}

double rms_delay_spread(const ChannelRealization& realization, double sample_rate) {
    const double ts = 1.0 / sample_rate;
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& t : realization.taps) {
        const double w = std::norm(t.gain);
        const double d = double(t.delay) * ts;
        p += w;
        m1 += w * d;
        m2 += w * d * d;
    }
    m1 /= p;
    m2 /= p;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

IqWaveform apply_channel(const IqWaveform& waveform, const ChannelRealization& realization,
                         const Impairments& imp) {
    if (waveform.samples.empty()) throw std::invalid_argument("waveform must be nonempty");

    const size_t n = waveform.samples.size();
    int max_delay = 0;
    for (const auto& t : realization.taps) max_delay = std::max(max_delay, t.delay);

    IqWaveform out;
    out.sample_rate = waveform.sample_rate;
    out.samples.assign(imp.timing_offset + n + size_t(max_delay), Complex(0, 0));

    for (const auto& t : realization.taps) {
        const size_t base = imp.timing_offset + size_t(t.delay);
        for (size_t i = 0; i < n; ++i) out.samples[base + i] += t.gain * waveform.samples[i];
    }

    double signal_power = 0.0;
    size_t active = 0;
    for (size_t i = imp.timing_offset; i < out.samples.size(); ++i) {
        const double p = std::norm(out.samples[i]);
        if (p > 0.0) {
            signal_power += p;
            ++active;
        }
    }
    if (active > 0) signal_power /= double(active);

    if (imp.cfo_hz != 0.0) {
        const double w = 2.0 * M_PI * imp.cfo_hz / out.sample_rate;
        for (size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] *= Complex(std::cos(w * double(i)), std::sin(w * double(i)));
    }

    if (std::isfinite(imp.snr_db)) {
        const double var = signal_power / std::pow(10.0, imp.snr_db / 10.0);
        const double s = std::sqrt(var / 2.0);
        std::mt19937_64 rng(imp.noise_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& v : out.samples) v += Complex(s * gauss(rng), s * gauss(rng));
    }
    return out;
}

std::string realization_to_json(const ChannelRealization& realization) {
    nlohmann::json j;
    j["preset"] = {{"name", realization.preset.name},
                   {"decay_constant_tau", realization.preset.decay_constant_tau},
                   {"k_factor", realization.preset.k_factor}};
    j["seed"] = realization.seed;
    nlohmann::json taps = nlohmann::json::array();
    for (const auto& t : realization.taps)
        taps.push_back({t.delay, t.gain.real(), t.gain.imag()});
    j["taps"] = taps;
    return j.dump(2);
}

ChannelRealization realization_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ChannelRealization real;
    real.preset.name = j.at("preset").at("name").get<std::string>();
    real.preset.decay_constant_tau = j.at("preset").at("decay_constant_tau").get<double>();
    real.preset.k_factor = j.at("preset").at("k_factor").get<double>();
    real.seed = j.at("seed").get<uint64_t>();
    for (const auto& t : j.at("taps"))
        real.taps.push_back({t.at(0).get<int>(), Complex(t.at(1).get<double>(), t.at(2).get<double>())});
    return real;
}

}  // namespace cavlink
