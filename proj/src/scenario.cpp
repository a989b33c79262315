#include "cavlink/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cavlink/imaging.hpp"
#include "cavlink/phy_tx.hpp"

namespace cavlink {

namespace fs = std::filesystem;
using nlohmann::json;

LoadingPreset ScenarioConfig::resolve_preset() const {
    double k_scale = 1.0;
    if (distance_label == "125mm") k_scale = 0.25;
    else if (distance_label != "25mm") throw std::invalid_argument("distance_label must be 25mm or 125mm");
    LoadingPreset p = (preset_name == "Custom")
                          ? LoadingPreset::custom(preset_tau_s, preset_k_factor)
                          : LoadingPreset::by_name(preset_name, k_scale);
    if (preset_tau_s > 0) p.decay_constant_tau = preset_tau_s;
    if (preset_k_factor >= 0) p.k_factor = preset_k_factor;
    return p;
}

ScenarioConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ScenarioConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("mcs_list", c.mcs_list);
    get("msdu_length", c.msdu_length);
    get("bandwidth_hz", c.bandwidth_hz);
    get("center_frequency_hz", c.center_frequency_hz);
    get("idle_time_s", c.idle_time_s);
    get("preset", c.preset_name);
    get("preset_tau_s", c.preset_tau_s);
    get("preset_k_factor", c.preset_k_factor);
    if (j.contains("snr_db")) {
        const auto& v = j.at("snr_db");
        c.snr_db = (v.is_string()) ? std::numeric_limits<double>::infinity() : v.get<double>();
    }
    get("cfo_hz", c.cfo_hz);
    get("timing_offset", c.timing_offset);
    get("distance_label", c.distance_label);
    get("seeds", c.seeds);
    get("image_path", c.image_path);
    get("output_dir", c.output_dir);
    get("detection_threshold", c.detection_threshold);
    if (j.contains("scrambler_seed")) c.scrambler_seed = uint8_t(j.at("scrambler_seed").get<int>());
    get("repeat_count", c.repeat_count);
    if (c.seeds.empty()) throw std::invalid_argument("seeds must be nonempty");
    for (int m : c.mcs_list) mcs_table(m);  // validates
    if (c.scrambler_seed == 0) throw std::invalid_argument("scrambler_seed must be nonzero");
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const ScenarioConfig& c) {
    json j;
    j["mcs_list"] = c.mcs_list;
    j["msdu_length"] = c.msdu_length;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["center_frequency_hz"] = c.center_frequency_hz;
    j["idle_time_s"] = c.idle_time_s;
    j["preset"] = c.preset_name;
    j["preset_tau_s"] = c.preset_tau_s;
    j["preset_k_factor"] = c.preset_k_factor;
    if (std::isfinite(c.snr_db)) j["snr_db"] = c.snr_db;
    else j["snr_db"] = "inf";
    j["cfo_hz"] = c.cfo_hz;
    j["timing_offset"] = c.timing_offset;
    j["distance_label"] = c.distance_label;
    j["seeds"] = c.seeds;
    j["image_path"] = c.image_path;
    j["output_dir"] = c.output_dir;
    j["detection_threshold"] = c.detection_threshold;
    j["scrambler_seed"] = int(c.scrambler_seed);
    j["repeat_count"] = c.repeat_count;
    return j.dump(2);
}

namespace {

ByteVector load_payload(const ScenarioConfig& config) {
    if (config.image_path.empty()) return make_test_image();
    std::ifstream in(config.image_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read image: " + config.image_path);
    return ByteVector(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

uint64_t mix_seed(uint64_t seed, int mcs) {
    return seed ^ (0x9E3779B97F4A7C15ULL * uint64_t(mcs + 1));
}

struct RecoveredImage {
    int mcs_index;
    uint64_t seed;
    ByteVector bytes;
};

}  // namespace

LinkReport run_scenario(const ScenarioConfig& config) {
    LinkReport report;
    report.config = config;

    const ByteVector image = load_payload(config);
    const ByteVector payload = encode_image(image);
    const auto msdus = fragment(payload, config.msdu_length);
    std::vector<Psdu> psdus;
    std::vector<std::vector<Complex>> tx_refs;  // filled per MCS below
    for (const auto& m : msdus) psdus.push_back(serialize_mpdu(build_mpdu(m, 0)));

    const LoadingPreset preset = config.resolve_preset();
    const std::string scenario_label = preset.name + "_" + config.distance_label;

    std::vector<PacketResult> cfo_pool;

    for (int mcs_index : config.mcs_list) {
        const Mcs& mcs = mcs_table(mcs_index);
        tx_refs.clear();
        for (const auto& p : psdus) tx_refs.push_back(reference_symbols(p, mcs, config.scrambler_seed));

        std::vector<IqWaveform> ppdus;
        for (int rep = 0; rep < config.repeat_count; ++rep)
            for (const auto& p : psdus) ppdus.push_back(build_ppdu({p, mcs_index}, config.scrambler_seed));
        const IqWaveform burst = assemble_burst(ppdus, config.idle_time_s);

        for (uint64_t seed : config.seeds) {
            RunReport run;
            run.mcs_index = mcs_index;
            run.seed = seed;
            run.packets_sent = ppdus.size();

            const ChannelRealization realization = draw_channel(preset, seed, config.bandwidth_hz);
            run.coherence_bandwidth_hz = coherence_bandwidth(realization, 0.5, config.bandwidth_hz);

            Impairments imp;
            imp.snr_db = config.snr_db;
            imp.cfo_hz = config.cfo_hz;
            imp.timing_offset = config.timing_offset;
            imp.noise_seed = mix_seed(seed, mcs_index);
            const IqWaveform rx = apply_channel(burst, realization, imp);

            RxConfig rxc;
            rxc.detection_threshold = config.detection_threshold;
            const auto results = receive_burst(rx, rxc);
            run.packets_detected = results.size();

            const bool aligned = results.size() == ppdus.size();
            std::vector<Mpdu> good_mpdus;

            for (size_t i = 0; i < results.size(); ++i) {
                const auto& r = results[i];
                PacketReport pr;
                pr.coarse_cfo_hz = r.sync.coarse_cfo_hz;
                pr.fine_cfo_hz = r.sync.fine_cfo_hz;
                pr.residual_cfo_hz = r.residual_cfo_hz;
                if (!r.lsig) {
                    pr.status = "HeaderFail";
                    ++run.header_fail_count;
                } else {
                    pr.mcs_index = r.lsig->mcs_index;
                    pr.n_symbols = r.csi_per_symbol.size();
                    const size_t tx_idx = i % psdus.size();
                    const bool match = aligned && r.lsig->mcs_index == mcs_index &&
                                       r.equalized_symbols.size() == tx_refs[tx_idx].size();
                    if (match) {
                        const auto ev = evm(r.equalized_symbols, tx_refs[tx_idx]);
                        pr.evm_rms_percent = ev.first;
                        pr.evm_peak_percent = ev.second;
                        pr.data_aided = true;
                        if (r.psdu.size() == psdus[tx_idx].size()) {
                            const auto b = ber(bytes_to_bits(psdus[tx_idx]), bytes_to_bits(r.psdu), true);
                            pr.ber_applicable = true;
                            pr.ber_value = *b;
                        }
                    } else {
                        pr.evm_rms_percent = r.evm_rms_percent;
                        pr.evm_peak_percent = r.evm_peak_percent;
                        pr.data_aided = false;
                    }
                    if (r.status == PacketStatus::Ok) {
                        pr.status = "Ok";
                        good_mpdus.push_back(*r.mpdu);
                    } else {
                        pr.status = "FcsFail";
                        ++run.fcs_fail_count;
                    }
                    report.evm_reports.push_back({scenario_label, mcs_index, pr.evm_rms_percent,
                                                  pr.evm_peak_percent, pr.n_symbols, pr.data_aided});
                }
                run.packets.push_back(pr);

                PacketResult trimmed;
                trimmed.sync = r.sync;
                trimmed.lsig = r.lsig;
                cfo_pool.push_back(std::move(trimmed));
            }

            run.csi_spread_db = csi_spread_db(csi_matrix(results));
            if (report.csi.empty()) report.csi = csi_matrix(results);

            // reassemble one copy of the image from FCS-clean fragments
            const auto reasm = reassemble(good_mpdus);
            if (!reasm.complete && good_mpdus.empty()) {
                run.image_integrity = "Missing";
            } else if (!reasm.complete) {
                run.image_integrity = "MissingFragments";
            } else {
                const auto dec = decode_image(reasm.payload);
                switch (dec.integrity) {
                    case ImageIntegrity::Exact: run.image_integrity = "Exact"; break;
                    case ImageIntegrity::CrcMismatch: run.image_integrity = "CrcMismatch"; break;
                    case ImageIntegrity::Truncated: run.image_integrity = "Truncated"; break;
                }
                run.image_byte_errors = compare_images(image, dec.file_bytes).first;
            }
            report.runs.push_back(std::move(run));
        }
    }
    report.cfo_by_mcs = cfo_summary(cfo_pool);
    return report;
}

std::string summary_json(const LinkReport& report) {
    json j;
    j["config"] = json::parse(config_to_json(report.config));
    json runs = json::array();
    for (const auto& r : report.runs) {
        json jr;
        jr["mcs"] = r.mcs_index;
        jr["seed"] = r.seed;
        jr["coherence_bandwidth_hz"] = r.coherence_bandwidth_hz;
        jr["packets_sent"] = r.packets_sent;
        jr["packets_detected"] = r.packets_detected;
        jr["header_fail_count"] = r.header_fail_count;
        jr["fcs_fail_count"] = r.fcs_fail_count;
        jr["image_integrity"] = r.image_integrity;
        jr["image_byte_errors"] = r.image_byte_errors;
        jr["csi_spread_db"] = r.csi_spread_db;
        json pkts = json::array();
        for (const auto& p : r.packets) {
            json jp;
            jp["status"] = p.status;
            jp["mcs"] = p.mcs_index;
            jp["evm_rms_percent"] = p.evm_rms_percent;
            jp["evm_peak_percent"] = p.evm_peak_percent;
            jp["data_aided"] = p.data_aided;
            jp["coarse_cfo_hz"] = p.coarse_cfo_hz;
            jp["fine_cfo_hz"] = p.fine_cfo_hz;
            jp["residual_cfo_hz"] = p.residual_cfo_hz;
            if (p.ber_applicable) jp["ber"] = p.ber_value;
            else jp["ber"] = nullptr;
            jp["n_symbols"] = p.n_symbols;
            pkts.push_back(jp);
        }
        jr["packets"] = pkts;
        runs.push_back(jr);
    }
    j["runs"] = runs;

    json cfo = json::object();
    for (const auto& [mcs, s] : report.cfo_by_mcs)
        cfo[std::to_string(mcs)] = {{"mean_hz", s.mean_hz}, {"std_hz", s.std_hz}, {"count", s.count}};
    j["avg_coarse_cfo_hz_by_mcs"] = cfo;

    // per-MCS median data-aided RMS/peak EVM over decoded packets
    json med = json::object();
    std::map<int, std::vector<double>> rms_by_mcs, peak_by_mcs;
    for (const auto& e : report.evm_reports) {
        rms_by_mcs[e.mcs_index].push_back(e.rms_percent);
        peak_by_mcs[e.mcs_index].push_back(e.peak_percent);
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n == 0 ? 0.0 : (n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
    };
    for (auto& [mcs, v] : rms_by_mcs)
        med[std::to_string(mcs)] = {{"rms_percent", median(v)}, {"peak_percent", median(peak_by_mcs[mcs])}};
    j["median_evm_by_mcs"] = med;
    return j.dump(2);
}

void write_report_files(const LinkReport& report, const std::string& output_dir) {
    fs::create_directories(output_dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(output_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + name + " in " + output_dir);
        out << text;
    };
    write("evm.csv", evm_csv(report.evm_reports));
    write("csi.csv", csi_csv(report.csi));
    write("cfo.csv", cfo_csv(report.cfo_by_mcs));
    write("summary.json", summary_json(report));
}

LinkReport analyze_capture(const IqWaveform& capture, const ScenarioConfig& config) {
    LinkReport report;
    report.config = config;
    RxConfig rxc;
    rxc.detection_threshold = config.detection_threshold;
    const auto results = receive_burst(capture, rxc);

    RunReport run;
    run.mcs_index = -1;
    run.packets_sent = 0;
    run.packets_detected = results.size();
    std::vector<Mpdu> good_mpdus;
    for (const auto& r : results) {
        PacketReport pr;
        pr.coarse_cfo_hz = r.sync.coarse_cfo_hz;
        pr.fine_cfo_hz = r.sync.fine_cfo_hz;
        pr.residual_cfo_hz = r.residual_cfo_hz;
        if (!r.lsig) {
            pr.status = "HeaderFail";
            ++run.header_fail_count;
        } else {
            pr.mcs_index = r.lsig->mcs_index;
            pr.n_symbols = r.csi_per_symbol.size();
            pr.evm_rms_percent = r.evm_rms_percent;
            pr.evm_peak_percent = r.evm_peak_percent;
            pr.data_aided = false;  // decision-directed on captures
            if (r.status == PacketStatus::Ok) {
                pr.status = "Ok";
                good_mpdus.push_back(*r.mpdu);
            } else {
                pr.status = "FcsFail";
                ++run.fcs_fail_count;
            }
            report.evm_reports.push_back({"capture", pr.mcs_index, pr.evm_rms_percent,
                                          pr.evm_peak_percent, pr.n_symbols, false});
        }
        run.packets.push_back(pr);
    }
    run.csi_spread_db = csi_spread_db(csi_matrix(results));
    report.csi = csi_matrix(results);
    const auto reasm = reassemble(good_mpdus);
    if (good_mpdus.empty()) run.image_integrity = "Missing";
    else if (!reasm.complete) run.image_integrity = "MissingFragments";
    else {
        const auto dec = decode_image(reasm.payload);
        run.image_integrity = dec.integrity == ImageIntegrity::Exact ? "Exact"
                             : dec.integrity == ImageIntegrity::CrcMismatch ? "CrcMismatch" : "Truncated";
    }
    report.runs.push_back(std::move(run));
    report.cfo_by_mcs = cfo_summary(results);
    return report;
}

void write_iq(const IqWaveform& waveform, const std::string& path, double center_frequency_hz) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& v : waveform.samples) {
        const float iq[2] = {float(v.real()), float(v.imag())};
        out.write(reinterpret_cast<const char*>(iq), sizeof(iq));
    }
    out.close();
    json side;
    side["sample_rate_hz"] = waveform.sample_rate;
    side["center_frequency_hz"] = center_frequency_hz;
    side["format"] = "cf32le";
    side["length_samples"] = waveform.samples.size();
    std::ofstream s(path + ".json");
    if (!s) throw std::runtime_error("cannot write sidecar for " + path);
    s << side.dump(2) << "\n";
}

IqWaveform read_iq(const std::string& path) {
    std::ifstream side_in(path + ".json");
    if (!side_in) throw std::runtime_error("missing sidecar: " + path + ".json");
    json side;
    side_in >> side;
    if (side.at("format").get<std::string>() != "cf32le")
        throw std::runtime_error("unsupported I/Q format: " + side.at("format").get<std::string>());
    const size_t n = side.at("length_samples").get<size_t>();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    in.seekg(0, std::ios::end);
    const size_t bytes = size_t(in.tellg());
    if (bytes != n * 2 * sizeof(float))
        throw std::runtime_error("I/Q file size does not match sidecar length");
    in.seekg(0);

    IqWaveform w;
    w.sample_rate = side.at("sample_rate_hz").get<double>();
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        float iq[2];
        in.read(reinterpret_cast<char*>(iq), sizeof(iq));
        w.samples[i] = Complex(iq[0], iq[1]);
    }
    return w;
}

}  // namespace cavlink
