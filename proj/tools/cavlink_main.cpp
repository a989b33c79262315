#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cavlink/imaging.hpp"
#include "cavlink/scenario.hpp"

namespace {

int cmd_simulate(const std::string& config_path, const std::string& output_dir_override) {
    cavlink::ScenarioConfig config = cavlink::load_config(config_path);
    if (!output_dir_override.empty()) config.output_dir = output_dir_override;
    const auto report = cavlink::run_scenario(config);
    cavlink::write_report_files(report, config.output_dir);

    size_t ok = 0, header_fail = 0, fcs_fail = 0;
    for (const auto& run : report.runs) {
        header_fail += run.header_fail_count;
        fcs_fail += run.fcs_fail_count;
        for (const auto& p : run.packets)
            if (p.status == "Ok") ++ok;
    }
    std::cout << "runs: " << report.runs.size() << "  packets ok: " << ok
              << "  header failures: " << header_fail << "  fcs failures: " << fcs_fail << "\n"
              << "reports written to " << config.output_dir << "\n";
    return 0;  // decode failures are experimental outcomes, not tool errors
}

int cmd_analyze(const std::string& iq_path, const std::string& config_path,
                const std::string& output_dir_override) {
    cavlink::ScenarioConfig config = cavlink::load_config(config_path);
    if (!output_dir_override.empty()) config.output_dir = output_dir_override;
    const auto capture = cavlink::read_iq(iq_path);
    const auto report = cavlink::analyze_capture(capture, config);
    cavlink::write_report_files(report, config.output_dir);
    if (report.runs.front().packets_detected == 0)
        std::cout << "warning: no packets found in capture\n";
    else
        std::cout << "packets detected: " << report.runs.front().packets_detected << "\n";
    std::cout << "reports written to " << config.output_dir << "\n";
    return 0;
}

int cmd_make_testimage(const std::string& path) {
    const auto img = cavlink::make_test_image();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out.write(reinterpret_cast<const char*>(img.data()), long(img.size()));
    std::cout << "wrote " << img.size() << " bytes to " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-field OFDM link simulator for reverberant enclosures"};
    app.require_subcommand(1);

    std::string config_path, iq_path, image_path, output_dir;

    auto* sim = app.add_subcommand("simulate", "run an end-to-end scenario from a config file");
    sim->add_option("config", config_path, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("-o,--output-dir", output_dir, "override the config's output directory");

    auto* ana = app.add_subcommand("analyze", "decode a recorded cf32le I/Q capture");
    ana->add_option("iqfile", iq_path, "I/Q capture (cf32le + JSON sidecar)")->required()->check(CLI::ExistingFile);
    ana->add_option("config", config_path, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
    ana->add_option("-o,--output-dir", output_dir, "override the config's output directory");

    auto* mk = app.add_subcommand("make-testimage", "write the bundled deterministic test pattern");
    mk->add_option("path", image_path, "output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, output_dir);
        if (ana->parsed()) return cmd_analyze(iq_path, config_path, output_dir);
        if (mk->parsed()) return cmd_make_testimage(image_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
