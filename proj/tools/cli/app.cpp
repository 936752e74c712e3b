#include "app.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "mmdoppler/errors.hpp"
#include "mmdoppler/geometry.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler::cli {

namespace {

// Flags as typed by the user, in boundary units (deg, km/h, Hz).
struct LinkFlags {
    double carrier_hz = 28e9;
    double speed_kmh = 0.0;
    double theta_v_deg = 0.0;
    double theta_rx_deg = 0.0;
    double theta_tx_deg = -1.0;
    std::string gain = "flat";
    double hpbw_deg = -1.0;
    double gain_peak = 1.0;
};

struct OutputFlags {
    std::string out = "-";
    std::string manifest;
};

void add_link_flags(CLI::App* cmd, LinkFlags& f) {
    cmd->add_option("--carrier", f.carrier_hz, "carrier frequency (Hz)")->capture_default_str();
    cmd->add_option("--speed", f.speed_kmh, "receiver speed (km/h)")->required();
    cmd->add_option("--theta-v", f.theta_v_deg, "velocity angle w.r.t. line of sight (deg)")
        ->required();
    cmd->add_option("--theta-rx", f.theta_rx_deg, "RX half-power beam width (deg)")->required();
    cmd->add_option("--theta-tx", f.theta_tx_deg, "TX half-power beam width (deg, default: RX)");
    cmd->add_option("--gain", f.gain, "receive gain pattern")
        ->check(CLI::IsMember({"flat", "parametric"}))
        ->capture_default_str();
    cmd->add_option("--hpbw", f.hpbw_deg, "parametric gain half-power width (deg, default: RX)");
    cmd->add_option("--gain-peak", f.gain_peak, "peak linear gain")->capture_default_str();
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
    cmd->add_option("-o,--out", f.out, "data output path ('-' for stdout)")->capture_default_str();
    cmd->add_option("--manifest", f.manifest,
                    "manifest path (default: <out>.manifest.json, or stderr for stdout output)");
}

LinkParams resolve(const LinkFlags& f) {
    LinkParams l;
    l.carrier_hz = f.carrier_hz;
    l.speed_mps = kmh_to_mps(f.speed_kmh);
    l.theta_v_rad = deg_to_rad(f.theta_v_deg);
    l.theta_rx_rad = deg_to_rad(f.theta_rx_deg);
    l.theta_tx_rad = f.theta_tx_deg < 0.0 ? l.theta_rx_rad : deg_to_rad(f.theta_tx_deg);
    if (f.gain == "flat") {
        l.gain = GainPattern::flat(f.gain_peak);
    } else {
        l.gain = GainPattern::parametric(f.hpbw_deg < 0.0 ? l.theta_rx_rad : deg_to_rad(f.hpbw_deg),
                                         f.gain_peak);
    }
    return l;
}

void write_file(const std::string& path, const std::string& content, std::ostream& out) {
    if (path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw UsageError(fmt::format("cannot open '{}' for writing", path));
    }
    file << content;
    if (!file) {
        throw UsageError(fmt::format("failed writing '{}'", path));
    }
}

void emit(const std::string& subcommand, const CommandOutput& result, const OutputFlags& flags,
          const std::string& extra_path, std::ostream& out, std::ostream& err) {
    for (const auto& w : result.warnings) {
        err << "warning: " << w << '\n';
    }
    write_file(flags.out, result.data, out);
    if (result.extra) {
        if (extra_path.empty()) {
            throw UsageError("secondary output requested without a path");
        }
        write_file(extra_path, *result.extra, out);
    }
    const auto manifest = make_manifest(subcommand, result, flags.out, extra_path).dump(2) + "\n";
    if (!flags.manifest.empty()) {
        write_file(flags.manifest, manifest, out);
    } else if (flags.out != "-") {
        write_file(flags.out + ".manifest.json", manifest, out);
    } else {
        err << manifest;
    }
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Doppler spectra of beamformed mmWave links", kToolName};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // spectrum
    LinkFlags spec_link;
    OutputFlags spec_out;
    SpectrumParams spec;
    std::string spec_mode = "exact";
    std::string spec_clusters;
    auto* spectrum = app.add_subcommand("spectrum", "sample the Doppler power spectrum");
    add_link_flags(spectrum, spec_link);
    add_output_flags(spectrum, spec_out);
    spectrum->add_option("--mode", spec_mode, "density evaluation")
        ->check(CLI::IsMember({"exact", "single-branch"}))
        ->capture_default_str();
    spectrum->add_option("--grid-points", spec.grid_points, "frequency grid size")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}))
        ->capture_default_str();
    spectrum->add_option("--range", spec.range, "grid span")
        ->check(CLI::IsMember({"full", "support"}))
        ->capture_default_str();
    spectrum->add_option("--endpoint-cap", spec.endpoint_cap,
                         "value written at the integrable singularity |f| = f_dmax")
        ->capture_default_str();
    spectrum->add_option("--clusters", spec_clusters,
                         "angular clusters '[M@]center:width:power,...' (deg)");
    spectrum->add_option("--format", spec.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // approx
    LinkFlags approx_link;
    OutputFlags approx_out;
    auto* approx = app.add_subcommand("approx", "small-beamwidth shift and spread vs exact");
    add_link_flags(approx, approx_link);
    add_output_flags(approx, approx_out);

    // oracle
    LinkFlags oracle_link;
    OutputFlags oracle_out;
    OracleParams oracle_params;
    std::string oracle_mode = "exact";
    auto* oracle = app.add_subcommand("oracle", "Monte Carlo Doppler histogram");
    add_link_flags(oracle, oracle_link);
    add_output_flags(oracle, oracle_out);
    oracle->add_option("--samples", oracle_params.samples, "number of rays")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    oracle->add_option("--bins", oracle_params.bins, "histogram bins")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}))
        ->capture_default_str();
    oracle->add_option("--seed", oracle_params.seed, "RNG seed")->required();
    oracle->add_flag("--analytic", oracle_params.analytic, "add the closed-form bin means");
    oracle->add_option("--mode", oracle_mode, "closed-form evaluation for --analytic")
        ->check(CLI::IsMember({"exact", "single-branch"}))
        ->capture_default_str();

    // fade
    LinkFlags fade_link;
    OutputFlags fade_out;
    FadeParams fade_params;
    double fade_rate = 0.0;
    std::string fade_psd_out;
    auto* fade = app.add_subcommand("fade", "sum-of-sinusoids fading realisation");
    add_link_flags(fade, fade_link);
    add_output_flags(fade, fade_out);
    fade->add_option("--paths", fade_params.paths, "number of sinusoids")->capture_default_str();
    fade->add_option("--duration", fade_params.duration_s, "record length (s)")
        ->capture_default_str();
    fade->add_option("--sample-rate", fade_rate, "sample rate (Hz, default: 4 f_dmax, min 1 kHz)");
    fade->add_option("--seed", fade_params.seed, "RNG seed")->required();
    fade->add_option("--psd-out", fade_psd_out, "also write a Welch PSD estimate here");
    fade->add_option("--segment", fade_params.segment, "Welch segment length")
        ->capture_default_str();
    fade->add_option("--overlap", fade_params.overlap, "Welch segment overlap fraction")
        ->capture_default_str();

    // train
    OutputFlags train_out;
    std::string train_config;
    std::string train_mode;
    double train_fixed = -1.0;
    auto* train = app.add_subcommand("train", "high-speed-train beam width control scenario");
    add_output_flags(train, train_out);
    train->add_option("--config", train_config, "scenario JSON file")->required();
    train->add_option("--spread-mode", train_mode, "override the config's spread mode")
        ->check(CLI::IsMember({"approx", "exact"}));
    train->add_option("--fixed-beamwidth", train_fixed,
                      "pin the receive beam width (deg) instead of the speed law");

    // replay
    OutputFlags replay_out;
    std::string replay_manifest;
    std::string replay_psd_out;
    auto* rerun = app.add_subcommand("replay", "re-run a subcommand from its manifest");
    rerun->add_option("source", replay_manifest, "manifest JSON to replay")->required();
    add_output_flags(rerun, replay_out);
    rerun->add_option("--psd-out", replay_psd_out, "secondary output path (fade)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        for (auto* sub : app.get_subcommands()) {
            err << sub->help();
        }
        return kUsage;
    }

    try {
        if (spectrum->parsed()) {
            spec.link = resolve(spec_link);
            spec.mode = parse_pdf_mode(spec_mode);
            if (!spec_clusters.empty()) {
                spec.clusters = parse_clusters(spec_clusters);
            }
            emit("spectrum", run_spectrum(spec), spec_out, "", out, err);
        } else if (approx->parsed()) {
            emit("approx", run_approx(ApproxParams{resolve(approx_link)}), approx_out, "", out, err);
        } else if (oracle->parsed()) {
            oracle_params.link = resolve(oracle_link);
            oracle_params.mode = parse_pdf_mode(oracle_mode);
            emit("oracle", run_oracle(oracle_params), oracle_out, "", out, err);
        } else if (fade->parsed()) {
            fade_params.link = resolve(fade_link);
            const double f_dmax = max_doppler(fade_params.link.speed_mps, fade_params.link.carrier_hz);
            fade_params.sample_rate_hz = fade_rate > 0.0 ? fade_rate : std::max(4.0 * f_dmax, 1e3);
            fade_params.psd = !fade_psd_out.empty();
            emit("fade", run_fade(fade_params), fade_out, fade_psd_out, out, err);
        } else if (train->parsed()) {
            std::ifstream file(train_config);
            if (!file) {
                throw UsageError(fmt::format("cannot read config '{}'", train_config));
            }
            std::stringstream text;
            text << file.rdbuf();
            TrainParams params{scenario_from_json(text.str())};
            if (train_mode == "approx") {
                params.config.spread_mode = SpreadMode::Approx;
            } else if (train_mode == "exact") {
                params.config.spread_mode = SpreadMode::Exact;
            }
            if (train_fixed > 0.0) {
                params.config.policy.theta_min_deg = train_fixed;
                params.config.policy.theta_max_deg = train_fixed;
            }
            emit("train", run_train(params), train_out, "", out, err);
        } else if (rerun->parsed()) {
            std::ifstream file(replay_manifest);
            if (!file) {
                throw UsageError(fmt::format("cannot read manifest '{}'", replay_manifest));
            }
            nlohmann::json manifest;
            try {
                manifest = nlohmann::json::parse(file);
            } catch (const nlohmann::json::exception& e) {
                throw UsageError(fmt::format("manifest is not valid JSON: {}", e.what()));
            }
            const std::string cmd = manifest.value("subcommand", "");
            emit(cmd, replay(manifest), replay_out, replay_psd_out, out, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace mmdoppler::cli
