#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmdoppler/spectrum.hpp"
#include "mmdoppler/train.hpp"

namespace mmdoppler::cli {

inline constexpr const char* kToolName = "mmdoppler";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kManifestSchema = 1;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every parameter struct holds resolved values in SI units (radians, m/s,
// Hz, seconds). Degrees and km/h exist only in the flag parsing layer.

struct LinkParams {
    double carrier_hz = 28e9;
    double speed_mps = 0.0;
    double theta_v_rad = 0.0;
    double theta_rx_rad = 0.0;
    double theta_tx_rad = 0.0;
    GainPattern gain;
};

struct SpectrumParams {
    LinkParams link;
    PdfMode mode = PdfMode::Exact;
    std::size_t grid_points = 1001;
    std::string range = "full";  ///< "full" = [-f_dmax, f_dmax], "support" = Doppler support
    double endpoint_cap = 0.0;
    ClusterSet clusters;
    std::string format = "csv";
};

struct ApproxParams {
    LinkParams link;
};

struct OracleParams {
    LinkParams link;
    std::size_t samples = 1'000'000;
    std::size_t bins = 200;
    std::uint64_t seed = 0;
    bool analytic = false;
    PdfMode mode = PdfMode::Exact;
};

struct FadeParams {
    LinkParams link;
    std::size_t paths = 256;
    double duration_s = 1.0;
    double sample_rate_hz = 0.0;
    std::uint64_t seed = 0;
    std::size_t segment = 1024;
    double overlap = 0.5;
    bool psd = false;  ///< also emit a Welch PSD estimate
};

struct TrainParams {
    ScenarioConfig config;
};

/// Result of one subcommand: serialised data plus what the manifest needs.
struct CommandOutput {
    std::string data;
    std::optional<std::string> extra;  ///< secondary file (fade PSD)
    std::string data_schema;
    std::string extra_schema;
    nlohmann::json parameters;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> warnings;
};

CommandOutput run_spectrum(const SpectrumParams& p);
CommandOutput run_approx(const ApproxParams& p);
CommandOutput run_oracle(const OracleParams& p);
CommandOutput run_fade(const FadeParams& p);
CommandOutput run_train(const TrainParams& p);

nlohmann::json to_json(const SpectrumParams& p);
nlohmann::json to_json(const ApproxParams& p);
nlohmann::json to_json(const OracleParams& p);
nlohmann::json to_json(const FadeParams& p);
nlohmann::json to_json(const TrainParams& p);

SpectrumParams spectrum_from_json(const nlohmann::json& j);
ApproxParams approx_from_json(const nlohmann::json& j);
OracleParams oracle_from_json(const nlohmann::json& j);
FadeParams fade_from_json(const nlohmann::json& j);
TrainParams train_from_json(const nlohmann::json& j);

/// "[M@]center:width:power[,center:width:power...]" with angles in degrees.
ClusterSet parse_clusters(const std::string& text);

/// Manifest describing a run; `timestamp` is the only non-reproducible field.
nlohmann::json make_manifest(const std::string& subcommand, const CommandOutput& out,
                             const std::string& data_path, const std::string& extra_path);

/// Re-executes the subcommand recorded in a manifest.
CommandOutput replay(const nlohmann::json& manifest);

}  // namespace mmdoppler::cli
