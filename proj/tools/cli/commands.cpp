#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <sstream>

#include "mmdoppler/approx.hpp"
#include "mmdoppler/errors.hpp"
#include "mmdoppler/fading.hpp"
#include "mmdoppler/geometry.hpp"
#include "mmdoppler/oracle.hpp"
#include "mmdoppler/quadrature.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler::cli {

using nlohmann::json;

namespace {

BeamGeometry geometry_of(const LinkParams& link) {
    return make_geometry(link.theta_tx_rad, link.theta_rx_rad, link.theta_v_rad);
}

MotionState motion_of(const LinkParams& link) {
    return make_motion(link.speed_mps, link.carrier_hz);
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

json gain_json(const GainPattern& g) {
    return {{"kind", g.kind == GainKind::Flat ? "flat" : "parametric"},
            {"hpbw_rad", g.hpbw},
            {"peak", g.peak}};
}

GainPattern gain_from(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "flat") {
        return GainPattern::flat(j.at("peak").get<double>());
    }
    if (kind == "parametric") {
        return GainPattern::parametric(j.at("hpbw_rad").get<double>(), j.at("peak").get<double>());
    }
    throw UsageError(fmt::format("unknown gain kind '{}'", kind));
}

json link_json(const LinkParams& l) {
    return {{"carrier_hz", l.carrier_hz},     {"speed_mps", l.speed_mps},
            {"theta_v_rad", l.theta_v_rad},   {"theta_rx_rad", l.theta_rx_rad},
            {"theta_tx_rad", l.theta_tx_rad}, {"gain", gain_json(l.gain)}};
}

LinkParams link_from(const json& j) {
    LinkParams l;
    l.carrier_hz = j.at("carrier_hz").get<double>();
    l.speed_mps = j.at("speed_mps").get<double>();
    l.theta_v_rad = j.at("theta_v_rad").get<double>();
    l.theta_rx_rad = j.at("theta_rx_rad").get<double>();
    l.theta_tx_rad = j.at("theta_tx_rad").get<double>();
    l.gain = gain_from(j.at("gain"));
    return l;
}

void require_moving(const MotionState& motion, const char* what) {
    if (!(motion.f_dmax > 0.0)) {
        throw DomainError(fmt::format(
            "{} needs a moving receiver: at zero speed the spectrum is a single line at 0 Hz",
            what));
    }
}

}  // namespace

// ---------------------------------------------------------------- spectrum

CommandOutput run_spectrum(const SpectrumParams& p) {
    const BeamGeometry geom = geometry_of(p.link);
    const MotionState motion = motion_of(p.link);
    require_moving(motion, "spectrum");
    if (p.format != "csv" && p.format != "json") {
        throw UsageError(fmt::format("unknown format '{}'", p.format));
    }
    if (!std::isfinite(p.endpoint_cap)) {
        throw UsageError("endpoint cap must be finite");
    }

    CommandOutput out;
    out.parameters = to_json(p);
    append(out.warnings, validity_warnings(geom));

    const EvalOptions eval{p.endpoint_cap};
    const bool clustered = !p.clusters.empty();
    Density density;
    std::vector<double> breaks;
    double lo = 0.0;
    double hi = 0.0;
    json segments = json::array();
    if (clustered) {
        append(out.warnings, cluster_warnings(p.clusters, geom));
        density = [&](double f) {
            return multicluster_psd(f, p.clusters, geom, motion, p.link.gain, eval);
        };
        breaks = multicluster_breakpoints(p.clusters, geom, motion);
        const auto segs = cluster_segments(p.clusters, geom, motion);
        lo = motion.f_dmax;
        hi = -motion.f_dmax;
        for (const auto& s : segs) {
            segments.push_back({{"f_lo_hz", s.f_lo}, {"f_hi_hz", s.f_hi}});
            lo = std::min(lo, s.f_lo);
            hi = std::max(hi, s.f_hi);
        }
        if (segs.empty()) {
            lo = hi = 0.0;
        }
    } else {
        density = [&](double f) {
            return doppler_psd(f, geom, motion, p.link.gain, p.mode, eval);
        };
        breaks = pdf_breakpoints(geom, motion);
        const DopplerSupport s = doppler_support(geom, motion);
        lo = s.f_lo;
        hi = s.f_hi;
        segments.push_back({{"f_lo_hz", s.f_lo}, {"f_hi_hz", s.f_hi}});
    }

    // Quadrature always works with the true singular density.
    Density singular = clustered ? Density([&](double f) {
        return multicluster_psd(f, p.clusters, geom, motion, p.link.gain);
    })
                                 : Density([&](double f) {
                                       return doppler_psd(f, geom, motion, p.link.gain, p.mode);
                                   });
    const double total = integrate_psd(singular, -motion.f_dmax, motion.f_dmax, motion.f_dmax, breaks);

    SpectrumSamples samples;
    if (p.range == "full") {
        samples = sample_spectrum(density, motion.f_dmax, p.grid_points, std::string(to_string(p.mode)));
    } else if (p.range == "support") {
        if (p.grid_points < 2) {
            throw UsageError("grid needs at least 2 points");
        }
        samples.f_dmax = motion.f_dmax;
        samples.mode = std::string(to_string(p.mode));
        const double step = (hi - lo) / static_cast<double>(p.grid_points - 1);
        for (std::size_t i = 0; i < p.grid_points; ++i) {
            const double f = i + 1 == p.grid_points ? hi : lo + step * static_cast<double>(i);
            samples.freqs.push_back(f);
            samples.values.push_back(density(f));
        }
    } else {
        throw UsageError(fmt::format("unknown range '{}' (full|support)", p.range));
    }

    out.summary = {{"f_dmax_hz", motion.f_dmax},
                   {"total_power", total},
                   {"support_lo_hz", lo},
                   {"support_hi_hz", hi},
                   {"segments", segments}};

    if (p.format == "csv") {
        out.data_schema = "spectrum-csv/v1";
        std::string s = "freq_hz,psd\n";
        for (std::size_t i = 0; i < samples.freqs.size(); ++i) {
            s += num(samples.freqs[i]) + "," + num(samples.values[i]) + "\n";
        }
        out.data = std::move(s);
    } else {
        out.data_schema = "spectrum-json/v1";
        json doc;
        doc["schema_version"] = 1;
        doc["meta"] = out.summary;
        doc["meta"]["mode"] = samples.mode;
        doc["meta"]["gain"] = gain_json(p.link.gain);
        doc["meta"]["clusters"] = p.clusters.size();
        doc["freqs"] = samples.freqs;
        doc["psd"] = samples.values;
        out.data = doc.dump() + "\n";
    }
    return out;
}

json to_json(const SpectrumParams& p) {
    json clusters = json::array();
    for (const auto& c : p.clusters) {
        clusters.push_back({{"center_rad", c.center}, {"width_rad", c.width}, {"power", c.power}});
    }
    return {{"link", link_json(p.link)},
            {"mode", std::string(to_string(p.mode))},
            {"grid_points", p.grid_points},
            {"range", p.range},
            {"endpoint_cap", p.endpoint_cap},
            {"clusters", clusters},
            {"format", p.format}};
}

SpectrumParams spectrum_from_json(const json& j) {
    SpectrumParams p;
    p.link = link_from(j.at("link"));
    p.mode = parse_pdf_mode(j.at("mode").get<std::string>());
    p.grid_points = j.at("grid_points").get<std::size_t>();
    p.range = j.at("range").get<std::string>();
    p.endpoint_cap = j.at("endpoint_cap").get<double>();
    for (const auto& c : j.at("clusters")) {
        p.clusters.push_back(Cluster{c.at("center_rad").get<double>(), c.at("width_rad").get<double>(),
                                     c.at("power").get<double>()});
    }
    p.format = j.at("format").get<std::string>();
    return p;
}

ClusterSet parse_clusters(const std::string& text) {
    std::string body = text;
    std::optional<std::size_t> expected;
    if (const auto at = body.find('@'); at != std::string::npos) {
        try {
            expected = std::stoul(body.substr(0, at));
        } catch (const std::exception&) {
            throw UsageError(fmt::format("bad cluster count in '{}'", text));
        }
        body = body.substr(at + 1);
    }
    ClusterSet out;
    std::stringstream items(body);
    std::string item;
    while (std::getline(items, item, ',')) {
        std::stringstream fields(item);
        std::string a, b, c;
        if (!std::getline(fields, a, ':') || !std::getline(fields, b, ':') ||
            !std::getline(fields, c, ':')) {
            throw UsageError(fmt::format("cluster '{}' must be center:width:power", item));
        }
        try {
            out.push_back(Cluster{deg_to_rad(std::stod(a)), deg_to_rad(std::stod(b)), std::stod(c)});
        } catch (const std::exception&) {
            throw UsageError(fmt::format("cluster '{}' has a non-numeric field", item));
        }
    }
    if (out.empty()) {
        throw UsageError("cluster list is empty");
    }
    if (expected && *expected != out.size()) {
        throw UsageError(
            fmt::format("cluster count {} does not match {} listed clusters", *expected, out.size()));
    }
    return out;
}

// ---------------------------------------------------------------- approx

CommandOutput run_approx(const ApproxParams& p) {
    const BeamGeometry geom = geometry_of(p.link);
    const MotionState motion = motion_of(p.link);
    const ApproxShiftSpread a = approx_shift_spread(geom.theta_v, geom.theta_rx, motion.f_dmax);
    const DopplerSupport exact = doppler_support(geom, motion);

    CommandOutput out;
    out.parameters = to_json(p);
    append(out.warnings, validity_warnings(geom));
    if (a.outside_small_angle) {
        out.warnings.push_back(fmt::format(
            "receive beam width {:.3f} deg exceeds the 20 deg small-angle range of the "
            "approximation",
            rad_to_deg(geom.theta_rx)));
    }
    out.data_schema = "approx-csv/v1";
    out.data =
        "theta_v_rad,theta_rx_rad,f_dmax_hz,region,approx_shift_hz,approx_spread_hz,"
        "exact_shift_hz,exact_spread_hz\n";
    out.data += fmt::format("{},{},{},{},{},{},{},{}\n", num(geom.theta_v), num(geom.theta_rx),
                            num(motion.f_dmax), to_string(a.region), num(a.shift), num(a.spread),
                            num(exact.shift), num(exact.spread));
    out.summary = {{"region", std::string(to_string(a.region))},
                   {"approx_shift_hz", a.shift},
                   {"approx_spread_hz", a.spread},
                   {"exact_shift_hz", exact.shift},
                   {"exact_spread_hz", exact.spread}};
    return out;
}

json to_json(const ApproxParams& p) { return {{"link", link_json(p.link)}}; }

ApproxParams approx_from_json(const json& j) { return ApproxParams{link_from(j.at("link"))}; }

// ---------------------------------------------------------------- oracle

CommandOutput run_oracle(const OracleParams& p) {
    const BeamGeometry geom = geometry_of(p.link);
    const MotionState motion = motion_of(p.link);
    CommandOutput out;
    out.parameters = to_json(p);
    out.seeds = {p.seed};
    append(out.warnings, validity_warnings(geom));

    const DopplerSamples samples = sample_doppler(geom, motion, p.link.gain, p.samples, p.seed);
    const Histogram hist = empirical_pdf(samples, p.bins);

    std::vector<double> analytic;
    if (p.analytic) {
        require_moving(motion, "analytic overlay");
        const auto breaks = pdf_breakpoints(geom, motion);
        const Density psd = [&](double f) {
            return doppler_psd(f, geom, motion, p.link.gain, p.mode);
        };
        // Thinned samples follow the gain-weighted spectrum normalised to unit mass.
        const double mass = integrate_psd(psd, -motion.f_dmax, motion.f_dmax, motion.f_dmax, breaks);
        const Density normalised = [&](double f) { return psd(f) / mass; };
        const Histogram ref = analytic_histogram(normalised, hist.edges, motion.f_dmax, breaks);
        analytic = ref.densities;
        out.summary["l1_distance"] = l1_distance(hist, normalised, motion.f_dmax, breaks);
    }

    out.data_schema = p.analytic ? "histogram-csv/v1+analytic" : "histogram-csv/v1";
    std::string s = p.analytic ? "bin_lo_hz,bin_hi_hz,density,analytic\n" : "bin_lo_hz,bin_hi_hz,density\n";
    for (std::size_t i = 0; i < hist.densities.size(); ++i) {
        s += num(hist.edges[i]) + "," + num(hist.edges[i + 1]) + "," + num(hist.densities[i]);
        if (p.analytic) {
            s += "," + num(analytic[i]);
        }
        s += "\n";
    }
    out.data = std::move(s);
    out.summary["f_dmax_hz"] = motion.f_dmax;
    out.summary["samples"] = samples.count;
    out.summary["support_lo_hz"] = samples.support_lo;
    out.summary["support_hi_hz"] = samples.support_hi;
    return out;
}

json to_json(const OracleParams& p) {
    return {{"link", link_json(p.link)}, {"samples", p.samples},
            {"bins", p.bins},            {"seed", p.seed},
            {"analytic", p.analytic},    {"mode", std::string(to_string(p.mode))}};
}

OracleParams oracle_from_json(const json& j) {
    OracleParams p;
    p.link = link_from(j.at("link"));
    p.samples = j.at("samples").get<std::size_t>();
    p.bins = j.at("bins").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.analytic = j.at("analytic").get<bool>();
    p.mode = parse_pdf_mode(j.at("mode").get<std::string>());
    return p;
}

// ---------------------------------------------------------------- fade

CommandOutput run_fade(const FadeParams& p) {
    const BeamGeometry geom = geometry_of(p.link);
    const MotionState motion = motion_of(p.link);
    CommandOutput out;
    out.parameters = to_json(p);
    out.seeds = {p.seed};
    append(out.warnings, validity_warnings(geom));

    const FadingRealization r = generate_fading(geom, motion, p.link.gain, p.paths, p.duration_s,
                                                p.sample_rate_hz, p.seed);
    append(out.warnings, r.warnings);

    out.data_schema = "fading-csv/v1";
    std::string s = "t_s,re,im\n";
    s.reserve(s.size() + r.samples.size() * 64);
    for (std::size_t k = 0; k < r.samples.size(); ++k) {
        const double t = static_cast<double>(k) / r.sample_rate;
        s += num(t) + "," + num(r.samples[k].real()) + "," + num(r.samples[k].imag()) + "\n";
    }
    out.data = std::move(s);

    const double spread = doppler_support(geom, motion).spread;
    out.summary["mean_power"] = mean_power(r);
    out.summary["analytic_coherence_time_s"] =
        spread > 0.0 ? json(coherence_time(spread)) : json("inf");
    try {
        out.summary["empirical_coherence_time_s"] = coherence_time(r);
    } catch (const DomainError& e) {
        out.warnings.push_back(e.what());
    }

    if (p.psd) {
        const SpectrumSamples est = estimate_psd(r, p.segment, p.overlap);
        out.extra_schema = "psd-csv/v1";
        std::string e = "freq_hz,psd\n";
        for (std::size_t i = 0; i < est.freqs.size(); ++i) {
            e += num(est.freqs[i]) + "," + num(est.values[i]) + "\n";
        }
        out.extra = std::move(e);
    }
    return out;
}

json to_json(const FadeParams& p) {
    return {{"link", link_json(p.link)},
            {"paths", p.paths},
            {"duration_s", p.duration_s},
            {"sample_rate_hz", p.sample_rate_hz},
            {"seed", p.seed},
            {"segment", p.segment},
            {"overlap", p.overlap},
            {"psd", p.psd}};
}

FadeParams fade_from_json(const json& j) {
    FadeParams p;
    p.link = link_from(j.at("link"));
    p.paths = j.at("paths").get<std::size_t>();
    p.duration_s = j.at("duration_s").get<double>();
    p.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.segment = j.at("segment").get<std::size_t>();
    p.overlap = j.at("overlap").get<double>();
    p.psd = j.at("psd").get<bool>();
    return p;
}

// ---------------------------------------------------------------- train

CommandOutput run_train(const TrainParams& p) {
    const ScenarioTrace trace = simulate(p.config);
    CommandOutput out;
    out.parameters = to_json(p);
    out.data_schema = "trace-csv/v1";
    std::ostringstream os;
    write_trace_csv(os, trace);
    out.data = os.str();

    double max_spread = 0.0;
    for (const auto& r : trace.rows) {
        max_spread = std::max(max_spread, r.spread);
    }
    json abeam = json::array();
    for (std::size_t i : abeam_rows(trace, p.config.stations)) {
        abeam.push_back({{"row", i}, {"serving_bs", trace.rows[i].serving_bs},
                         {"speed_mps", trace.rows[i].speed}, {"spread_hz", trace.rows[i].spread}});
    }
    out.summary = {{"rows", trace.rows.size()},
                   {"handovers", trace.handover_count()},
                   {"max_spread_hz", max_spread},
                   {"abeam", abeam}};
    return out;
}

json to_json(const TrainParams& p) { return {{"config", json::parse(scenario_to_json(p.config))}}; }

TrainParams train_from_json(const json& j) {
    return TrainParams{scenario_from_json(j.at("config").dump())};
}

// ---------------------------------------------------------------- manifest

json make_manifest(const std::string& subcommand, const CommandOutput& out,
                   const std::string& data_path, const std::string& extra_path) {
    json m;
    m["schema_version"] = kManifestSchema;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["timestamp"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                                 fmt::gmtime(std::chrono::system_clock::to_time_t(
                                     std::chrono::system_clock::now())));
    m["seeds"] = out.seeds;
    m["parameters"] = out.parameters;
    m["outputs"] = {{"data", data_path}, {"data_schema", out.data_schema}};
    if (out.extra) {
        m["outputs"]["extra"] = extra_path;
        m["outputs"]["extra_schema"] = out.extra_schema;
    }
    m["summary"] = out.summary;
    m["warnings"] = out.warnings;
    return m;
}

CommandOutput replay(const json& manifest) {
    if (!manifest.contains("schema_version") || manifest["schema_version"] != kManifestSchema) {
        throw UsageError("unsupported manifest schema version");
    }
    const std::string cmd = manifest.at("subcommand").get<std::string>();
    const json& params = manifest.at("parameters");
    try {
        if (cmd == "spectrum") {
            return run_spectrum(spectrum_from_json(params));
        }
        if (cmd == "approx") {
            return run_approx(approx_from_json(params));
        }
        if (cmd == "oracle") {
            return run_oracle(oracle_from_json(params));
        }
        if (cmd == "fade") {
            return run_fade(fade_from_json(params));
        }
        if (cmd == "train") {
            return run_train(train_from_json(params));
        }
    } catch (const json::exception& e) {
        throw UsageError(fmt::format("malformed manifest parameters: {}", e.what()));
    }
    throw UsageError(fmt::format("manifest names unknown subcommand '{}'", cmd));
}

}  // namespace mmdoppler::cli
