#include "svl/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <thread>

namespace svl {

using nlohmann::json;

AnnealSchedule ExperimentConfig::make_schedule() const {
    if (!schedule.h0) throw ConfigError("config: schedule.h0 is unresolved");
    return AnnealSchedule::custom(schedule.j0, *schedule.h0, schedule.tau_q);
}

IntegrationConfig ExperimentConfig::make_integration() const {
    if (!integration.dt) throw ConfigError("config: integration.dt is unresolved");
    IntegrationConfig ic;
    ic.dt = *integration.dt;
    ic.scheme = integration.scheme;
    ic.sample_times = uniform_sample_times(schedule.tau_q, integration.samples);
    ic.record_series = outputs.series;
    ic.kink_convention = integration.kink_convention;
    return ic;
}

ExperimentConfig resolve(const ExperimentConfig& in) {
    ExperimentConfig cfg = in;
    try {
        const CirculantGraph g = cfg.make_graph();
        if (!(cfg.schedule.j0 > 0.0)) throw ConfigError("config: schedule.j0 must be > 0");
        if (!(cfg.schedule.tau_q > 0.0) || !std::isfinite(cfg.schedule.tau_q)) {
            throw ConfigError("config: schedule.tau_q must be finite and > 0");
        }
        if (!cfg.schedule.h0) cfg.schedule.h0 = 2.0 * static_cast<double>(g.range()) * cfg.schedule.j0;
        if (!(*cfg.schedule.h0 > 0.0)) throw ConfigError("config: schedule.h0 must be > 0");
        cfg.physics.validate();
        if (!cfg.integration.dt) cfg.integration.dt = default_time_step(cfg.physics, cfg.schedule.tau_q);
        if (cfg.integration.samples == 0) throw ConfigError("config: integration.samples must be >= 1");
        if (cfg.ensemble.n_trajectories < 3) throw ConfigError("config: ensemble.n_trajectories must be >= 3");
        if (cfg.outputs.directory.empty()) throw ConfigError("config: outputs.directory must not be empty");
        (void)cfg.make_schedule();
        cfg.make_integration().validate(cfg.schedule.tau_q);
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    } catch (const UnsupportedConfiguration& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

namespace {

void check_keys(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError("config: '" + std::string(section) + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError("config: unknown field '" + std::string(section) + "." + key + "'");
    }
}

template <typename T>
void read(const json& obj, std::string_view section, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: field '" + std::string(section) + "." + key + "' has the wrong type");
    }
}

void read_count(const json& obj, std::string_view section, const char* key, std::size_t& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("config: field '" + std::string(section) + "." + key + "' must be a non-negative integer");
    }
    out = v.get<std::size_t>();
}

/// Either a number or the string `auto_word`.
void read_auto(const json& obj, std::string_view section, const char* key, std::string_view auto_word,
               std::optional<double>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_string() && v.get<std::string>() == auto_word) {
        out.reset();
    } else if (v.is_number()) {
        out = v.get<double>();
    } else {
        throw ConfigError("config: field '" + std::string(section) + "." + key + "' must be a number or \"" +
                          std::string(auto_word) + "\"");
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    check_keys(j, "<root>", {"format_version", "graph", "schedule", "physics", "integration", "ensemble", "outputs"});
    if (j.contains("format_version")) {
        if (!j.at("format_version").is_number_integer() || j.at("format_version").get<int>() != kConfigFormatVersion) {
            throw ConfigError("config: unsupported format_version (expected " + std::to_string(kConfigFormatVersion) + ")");
        }
    }
    ExperimentConfig cfg;
    if (j.contains("graph")) {
        const json& g = j.at("graph");
        check_keys(g, "graph", {"n", "r"});
        read(g, "graph", "n", cfg.graph.n);
        read(g, "graph", "r", cfg.graph.r);
    }
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        check_keys(s, "schedule", {"j0", "h0", "tau_q"});
        read(s, "schedule", "j0", cfg.schedule.j0);
        read_auto(s, "schedule", "h0", "auto_2r", cfg.schedule.h0);
        read(s, "schedule", "tau_q", cfg.schedule.tau_q);
    }
    if (j.contains("physics")) {
        const json& p = j.at("physics");
        check_keys(p, "physics", {"mass", "gamma", "temperature"});
        read(p, "physics", "mass", cfg.physics.mass);
        read(p, "physics", "gamma", cfg.physics.damping);
        read(p, "physics", "temperature", cfg.physics.temperature);
    }
    if (j.contains("integration")) {
        const json& i = j.at("integration");
        check_keys(i, "integration", {"dt", "scheme", "samples", "kink_convention"});
        read_auto(i, "integration", "dt", "auto", cfg.integration.dt);
        if (i.contains("scheme")) {
            std::string name;
            read(i, "integration", "scheme", name);
            try {
                cfg.integration.scheme = scheme_from_string(name);
            } catch (const InvalidParameter& e) {
                throw ConfigError(std::string("config: integration.scheme: ") + e.what());
            }
        }
        read_count(i, "integration", "samples", cfg.integration.samples);
        if (i.contains("kink_convention")) {
            std::string name;
            read(i, "integration", "kink_convention", name);
            if (name == "open") cfg.integration.kink_convention = KinkConvention::Open;
            else if (name == "periodic") cfg.integration.kink_convention = KinkConvention::Periodic;
            else throw ConfigError("config: integration.kink_convention must be \"open\" or \"periodic\"");
        }
    }
    if (j.contains("ensemble")) {
        const json& e = j.at("ensemble");
        check_keys(e, "ensemble", {"n_trajectories", "base_seed", "max_parallelism"});
        read_count(e, "ensemble", "n_trajectories", cfg.ensemble.n_trajectories);
        read(e, "ensemble", "base_seed", cfg.ensemble.base_seed);
        read(e, "ensemble", "max_parallelism", cfg.ensemble.max_parallelism);
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        check_keys(o, "outputs", {"directory", "finals", "series", "correlator"});
        read(o, "outputs", "directory", cfg.outputs.directory);
        read(o, "outputs", "finals", cfg.outputs.finals);
        read(o, "outputs", "series", cfg.outputs.series);
        read(o, "outputs", "correlator", cfg.outputs.correlator);
    }
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["format_version"] = kConfigFormatVersion;
    j["graph"] = {{"n", cfg.graph.n}, {"r", cfg.graph.r}};
    j["schedule"] = {{"j0", cfg.schedule.j0}, {"tau_q", cfg.schedule.tau_q}};
    j["schedule"]["h0"] = cfg.schedule.h0 ? json(*cfg.schedule.h0) : json("auto_2r");
    j["physics"] = {{"mass", cfg.physics.mass}, {"gamma", cfg.physics.damping}, {"temperature", cfg.physics.temperature}};
    j["integration"] = {{"scheme", std::string(to_string(cfg.integration.scheme))},
                        {"samples", cfg.integration.samples},
                        {"kink_convention", cfg.integration.kink_convention == KinkConvention::Open ? "open" : "periodic"}};
    j["integration"]["dt"] = cfg.integration.dt ? json(*cfg.integration.dt) : json("auto");
    j["ensemble"] = {{"n_trajectories", cfg.ensemble.n_trajectories},
                     {"base_seed", cfg.ensemble.base_seed},
                     {"max_parallelism", cfg.ensemble.max_parallelism}};
    j["outputs"] = {{"directory", cfg.outputs.directory},
                    {"finals", cfg.outputs.finals},
                    {"series", cfg.outputs.series},
                    {"correlator", cfg.outputs.correlator}};
    return j;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(load_json(path)); }

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string config_fingerprint(const ExperimentConfig& c) {
    if (!c.resolved()) throw ConfigError("config_fingerprint: config is unresolved");
    std::ostringstream s;
    s << "N=" << c.graph.n << ";r=" << c.graph.r << ";tau_q=" << format_double(c.schedule.tau_q)
      << ";gamma=" << format_double(c.physics.damping) << ";T=" << format_double(c.physics.temperature)
      << ";dt=" << format_double(*c.integration.dt) << ";scheme=" << to_string(c.integration.scheme)
      << ";base_seed=" << c.ensemble.base_seed;
    return hex64(fnv1a(s.str()));
}

std::string config_digest(const ExperimentConfig& c) {
    json j = to_json(c);
    // Where and how wide a run executes does not change its results.
    j["outputs"].erase("directory");
    j["ensemble"].erase("max_parallelism");
    return hex64(fnv1a(j.dump()));
}

unsigned resolve_thread_count(std::optional<unsigned> requested, const ExperimentConfig& cfg) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv(kThreadsEnvVar); env && *env) {
        unsigned value = 0;
        const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), value);
        if (res.ec != std::errc() || *res.ptr != '\0' || value == 0) {
            throw ConfigError(std::string(kThreadsEnvVar) + " must be a positive integer");
        }
        return value;
    }
    if (cfg.ensemble.max_parallelism > 0) return cfg.ensemble.max_parallelism;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace svl
