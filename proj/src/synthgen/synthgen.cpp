#include "tssid/synthgen/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "tssid/error.hpp"
#include "tssid/numeric/rk4.hpp"

namespace tssid::synthgen {

namespace {

std::size_t sample_count(double duration_s, double rate) {
    return static_cast<std::size_t>(std::llround(duration_s * rate));
}

// Decorrelates per-channel noise streams drawn from one flight seed.
std::uint64_t channel_seed(std::uint64_t seed, std::uint64_t index) {
    return seed + 0x9E3779B97F4A7C15ULL * (index + 1);
}

}  // namespace

void GroundTruthParams::validate() const {
    if (order == EngineOrder::First) {
        if (!(b > 0.0)) throw Error(ErrorCode::UnstableParameters, "first-order model needs b > 0");
    } else {
        if (!(tau1 > 0.0) || !(tau2 > 0.0)) throw Error(ErrorCode::UnstableParameters, "time constants must be > 0");
        if (!(mu > 0.0)) throw Error(ErrorCode::UnstableParameters, "gain mu must be > 0");
    }
    for (const auto& [name, sigma] : noise_sigma) {
        if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidProfile, "noise sigma for " + name + " must be >= 0");
    }
}

double GroundTruthParams::steady_state(double wf) const {
    return order == EngineOrder::First ? (c * wf - a) / b : mu * wf;
}

std::string ManeuverProfile::effective_label() const { return label.empty() ? to_string(kind) : label; }

double AuxMap::operator()(double wf) const { return std::clamp(offset + gain * wf, lo, hi); }

std::map<std::string, AuxMap> default_aux_maps() {
    return {
        {"COL", {5.0, 0.12, 0.0, 100.0}},        // %
        {"NR", {101.5, -0.004, 90.0, 110.0}},    // %
        {"T1", {15.0, 0.01, -60.0, 60.0}},       // degC
        {"P0", {14.7, -0.002, 5.0, 20.0}},       // psi
        {"AIRSPEED", {-60.0, 0.4, 0.0, 170.0}},  // kts
    };
}

std::vector<double> generate_wf_profile(std::span<const ManeuverProfile> profiles, double sample_rate_hz,
                                        std::uint64_t seed) {
    if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidProfile, "sample rate must be positive");
    if (profiles.empty()) throw Error(ErrorCode::InvalidProfile, "profile list is empty");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    const double nyquist = 0.5 * sample_rate_hz;
    std::vector<double> wf;
    for (const auto& p : profiles) {
        const std::size_t n = sample_count(p.duration_s, sample_rate_hz);
        if (!(p.duration_s > 0.0) || n == 0) {
            throw Error(ErrorCode::InvalidProfile, p.effective_label() + ": duration must cover at least one sample");
        }
        const double T = static_cast<double>(n) / sample_rate_hz;
        switch (p.kind) {
            case ProfileKind::Hold:
                wf.insert(wf.end(), n, p.level);
                break;
            case ProfileKind::Step: {
                const auto step_idx = sample_count(p.step_time_s, sample_rate_hz);
                for (std::size_t i = 0; i < n; ++i) wf.push_back(i < step_idx ? p.level : p.target);
                break;
            }
            case ProfileKind::Ramp:
                for (std::size_t i = 0; i < n; ++i) {
                    const double t = static_cast<double>(i) / sample_rate_hz;
                    wf.push_back(p.level + (p.target - p.level) * t / T);
                }
                break;
            case ProfileKind::ChirpSweep: {
                if (!(p.f0_hz > 0.0 && p.f1_hz > 0.0 && p.f0_hz < nyquist && p.f1_hz < nyquist)) {
                    throw Error(ErrorCode::InvalidFrequencyBand,
                                p.effective_label() + ": chirp band must lie in (0, sample_rate/2)");
                }
                const double phi0 = p.random_phase ? phase_dist(rng) : 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double t = static_cast<double>(i) / sample_rate_hz;
                    const double phase =
                        2.0 * std::numbers::pi * (p.f0_hz * t + 0.5 * (p.f1_hz - p.f0_hz) * t * t / T) + phi0;
                    wf.push_back(p.level + p.amplitude * std::sin(phase));
                }
                break;
            }
        }
    }
    return wf;
}

EngineTrajectory simulate_engine_states(const GroundTruthParams& params, std::span<const double> wf, double dt,
                                        double trq0, double trqdot0) {
    params.validate();
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidProfile, "dt must be positive");
    if (wf.size() < 2) throw Error(ErrorCode::SeriesTooShort, "WF needs at least 2 samples");
    const auto m = static_cast<Eigen::Index>(wf.size());
    Eigen::MatrixXd inputs(1, m);
    for (Eigen::Index k = 0; k < m; ++k) inputs(0, k) = wf[static_cast<std::size_t>(k)];

    EngineTrajectory out;
    out.trq.resize(wf.size());
    out.trq_dot.resize(wf.size());
    if (params.order == EngineOrder::First) {
        const double a = params.a, b = params.b, c = params.c;
        auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
            Eigen::VectorXd d(1);
            d(0) = -a - b * x(0) + c * u(0);
            return d;
        };
        const Eigen::MatrixXd states = numeric::integrate_rk4(rhs, Eigen::VectorXd::Constant(1, trq0), inputs, dt);
        for (Eigen::Index k = 0; k < m; ++k) {
            out.trq[static_cast<std::size_t>(k)] = states(0, k);
            out.trq_dot[static_cast<std::size_t>(k)] = -a - b * states(0, k) + c * inputs(0, k);
        }
    } else {
        const double t12 = params.tau1 * params.tau2, tsum = params.tau1 + params.tau2, mu = params.mu;
        auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
            Eigen::VectorXd d(2);
            d(0) = x(1);
            d(1) = (mu * u(0) - x(0) - tsum * x(1)) / t12;
            return d;
        };
        Eigen::VectorXd x0(2);
        x0 << trq0, trqdot0;
        const Eigen::MatrixXd states = numeric::integrate_rk4(rhs, x0, inputs, dt);
        for (Eigen::Index k = 0; k < m; ++k) {
            out.trq[static_cast<std::size_t>(k)] = states(0, k);
            out.trq_dot[static_cast<std::size_t>(k)] = states(1, k);
        }
    }
    return out;
}

std::vector<double> add_noise(std::span<const double> sequence, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidProfile, "noise sigma must be >= 0");
    std::vector<double> out(sequence.begin(), sequence.end());
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out) v += noise(rng);
    return out;
}

flightdata::FlightRecord generate_flight(const SyntheticFlightSpec& spec) {
    spec.truth.validate();
    const std::vector<double> wf = generate_wf_profile(spec.profiles, spec.sample_rate_hz, spec.truth.seed);
    const double dt = 1.0 / spec.sample_rate_hz;
    const double trq0 = spec.initial_trq.value_or(spec.truth.steady_state(wf.front()));
    const std::vector<double> trq = simulate_engine(spec.truth, wf, dt, trq0, 0.0);

    auto sigma = [&](const std::string& name) {
        auto it = spec.truth.noise_sigma.find(name);
        return it == spec.truth.noise_sigma.end() ? 0.0 : it->second;
    };
    static const std::vector<std::string> kOrder = {"TRQ", "COL", "T1", "P0", "NR", "WF", "AIRSPEED"};
    std::vector<flightdata::Channel> channels;
    for (std::size_t idx = 0; idx < kOrder.size(); ++idx) {
        const std::string& name = kOrder[idx];
        std::vector<double> clean;
        if (name == "TRQ") {
            clean = trq;
        } else if (name == "WF") {
            clean = wf;
        } else {
            auto it = spec.aux.find(name);
            if (it == spec.aux.end()) throw Error(ErrorCode::InvalidProfile, "no auxiliary map for " + name);
            clean.reserve(wf.size());
            for (double w : wf) clean.push_back(it->second(w));
        }
        channels.push_back({name, std::string(flightdata::unit_for(name)),
                            add_noise(clean, sigma(name), channel_seed(spec.truth.seed, idx))});
    }

    std::vector<flightdata::ManeuverSegment> segments;
    std::size_t start = 0;
    for (const auto& p : spec.profiles) {
        const std::size_t n = sample_count(p.duration_s, spec.sample_rate_hz);
        segments.push_back({p.effective_label(), start, start + n, false});
        start += n;
    }
    return flightdata::FlightRecord(spec.flight_id, spec.sample_rate_hz, std::move(channels), std::move(segments));
}

std::vector<SyntheticFlightSpec> build_corpus(std::span<const CorpusGroup> groups, std::uint64_t seed) {
    std::vector<SyntheticFlightSpec> specs;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const CorpusGroup& group = groups[g];
        if (group.kinds.empty()) throw Error(ErrorCode::InvalidProfile, group.prefix + ": no maneuver kinds");
        if (!(group.wf_max > group.wf_min)) throw Error(ErrorCode::InvalidProfile, group.prefix + ": empty WF range");
        if (!(group.segment_max_s >= group.segment_min_s) || !(group.segment_min_s > 0.0)) {
            throw Error(ErrorCode::InvalidProfile, group.prefix + ": bad segment duration bounds");
        }
        for (int i = 1; i <= group.count; ++i) {
            std::seed_seq seq{seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
            const double rate = group.sample_rate_hz;
            auto snap = [&](double d) { return std::max(1.0, std::round(d * rate)) / rate; };

            SyntheticFlightSpec spec;
            char id[32];
            std::snprintf(id, sizeof(id), "%s%03d", group.prefix.c_str(), i);
            spec.flight_id = id;
            spec.sample_rate_hz = rate;
            spec.truth = group.truth;
            spec.truth.seed = rng();
            spec.aux = group.aux;

            const double span = group.wf_max - group.wf_min;
            double level = uniform(group.wf_min, group.wf_max);
            double elapsed = 0.0;
            if (group.taxi_segments) {
                ManeuverProfile taxi;
                taxi.kind = ProfileKind::Hold;
                taxi.label = "taxiing";
                taxi.duration_s = snap(5.0);
                taxi.level = 0.75 * group.wf_min;
                spec.profiles.push_back(taxi);
                elapsed += taxi.duration_s;
                ManeuverProfile takeoff;
                takeoff.kind = ProfileKind::Ramp;
                takeoff.label = "take-off";
                takeoff.duration_s = snap(4.0);
                takeoff.level = taxi.level;
                takeoff.target = level;
                spec.profiles.push_back(takeoff);
                elapsed += takeoff.duration_s;
            }
            while (group.duration_s - elapsed > 1e-9) {
                double d = uniform(group.segment_min_s, group.segment_max_s);
                const double remaining = group.duration_s - elapsed;
                if (remaining - d < group.segment_min_s) d = remaining;
                d = snap(d);
                ManeuverProfile p;
                p.kind = group.kinds[static_cast<std::size_t>(unit(rng) * static_cast<double>(group.kinds.size())) %
                                     group.kinds.size()];
                p.duration_s = d;
                p.level = level;
                switch (p.kind) {
                    case ProfileKind::Hold:
                        p.label = unit(rng) < 0.5 ? "cruise" : "hover";
                        p.target = level;
                        break;
                    case ProfileKind::Ramp:
                        p.target = uniform(group.wf_min, group.wf_max);
                        p.label = p.target > level ? "climb" : "descent";
                        level = p.target;
                        break;
                    case ProfileKind::Step:
                        p.target = uniform(group.wf_min, group.wf_max);
                        p.step_time_s = snap(d * uniform(0.3, 0.7));
                        p.label = "collective step";
                        level = p.target;
                        break;
                    case ProfileKind::ChirpSweep: {
                        p.amplitude = span * uniform(0.05, 0.15);
                        p.level = std::clamp(level, group.wf_min + p.amplitude, group.wf_max - p.amplitude);
                        p.f0_hz = 0.1;
                        p.f1_hz = uniform(std::min(0.5, group.chirp_max_hz), group.chirp_max_hz);
                        p.label = "collective sweep";
                        level = p.level;
                        break;
                    }
                }
                spec.profiles.push_back(p);
                elapsed += d;
            }
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Step: return "step";
        case ProfileKind::Hold: return "hold";
        case ProfileKind::Ramp: return "ramp";
        case ProfileKind::ChirpSweep: return "chirp_sweep";
    }
    return "hold";
}

ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "step") return ProfileKind::Step;
    if (s == "hold") return ProfileKind::Hold;
    if (s == "ramp") return ProfileKind::Ramp;
    if (s == "chirp_sweep" || s == "chirp") return ProfileKind::ChirpSweep;
    throw Error(ErrorCode::ConfigError, "unknown maneuver kind '" + s + "'");
}

nlohmann::json to_json(const GroundTruthParams& p) {
    nlohmann::json j;
    j["order"] = p.order == EngineOrder::First ? 1 : 2;
    j["a"] = p.a;
    j["b"] = p.b;
    j["c"] = p.c;
    j["mu"] = p.mu;
    j["tau1"] = p.tau1;
    j["tau2"] = p.tau2;
    j["noise_sigma"] = p.noise_sigma;
    j["seed"] = p.seed;
    return j;
}

GroundTruthParams truth_from_json(const nlohmann::json& j, GroundTruthParams base) {
    try {
        if (j.contains("order")) {
            const int order = j.at("order").get<int>();
            if (order != 1 && order != 2) throw Error(ErrorCode::ConfigError, "ground truth order must be 1 or 2");
            base.order = order == 1 ? EngineOrder::First : EngineOrder::Second;
        }
        base.a = j.value("a", base.a);
        base.b = j.value("b", base.b);
        base.c = j.value("c", base.c);
        base.mu = j.value("mu", base.mu);
        base.tau1 = j.value("tau1", base.tau1);
        base.tau2 = j.value("tau2", base.tau2);
        if (j.contains("noise_sigma")) base.noise_sigma = j.at("noise_sigma").get<std::map<std::string, double>>();
        base.seed = j.value("seed", base.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("ground truth block: ") + e.what());
    }
    return base;
}

nlohmann::json to_json(const ManeuverProfile& p) {
    nlohmann::json j;
    j["kind"] = to_string(p.kind);
    j["label"] = p.effective_label();
    j["duration_s"] = p.duration_s;
    j["level"] = p.level;
    j["target"] = p.target;
    j["step_time_s"] = p.step_time_s;
    j["amplitude"] = p.amplitude;
    j["f0_hz"] = p.f0_hz;
    j["f1_hz"] = p.f1_hz;
    j["random_phase"] = p.random_phase;
    return j;
}

ManeuverProfile profile_from_json(const nlohmann::json& j) {
    ManeuverProfile p;
    try {
        p.kind = profile_kind_from_string(j.at("kind").get<std::string>());
        p.label = j.value("label", std::string());
        p.duration_s = j.at("duration_s").get<double>();
        p.level = j.value("level", p.level);
        p.target = j.value("target", p.level);
        p.step_time_s = j.value("step_time_s", p.step_time_s);
        p.amplitude = j.value("amplitude", p.amplitude);
        p.f0_hz = j.value("f0_hz", p.f0_hz);
        p.f1_hz = j.value("f1_hz", p.f1_hz);
        p.random_phase = j.value("random_phase", p.random_phase);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("maneuver block: ") + e.what());
    }
    return p;
}

namespace {

nlohmann::json aux_to_json(const std::map<std::string, AuxMap>& aux) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, m] : aux) j[name] = {{"offset", m.offset}, {"gain", m.gain}, {"lo", m.lo}, {"hi", m.hi}};
    return j;
}

std::map<std::string, AuxMap> aux_from_json(const nlohmann::json& j, std::map<std::string, AuxMap> base) {
    for (const auto& [name, block] : j.items()) {
        AuxMap m = base.count(name) ? base[name] : AuxMap{};
        m.offset = block.value("offset", m.offset);
        m.gain = block.value("gain", m.gain);
        m.lo = block.value("lo", m.lo);
        m.hi = block.value("hi", m.hi);
        base[name] = m;
    }
    return base;
}

}  // namespace

nlohmann::json to_json(const SyntheticFlightSpec& s) {
    nlohmann::json j;
    j["flight_id"] = s.flight_id;
    j["sample_rate_hz"] = s.sample_rate_hz;
    j["ground_truth"] = to_json(s.truth);
    j["aux"] = aux_to_json(s.aux);
    if (s.initial_trq) j["initial_trq"] = *s.initial_trq;
    j["maneuvers"] = nlohmann::json::array();
    for (const auto& p : s.profiles) j["maneuvers"].push_back(to_json(p));
    return j;
}

SyntheticFlightSpec flight_spec_from_json(const nlohmann::json& j) {
    SyntheticFlightSpec s;
    try {
        s.flight_id = j.at("flight_id").get<std::string>();
        s.sample_rate_hz = j.value("sample_rate_hz", s.sample_rate_hz);
        if (j.contains("ground_truth")) s.truth = truth_from_json(j.at("ground_truth"));
        if (j.contains("aux")) s.aux = aux_from_json(j.at("aux"), s.aux);
        if (j.contains("initial_trq")) s.initial_trq = j.at("initial_trq").get<double>();
        for (const auto& block : j.at("maneuvers")) s.profiles.push_back(profile_from_json(block));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("synthetic flight block: ") + e.what());
    }
    if (s.profiles.empty()) throw Error(ErrorCode::ConfigError, s.flight_id + ": maneuver list is empty");
    return s;
}

CorpusGroup corpus_group_from_json(const nlohmann::json& j) {
    CorpusGroup g;
    try {
        g.prefix = j.value("prefix", g.prefix);
        g.count = j.value("count", g.count);
        g.duration_s = j.value("duration_s", g.duration_s);
        g.sample_rate_hz = j.value("sample_rate_hz", g.sample_rate_hz);
        g.wf_min = j.value("wf_min", g.wf_min);
        g.wf_max = j.value("wf_max", g.wf_max);
        if (j.contains("kinds")) {
            g.kinds.clear();
            for (const auto& k : j.at("kinds")) g.kinds.push_back(profile_kind_from_string(k.get<std::string>()));
        }
        g.segment_min_s = j.value("segment_min_s", g.segment_min_s);
        g.segment_max_s = j.value("segment_max_s", g.segment_max_s);
        g.chirp_max_hz = j.value("chirp_max_hz", g.chirp_max_hz);
        g.taxi_segments = j.value("taxi_segments", g.taxi_segments);
        if (j.contains("ground_truth")) g.truth = truth_from_json(j.at("ground_truth"));
        if (j.contains("aux")) g.aux = aux_from_json(j.at("aux"), g.aux);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("corpus group: ") + e.what());
    }
    if (g.count < 0) throw Error(ErrorCode::ConfigError, g.prefix + ": count must be >= 0");
    return g;
}

}  // namespace tssid::synthgen
