#pragma once

// Experiment orchestration: settings, per-point Monte Carlo campaigns,
// requirement-boundary bisection, alpha calibration and result files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/cavity_physics.hpp"
#include "cqed/code_layout.hpp"
#include "cqed/config.hpp"
#include "cqed/decoder.hpp"
#include "cqed/frame_simulator.hpp"
#include "cqed/noise_channels.hpp"
#include "cqed/operating_point.hpp"
#include "json.hpp"

namespace cqed {

inline constexpr const char* kVersion = "1.0.0";

/// Loss-prefix weight divisor chosen by `calibrate-alpha` over {2, 5, 10, 20}.
inline constexpr double kDefaultAlpha = 5.0;

struct Settings {
    // [cavity]
    double g = 50.12;
    double gamma = 1.0;
    double kappa_in = 0.01;
    std::optional<double> kappa_ex;
    // [pulse]
    std::optional<double> pulse_length;
    double window_factor = 6.0;
    double round_latency = 0.0;
    // [noise]
    double t2 = 1e6;
    double p_sw = 0;
    double p_cir = 0;
    LossModel loss_model = LossModel::StateAveraged;
    // [code]
    std::vector<int> distances{3, 5, 7};
    int cycles = 0;  // 0: cycles = d
    StructureKind structure = StructureKind::NCavity;
    // [decoder]
    std::vector<DecoderKind> decoders{DecoderKind::Weighted};
    double alpha = kDefaultAlpha;
    bool free_erasure_time_edge = true;
    std::vector<double> alpha_grid{2, 5, 10, 20};
    // [run]
    std::uint64_t shots = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    // [boundary]
    std::vector<double> boundary_kappa_in{0.01};
    double g_min = 1;
    double g_max = 1000;
    int iterations = 6;
    int d_low = 3;
    // [synthetic]
    std::optional<double> synthetic_loss;
    std::optional<double> synthetic_infidelity;

    CavityParams cavity() const { return {g, gamma, kappa_ex.value_or(1.0), kappa_in}; }
    int cycles_for(int d) const { return cycles > 0 ? cycles : d; }
    bool synthetic() const { return synthetic_loss.has_value() || synthetic_infidelity.has_value(); }

    void validate() const {
        if (distances.empty()) throw UsageError("empty campaign: no code distances given");
        for (int d : distances) {
            if (d < 2) throw UsageError("code distances must be >= 2");
        }
        if (shots < 1) throw UsageError("shots must be >= 1");
        if (cycles < 0) throw UsageError("cycles must be >= 0");
        if (threads < 1) throw UsageError("threads must be >= 1");
        if (decoders.empty()) throw UsageError("at least one decoder required");
        if (!(alpha > 1)) throw UsageError("alpha must be > 1");
        if (!(t2 > 0)) throw UsageError("T2 must be > 0");
        if (!(g_min > 0 && g_max > g_min)) throw UsageError("boundary needs 0 < g_min < g_max");
        if (iterations < 1) throw UsageError("boundary iterations must be >= 1");
        if (d_low < 2) throw UsageError("boundary d_low must be >= 2");
        for (double p : {p_sw, p_cir}) {
            if (!(p >= 0 && p <= 1)) throw UsageError("peripheral losses must lie in [0, 1]");
        }
        if (synthetic_loss && !(*synthetic_loss >= 0 && *synthetic_loss <= 1)) {
            throw UsageError("synthetic loss must lie in [0, 1]");
        }
        if (synthetic_infidelity && !(*synthetic_infidelity >= 0 && *synthetic_infidelity <= 0.5)) {
            throw UsageError("synthetic infidelity must lie in [0, 0.5]");
        }
        cavity_check();
    }

   private:
    void cavity_check() const {
        if (!(g > 0 && gamma > 0 && kappa_in >= 0)) throw UsageError("cavity needs g, gamma > 0 and kappa_in >= 0");
        if (kappa_ex && !(*kappa_ex > 0)) throw UsageError("kappa_ex must be > 0");
        if (pulse_length && !(*pulse_length > 0)) throw UsageError("pulse_length must be > 0");
        if (!(window_factor >= 1)) throw UsageError("window_factor must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Settings <-> JSON (the TOML sections map one-to-one onto JSON objects)

namespace detail {

inline std::string loss_model_name(LossModel m) { return m == LossModel::StateAveraged ? "averaged" : "worst_case"; }

inline LossModel parse_loss_model(const std::string& s) {
    if (s == "averaged" || s == "state_averaged") return LossModel::StateAveraged;
    if (s == "worst_case") return LossModel::WorstCase;
    throw UsageError("unknown loss_model '" + s + "'");
}

inline double num(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw UsageError("config key '" + key + "' must be a number");
    return v.get<double>();
}

inline std::int64_t integer(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw UsageError("config key '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::string str(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.is_number_integer() ? std::to_string(v.get<std::int64_t>()) : format_double(v.get<double>());
    throw UsageError("config key '" + key + "' must be a string");
}

/// JSON cannot hold infinity; store it as the string "inf".
inline nlohmann::json num_out(double x) { return std::isinf(x) ? nlohmann::json("inf") : nlohmann::json(x); }

inline double num_in(const nlohmann::json& v, const std::string& key) {
    if (v.is_string() && (v == "inf" || v == "+inf")) return kInf;
    return num(v, key);
}

}  // namespace detail

inline nlohmann::json to_json(const Settings& s) {
    using nlohmann::json;
    json j;
    j["cavity"] = {{"g", s.g}, {"gamma", s.gamma}, {"kappa_in", s.kappa_in}};
    if (s.kappa_ex) j["cavity"]["kappa_ex"] = *s.kappa_ex;
    j["pulse"] = {{"window_factor", s.window_factor}, {"round_latency", s.round_latency}};
    if (s.pulse_length) j["pulse"]["pulse_length"] = *s.pulse_length;
    j["noise"] = {{"T2", detail::num_out(s.t2)},
                  {"p_sw", s.p_sw},
                  {"p_cir", s.p_cir},
                  {"loss_model", detail::loss_model_name(s.loss_model)}};
    j["code"] = {{"distances", s.distances}, {"cycles", s.cycles}, {"structure", to_string(s.structure)}};
    json kinds = json::array();
    for (auto k : s.decoders) kinds.push_back(to_string(k));
    j["decoder"] = {{"kind", kinds},
                    {"alpha", s.alpha},
                    {"erasure_time_edge", s.free_erasure_time_edge ? "free" : "keep"},
                    {"alpha_grid", s.alpha_grid}};
    j["run"] = {{"shots", s.shots}, {"seed", s.seed}, {"threads", s.threads}};
    j["boundary"] = {{"kappa_in", s.boundary_kappa_in},
                     {"g_min", s.g_min},
                     {"g_max", s.g_max},
                     {"iterations", s.iterations},
                     {"d_low", s.d_low}};
    if (s.synthetic()) {
        j["synthetic"] = json::object();
        if (s.synthetic_loss) j["synthetic"]["loss"] = *s.synthetic_loss;
        if (s.synthetic_infidelity) j["synthetic"]["infidelity"] = *s.synthetic_infidelity;
    }
    return j;
}

inline Settings settings_from_json(const nlohmann::json& j) {
    using detail::integer;
    using detail::num;
    using detail::str;
    Settings s;
    if (!j.is_object()) throw UsageError("configuration root must be a table");
    auto section = [&](const char* name, auto&& fn) {
        if (!j.contains(name)) return;
        const auto& sec = j.at(name);
        if (!sec.is_object()) throw UsageError(std::string("config section [") + name + "] must be a table");
        for (auto it = sec.begin(); it != sec.end(); ++it) {
            if (!fn(it.key(), it.value())) {
                throw UsageError("unknown config key '" + it.key() + "' in [" + name + "]");
            }
        }
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"cavity", "pulse", "noise", "code", "decoder", "run", "boundary", "synthetic"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
            std::end(known)) {
            throw UsageError("unknown config section [" + it.key() + "]");
        }
    }
    section("cavity", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "g") s.g = num(v, k);
        else if (k == "gamma") s.gamma = num(v, k);
        else if (k == "kappa_in") s.kappa_in = num(v, k);
        else if (k == "kappa_ex") s.kappa_ex = num(v, k);
        else return false;
        return true;
    });
    section("pulse", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "pulse_length") s.pulse_length = num(v, k);
        else if (k == "window_factor") s.window_factor = num(v, k);
        else if (k == "round_latency") s.round_latency = num(v, k);
        else return false;
        return true;
    });
    section("noise", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "T2") s.t2 = detail::num_in(v, k);
        else if (k == "p_sw") s.p_sw = num(v, k);
        else if (k == "p_cir") s.p_cir = num(v, k);
        else if (k == "loss_model") s.loss_model = detail::parse_loss_model(str(v, k));
        else return false;
        return true;
    });
    section("code", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "distances") {
            if (!v.is_array()) throw UsageError("distances must be an array");
            s.distances.clear();
            for (const auto& x : v) s.distances.push_back(static_cast<int>(integer(x, k)));
        } else if (k == "cycles") {
            s.cycles = static_cast<int>(integer(v, k));
        } else if (k == "structure") {
            s.structure = parse_structure(str(v, k));
        } else {
            return false;
        }
        return true;
    });
    section("decoder", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "kind") {
            s.decoders.clear();
            if (v.is_array()) {
                for (const auto& x : v) s.decoders.push_back(parse_decoder(str(x, k)));
            } else {
                s.decoders.push_back(parse_decoder(str(v, k)));
            }
        } else if (k == "alpha") {
            s.alpha = num(v, k);
        } else if (k == "erasure_time_edge") {
            const auto m = str(v, k);
            if (m != "free" && m != "keep") throw UsageError("erasure_time_edge must be free or keep");
            s.free_erasure_time_edge = m == "free";
        } else if (k == "alpha_grid") {
            if (!v.is_array()) throw UsageError("alpha_grid must be an array");
            s.alpha_grid.clear();
            for (const auto& x : v) s.alpha_grid.push_back(num(x, k));
        } else {
            return false;
        }
        return true;
    });
    section("run", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "shots") s.shots = static_cast<std::uint64_t>(integer(v, k));
        else if (k == "seed") s.seed = v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(integer(v, k));
        else if (k == "threads") s.threads = static_cast<int>(integer(v, k));
        else return false;
        return true;
    });
    section("boundary", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "kappa_in") {
            s.boundary_kappa_in.clear();
            if (v.is_array()) {
                for (const auto& x : v) s.boundary_kappa_in.push_back(num(x, k));
            } else {
                s.boundary_kappa_in.push_back(num(v, k));
            }
        } else if (k == "g_min") {
            s.g_min = num(v, k);
        } else if (k == "g_max") {
            s.g_max = num(v, k);
        } else if (k == "iterations") {
            s.iterations = static_cast<int>(integer(v, k));
        } else if (k == "d_low") {
            s.d_low = static_cast<int>(integer(v, k));
        } else {
            return false;
        }
        return true;
    });
    section("synthetic", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "loss") s.synthetic_loss = num(v, k);
        else if (k == "infidelity") s.synthetic_infidelity = num(v, k);
        else return false;
        return true;
    });
    return s;
}

inline Settings load_settings(const std::string& path) { return settings_from_json(load_toml(path)); }

// ---------------------------------------------------------------------------
// One distance at one operating point

struct DistanceSetup {
    int d = 0;
    int cycles = 0;
    CavityParams params;
    PulseParams pulse;
    NoiseBudget budget;
    double p_tot = 0;
    bool optimized = false;
    std::vector<std::string> diagnostics;
};

/// Operating point for distance d: optimizer output, fixed parameters, or the
/// synthetic channel.
inline DistanceSetup prepare_distance(const Settings& s, int d) {
    DistanceSetup out;
    out.d = d;
    out.cycles = s.cycles_for(d);
    const Peripherals per{s.p_sw, s.p_cir};
    const auto layout = build_layout(d);
    const auto net = assign_cavities(layout, s.structure);

    if (s.synthetic()) {
        out.params = s.cavity();
        out.pulse = PulseParams{s.pulse_length.value_or(1.0), s.window_factor};
        const double x = s.synthetic_infidelity.value_or(0.0);
        out.budget.profile = DelayProfile::from_w1(1.0 - 2.0 * x);
        out.budget.p_cav = s.synthetic_loss.value_or(0.0);
        out.budget.p_del = x;
        out.budget.p_sw = s.p_sw;
        out.budget.p_cir = s.p_cir;
        out.budget.p_dep = NoiseBudget::dephasing_rate(s.t2);
    } else if (s.kappa_ex && s.pulse_length) {
        out.params = s.cavity();
        out.pulse = PulseParams{*s.pulse_length, s.window_factor};
        out.budget = make_budget(out.params, out.pulse, per, s.t2, s.loss_model);
        out.diagnostics = out.budget.profile.warnings;
    } else {
        auto op = optimize_operating_point(s.cavity(), s.structure, d, per, s.t2, s.loss_model, s.window_factor);
        out.params = op.params;
        out.pulse = op.pulse;
        out.budget = op.budget;
        out.optimized = true;
        out.diagnostics = op.diagnostics;
    }
    out.p_tot = estimate_accumulation(layout, net, out.budget, out.pulse);
    return out;
}

struct DecoderResult {
    DecoderKind kind = DecoderKind::Uniform;
    double alpha = 0;
    LogicalErrorRate rate;
};

struct DistanceResult {
    DistanceSetup setup;
    double p_dephase = 0;
    std::uint64_t channel3_hash = 0;
    std::uint64_t channel4_hash = 0;
    std::uint64_t lost_readouts = 0;
    std::uint64_t readouts = 0;
    std::vector<DecoderResult> decoders;

    const DecoderResult& result(DecoderKind k) const {
        for (const auto& r : decoders) {
            if (r.kind == k) return r;
        }
        throw ModelError("decoder " + to_string(k) + " was not run");
    }
};

inline std::uint64_t distance_seed(std::uint64_t master, int d) { return derive_seed(master, 0x100000000ULL + d); }

/// Simulates s.shots shots at distance d and decodes every shot with each
/// decoder in `opts` (same records for all decoders).
inline DistanceResult run_distance(const Settings& s, int d, const std::vector<DecoderOptions>& opts) {
    DistanceResult out;
    out.setup = prepare_distance(s, d);
    auto layout = build_layout(d);
    auto net = assign_cavities(layout, s.structure);
    const NoiseModel model =
        build_noise_model(std::move(layout), std::move(net), out.setup.budget, out.setup.pulse, out.setup.cycles,
                          s.round_latency);
    out.p_dephase = model.p_dephase;
    out.channel3_hash = model.channel3.fingerprint();
    out.channel4_hash = model.channel4.fingerprint();

    std::vector<Decoder> decoders;
    decoders.reserve(opts.size());
    for (const auto& o : opts) decoders.emplace_back(model, o);

    const std::uint64_t seed = distance_seed(s.seed, d);
    const int nd = static_cast<int>(opts.size());
    std::vector<std::vector<std::uint64_t>> fails(s.threads, std::vector<std::uint64_t>(nd, 0));
    std::vector<std::uint64_t> lost(s.threads, 0);
    parallel_shots(s.shots, s.threads, [&](std::uint64_t shot, int worker) {
        auto rng = shot_rng(seed, shot);
        const auto rec = simulate_shot(model, rng);
        lost[worker] += static_cast<std::uint64_t>(std::count(rec.syndromes.begin(), rec.syndromes.end(), 2));
        for (int k = 0; k < nd; ++k) {
            PauliFrame res = rec.frame;
            res ^= decoders[k].decode(rec);
            if (logical_flip(model.layout, res).any()) ++fails[worker][k];
        }
    });

    for (int k = 0; k < nd; ++k) {
        std::uint64_t f = 0;
        for (int t = 0; t < s.threads; ++t) f += fails[t][k];
        out.decoders.push_back({opts[k].kind, opts[k].alpha, logical_error_rate(f, s.shots, out.setup.cycles)});
    }
    for (auto x : lost) out.lost_readouts += x;
    out.readouts = s.shots * static_cast<std::uint64_t>(out.setup.cycles) * model.layout.num_stabilizers();
    return out;
}

inline std::vector<DecoderOptions> decoder_options(const Settings& s) {
    std::vector<DecoderOptions> out;
    for (auto k : s.decoders) out.push_back({k, s.alpha, s.free_erasure_time_edge});
    return out;
}

struct ResultRow {
    Settings point;
    std::vector<DistanceResult> distances;
};

/// Full pipeline for one parameter point over all configured distances.
inline ResultRow run_point(const Settings& s) {
    s.validate();
    ResultRow row;
    row.point = s;
    for (int d : s.distances) {
        try {
            row.distances.push_back(run_distance(s, d, decoder_options(s)));
        } catch (const ModelError& e) {
            throw ModelError("at g=" + format_double(s.g) + ", kappa_in=" + format_double(s.kappa_in) +
                             ", d=" + std::to_string(d) + ": " + e.what());
        }
    }
    return row;
}

// ---------------------------------------------------------------------------
// Requirement boundary

struct BoundaryStep {
    double g = 0;
    double ratio = 0;
    bool below = false;
    bool resolved = false;
    ResultRow row;
};

struct BoundaryPoint {
    double kappa_in = 0;
    DecoderKind decoder = DecoderKind::Uniform;
    double g_lo = 0;
    double g_hi = 0;
    int unresolved = 0;
    std::vector<BoundaryStep> steps;

    /// Geometric centre of the final bracket.
    double g_star() const { return std::sqrt(g_lo * g_hi); }
};

/// Compares per-cycle logical rates of d_high against d_low. Both zero counts
/// as sub-threshold (nothing to suppress further).
inline BoundaryStep classify_step(const ResultRow& row, DecoderKind k) {
    BoundaryStep st;
    st.g = row.point.g;
    const auto& lo = row.distances.at(0).result(k).rate;
    const auto& hi = row.distances.at(1).result(k).rate;
    if (lo.failures == 0 && hi.failures == 0) {
        st.ratio = 0;
        st.below = true;
        st.resolved = false;
    } else {
        st.ratio = lo.per_cycle > 0 ? hi.per_cycle / lo.per_cycle : kInf;
        st.below = st.ratio < 1;
        st.resolved = hi.per_cycle_ci.high < lo.per_cycle_ci.low || hi.per_cycle_ci.low > lo.per_cycle_ci.high;
    }
    return st;
}

/// Log-scale bisection in g for each kappa_in: smallest g with
/// p_L(d_low + 2) / p_L(d_low) < 1. Decisions follow the point estimate; steps
/// whose confidence intervals overlap are counted as unresolved.
inline std::vector<BoundaryPoint> boundary_search(const Settings& base, DecoderKind decide_with) {
    base.validate();
    std::vector<BoundaryPoint> out;
    for (double kin : base.boundary_kappa_in) {
        BoundaryPoint bp;
        bp.kappa_in = kin;
        bp.decoder = decide_with;
        double lo = std::log(base.g_min), hi = std::log(base.g_max);
        for (int it = 0; it < base.iterations; ++it) {
            Settings s = base;
            s.kappa_in = kin;
            s.g = std::exp(0.5 * (lo + hi));
            s.distances = {base.d_low, base.d_low + 2};
            if (std::find(s.decoders.begin(), s.decoders.end(), decide_with) == s.decoders.end()) {
                s.decoders.insert(s.decoders.begin(), decide_with);
            }
            auto row = run_point(s);
            auto st = classify_step(row, decide_with);
            st.row = std::move(row);
            if (st.below) hi = std::log(st.g); else lo = std::log(st.g);
            if (!st.resolved) ++bp.unresolved;
            bp.steps.push_back(std::move(st));
        }
        bp.g_lo = std::exp(lo);
        bp.g_hi = std::exp(hi);
        out.push_back(std::move(bp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Alpha calibration

struct AlphaResult {
    double alpha = 0;
    int d = 0;
    LogicalErrorRate rate;
};

inline std::vector<AlphaResult> calibrate_alpha(const Settings& s) {
    s.validate();
    if (s.alpha_grid.empty()) throw UsageError("alpha_grid is empty");
    std::vector<DecoderOptions> opts;
    for (double a : s.alpha_grid) {
        if (!(a > 1)) throw UsageError("alpha values must be > 1");
        opts.push_back({DecoderKind::Weighted, a, s.free_erasure_time_edge});
    }
    std::vector<AlphaResult> out;
    for (int d : s.distances) {
        const auto r = run_distance(s, d, opts);
        for (std::size_t k = 0; k < opts.size(); ++k) out.push_back({opts[k].alpha, d, r.decoders[k].rate});
    }
    return out;
}

/// Alpha with the smallest failure count summed over distances (ties: smaller alpha).
inline double best_alpha(const std::vector<AlphaResult>& rows) {
    std::vector<std::pair<double, std::uint64_t>> totals;
    for (const auto& r : rows) {
        auto it = std::find_if(totals.begin(), totals.end(), [&](const auto& t) { return t.first == r.alpha; });
        if (it == totals.end()) totals.push_back({r.alpha, r.rate.failures});
        else it->second += r.rate.failures;
    }
    if (totals.empty()) throw UsageError("no calibration results");
    return std::min_element(totals.begin(), totals.end(), [](const auto& a, const auto& b) {
               return a.second != b.second ? a.second < b.second : a.first < b.first;
           })->first;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << x;
    return os.str();
}

template <class... T>
std::string csv_line(const T&... fields) {
    std::string out;
    bool first = true;
    auto add = [&](const auto& f) {
        if (!first) out += ',';
        first = false;
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, std::string> || std::is_same_v<F, const char*>) out += f;
        else if constexpr (std::is_floating_point_v<F>) out += format_double(f);
        else out += std::to_string(f);
    };
    (add(fields), ...);
    return out + '\n';
}

}  // namespace detail

inline std::string results_csv_header() {
    return "structure,g,gamma,kappa_in,C_in,T2,p_sw,p_cir,d,cycles,kappa_ex,pulse_length,p_cav,p_del,W1,p_tot,"
           "p_dephase,loss_fraction,decoder,alpha,shots,failures,p_fail,p_fail_lo,p_fail_hi,p_L,p_L_lo,p_L_hi,"
           "ratio_prev\n";
}

inline std::string results_csv_rows(const ResultRow& row) {
    std::string out;
    const auto& s = row.point;
    for (std::size_t i = 0; i < row.distances.size(); ++i) {
        const auto& dr = row.distances[i];
        const auto& su = dr.setup;
        for (const auto& r : dr.decoders) {
            double ratio = std::nan("");
            if (i > 0) {
                const double prev = row.distances[i - 1].result(r.kind).rate.per_cycle;
                ratio = prev > 0 ? r.rate.per_cycle / prev : std::nan("");
            }
            const double alpha = r.kind == DecoderKind::Weighted ? r.alpha : std::nan("");
            const double loss_frac = dr.readouts ? static_cast<double>(dr.lost_readouts) / dr.readouts : 0.0;
            out += detail::csv_line(
                to_string(s.structure), su.params.g, su.params.gamma, su.params.kappa_in,
                su.params.internal_cooperativity(), s.t2, su.budget.p_sw, su.budget.p_cir, su.d, su.cycles,
                su.params.kappa_ex, su.pulse.pulse_length, su.budget.p_cav, su.budget.p_del, su.budget.profile.at(1),
                su.p_tot, dr.p_dephase, loss_frac, to_string(r.kind), alpha, r.rate.shots, r.rate.failures,
                r.rate.p_fail, r.rate.fail_ci.low, r.rate.fail_ci.high, r.rate.per_cycle, r.rate.per_cycle_ci.low,
                r.rate.per_cycle_ci.high, ratio);
        }
    }
    return out;
}

inline std::string boundary_csv(const std::vector<BoundaryPoint>& pts, const Settings& s) {
    std::string out = "structure,decoder,kappa_in,p_sw,p_cir,T2,d_low,d_high,g_lo,g_hi,g_star,C_in_star,iterations,"
                      "unresolved_steps\n";
    for (const auto& p : pts) {
        const double cin = p.g_star() * p.g_star() / (2.0 * p.kappa_in * s.gamma);
        out += detail::csv_line(to_string(s.structure), to_string(p.decoder), p.kappa_in, s.p_sw, s.p_cir, s.t2,
                                s.d_low, s.d_low + 2, p.g_lo, p.g_hi, p.g_star(), cin, s.iterations, p.unresolved);
    }
    return out;
}

inline std::string alpha_csv(const std::vector<AlphaResult>& rows) {
    std::string out = "alpha,d,shots,failures,p_fail,p_L,p_L_lo,p_L_hi\n";
    for (const auto& r : rows) {
        out += detail::csv_line(r.alpha, r.d, r.rate.shots, r.rate.failures, r.rate.p_fail, r.rate.per_cycle,
                                r.rate.per_cycle_ci.low, r.rate.per_cycle_ci.high);
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ModelError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw ModelError("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline nlohmann::json channel_record(const DistanceResult& r) {
    return {{"d", r.setup.d},
            {"cycles", r.setup.cycles},
            {"weight3", detail::hex64(r.channel3_hash)},
            {"weight4", detail::hex64(r.channel4_hash)},
            {"optimized", r.setup.optimized},
            {"kappa_ex", r.setup.params.kappa_ex},
            {"pulse_length", r.setup.pulse.pulse_length},
            {"diagnostics", r.setup.diagnostics}};
}

/// Run manifest: everything needed to regenerate the outputs.
inline nlohmann::json make_manifest(const std::string& command, const Settings& s,
                                    const std::vector<std::pair<std::string, std::string>>& outputs,
                                    const nlohmann::json& channels) {
    nlohmann::json m;
    m["tool"] = "cqednet";
    m["version"] = kVersion;
    m["command"] = command;
    m["settings"] = to_json(s);
    m["channels"] = channels;
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [name, content] : outputs) files[name] = detail::hex64(fnv1a(content.data(), content.size()));
    m["outputs"] = files;
    return m;
}

/// Human-readable `name = value` physics report of one operating point.
inline std::string physics_report(const DistanceSetup& su, StructureKind structure) {
    const auto& p = su.params;
    const auto& b = su.budget;
    std::string out;
    auto line = [&](const std::string& k, double v) { out += k + " = " + format_double(v) + "\n"; };
    out += "structure = " + to_string(structure) + "\n";
    out += "d = " + std::to_string(su.d) + "\n";
    line("g", p.g);
    line("gamma", p.gamma);
    line("kappa_ex", p.kappa_ex);
    line("kappa_in", p.kappa_in);
    line("kappa", p.kappa());
    line("C_in", p.internal_cooperativity());
    const auto l0 = response_function(p, 0.0, AtomState::Zero), l1 = response_function(p, 0.0, AtomState::One);
    line("L0_re", l0.real());
    line("L0_im", l0.imag());
    line("L1_re", l1.real());
    line("L1_im", l1.imag());
    line("tau0", b.profile.tau0);
    line("tau1", b.profile.tau1);
    for (std::size_t m = 0; m < b.profile.w.size(); ++m) line("W" + std::to_string(m), b.profile.w[m]);
    line("pulse_length", su.pulse.pulse_length);
    line("occupation_time", su.pulse.occupation_time());
    line("p_cav", b.p_cav);
    line("p_del", b.p_del);
    line("p_sw", b.p_sw);
    line("p_cir", b.p_cir);
    line("p_dep", b.p_dep);
    line("p_tot", su.p_tot);
    out += std::string("first_order_valid = ") + (b.profile.first_order_valid ? "true" : "false") + "\n";
    return out;
}

}  // namespace cqed
