#pragma once

// Pauli-frame Monte Carlo of repeated photon-mediated stabilizer measurements.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "cqed/cavity_physics.hpp"
#include "cqed/code_layout.hpp"
#include "cqed/common.hpp"
#include "cqed/noise_channels.hpp"

namespace cqed {

/// Everything a shot needs, precomputed once per (layout, structure, budget).
struct NoiseModel {
    CodeLayout layout;
    NetworkStructure net;
    NoiseBudget budget;
    int cycles = 1;
    /// Per-qubit Z probability at the start of each noisy cycle.
    double p_dephase = 0;
    TwirledChannel channel3;
    TwirledChannel channel4;
    /// Per stabilizer: loss-stage distribution (last entry = survival).
    std::vector<std::vector<double>> loss_dist;
    std::vector<std::vector<double>> loss_cdf;

    const TwirledChannel& channel(int s) const {
        return layout.stabilizers[s].weight() == 4 ? channel4 : channel3;
    }
    double loss_probability(int s) const { return 1.0 - loss_dist[s].back(); }
};

inline NoiseModel build_noise_model(CodeLayout layout, NetworkStructure net, const NoiseBudget& budget,
                                    const PulseParams& pulse, int cycles, double round_latency = 0.0) {
    if (cycles < 1) throw UsageError("cycles must be >= 1");
    budget.validate();
    NoiseModel m;
    m.layout = std::move(layout);
    m.net = std::move(net);
    m.budget = budget;
    m.cycles = cycles;
    m.p_dephase = dephasing_rule(budget.t2(), cycle_time(m.net, pulse, round_latency));
    m.channel3 = build_twirled_channel(budget.profile, 3);
    m.channel4 = build_twirled_channel(budget.profile, 4);
    for (const auto& path : m.net.paths) {
        auto dist = loss_stage_distribution(path, budget);
        std::vector<double> cdf(dist.size());
        double acc = 0;
        for (std::size_t i = 0; i < dist.size(); ++i) cdf[i] = (acc += dist[i]);
        m.loss_dist.push_back(std::move(dist));
        m.loss_cdf.push_back(std::move(cdf));
    }
    return m;
}

struct PauliFrame {
    std::vector<std::uint8_t> x;
    std::vector<std::uint8_t> z;

    explicit PauliFrame(int n = 0) : x(n, 0), z(n, 0) {}

    std::vector<std::uint8_t>& part(PauliKind k) { return k == PauliKind::X ? x : z; }
    const std::vector<std::uint8_t>& part(PauliKind k) const { return k == PauliKind::X ? x : z; }

    PauliFrame& operator^=(const PauliFrame& o) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] ^= o.x[i];
            z[i] ^= o.z[i];
        }
        return *this;
    }
    bool operator==(const PauliFrame&) const = default;
};

/// Parity of the frame component that anticommutes with a stabilizer of `kind`.
inline int support_parity(const PauliFrame& f, PauliKind kind, const std::vector<int>& support) {
    const auto& bits = f.part(opposite(kind));
    int p = 0;
    for (int q : support) p ^= bits[q];
    return p;
}

struct LogicalFlip {
    bool x_flipped = false;
    bool z_flipped = false;
    bool any() const { return x_flipped || z_flipped; }
};

/// Logical action of a residual Pauli: X part against Z_L, Z part against X_L.
inline LogicalFlip logical_flip(const CodeLayout& layout, const PauliFrame& residual) {
    LogicalFlip out;
    for (int q : layout.logical_z) out.x_flipped ^= residual.x[q] != 0;
    for (int q : layout.logical_x) out.z_flipped ^= residual.z[q] != 0;
    return out;
}

struct ShotRecord {
    int cycles = 0;
    int num_stabilizers = 0;
    /// Row-major [cycle][stabilizer], values 0, 1 or 2 (photon lost).
    std::vector<std::uint8_t> syndromes;
    std::vector<std::uint8_t> final_syndrome;
    PauliFrame frame;
    LogicalFlip flip;

    std::uint8_t at(int c, int s) const { return syndromes[static_cast<std::size_t>(c) * num_stabilizers + s]; }
};

/// Deterministic faults for instrumented runs.
struct InjectedFault {
    enum class Kind { Data, Channel, Loss };
    Kind kind = Kind::Data;
    int cycle = 0;
    // Data: Pauli on one qubit at the start of the cycle.
    int qubit = -1;
    PauliKind pauli = PauliKind::Z;
    // Channel / Loss: replaces the sampled outcome of this measurement.
    int stabilizer = -1;
    std::uint32_t mask = 0;
    bool flip = false;
    int stage = 0;
    /// Loss backaction: -1 sampled, 0 never, 1 always.
    int backaction = -1;
};

using FaultPlan = std::vector<InjectedFault>;

/// One shot: `cycles` noisy syndrome cycles followed by one noiseless cycle.
template <class Engine>
ShotRecord simulate_shot(const NoiseModel& m, Engine& rng, const FaultPlan* plan = nullptr) {
    const auto& L = m.layout;
    const int n = L.num_qubits(), ns = L.num_stabilizers();
    ShotRecord rec;
    rec.cycles = m.cycles;
    rec.num_stabilizers = ns;
    rec.syndromes.assign(static_cast<std::size_t>(m.cycles) * ns, 0);
    PauliFrame f(n);

    auto find_fault = [&](InjectedFault::Kind kind, int c, int s) -> const InjectedFault* {
        if (!plan) return nullptr;
        for (const auto& x : *plan) {
            if (x.kind == kind && x.cycle == c && x.stabilizer == s) return &x;
        }
        return nullptr;
    };
    auto apply_mask = [&](PauliKind kind, const std::vector<int>& support, std::uint32_t mask) {
        auto& bits = f.part(kind);
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (mask >> i & 1u) bits[support[i]] ^= 1;
        }
    };

    for (int c = 0; c < m.cycles; ++c) {
        if (m.p_dephase > 0) {
            for (int q = 0; q < n; ++q) {
                if (uniform01(rng) < m.p_dephase) f.z[q] ^= 1;
            }
        }
        if (plan) {
            for (const auto& x : *plan) {
                if (x.kind == InjectedFault::Kind::Data && x.cycle == c) f.part(x.pauli)[x.qubit] ^= 1;
            }
        }
        for (const auto& round : m.net.schedule) {
            for (int s : round) {
                const auto& st = L.stabilizers[s];
                auto& out = rec.syndromes[static_cast<std::size_t>(c) * ns + s];

                const InjectedFault* lost = find_fault(InjectedFault::Kind::Loss, c, s);
                int stage = -1;
                if (lost) {
                    stage = lost->stage;
                } else if (!plan || !find_fault(InjectedFault::Kind::Channel, c, s)) {
                    const auto& cdf = m.loss_cdf[s];
                    if (cdf.size() > 1 && cdf[cdf.size() - 2] > 0) {
                        const double u = uniform01(rng);
                        for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
                            if (u < cdf[i]) {
                                stage = static_cast<int>(i);
                                break;
                            }
                        }
                    }
                }
                if (stage >= 0) {
                    const auto back = loss_backaction(LossEvent{stage}, st.weight());
                    bool apply;
                    if (lost && lost->backaction >= 0) apply = lost->backaction == 1;
                    else apply = uniform01(rng) < back.probability;
                    if (apply) apply_mask(st.kind, st.support, back.mask);
                    out = static_cast<std::uint8_t>(back.syndrome);
                    continue;
                }

                ChannelEvent ev;
                if (const InjectedFault* forced = find_fault(InjectedFault::Kind::Channel, c, s)) {
                    ev.mask = forced->mask;
                    ev.flip = forced->flip;
                } else {
                    ev = m.channel(s).sample(uniform01(rng));
                }
                apply_mask(st.kind, st.support, ev.mask);
                out = static_cast<std::uint8_t>(support_parity(f, st.kind, st.support) ^ (ev.flip ? 1 : 0));
            }
        }
    }

    rec.final_syndrome.resize(ns);
    for (int s = 0; s < ns; ++s) {
        rec.final_syndrome[s] = static_cast<std::uint8_t>(support_parity(f, L.stabilizers[s].kind, L.stabilizers[s].support));
    }
    rec.flip = logical_flip(L, f);
    rec.frame = std::move(f);
    return rec;
}

template <class Engine>
ShotRecord simulate_shot(const NoiseModel& m, Engine&& rng, const FaultPlan* plan = nullptr) {
    Engine& r = rng;
    return simulate_shot(m, r, plan);
}

inline std::mt19937_64 shot_rng(std::uint64_t master_seed, std::uint64_t shot) {
    return std::mt19937_64(derive_seed(master_seed, shot));
}

// ---------------------------------------------------------------------------
// Logical error estimation

struct WilsonInterval {
    double low = 0;
    double high = 1;
};

inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials), ph = successes / n, z2 = z * z;
    const double centre = (ph + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct LogicalErrorRate {
    std::uint64_t shots = 0;
    std::uint64_t failures = 0;
    int cycles = 1;
    /// Process fidelity over all noisy cycles.
    double f_pro = 1;
    /// Failure probability per shot (1 - f_pro) with its 95% interval.
    double p_fail = 0;
    WilsonInterval fail_ci;
    /// Per-cycle logical error rate 1 - f_pro^(1/cycles) with its interval.
    double per_cycle = 0;
    WilsonInterval per_cycle_ci;
};

inline double per_cycle_rate(double f_pro, int cycles) { return 1.0 - std::pow(f_pro, 1.0 / cycles); }

inline LogicalErrorRate logical_error_rate(std::uint64_t failures, std::uint64_t shots, int cycles) {
    if (shots == 0) throw UsageError("logical_error_rate needs at least one shot");
    if (cycles < 1) throw UsageError("cycles must be >= 1");
    if (failures > shots) throw UsageError("more failures than shots");
    LogicalErrorRate r;
    r.shots = shots;
    r.failures = failures;
    r.cycles = cycles;
    r.p_fail = static_cast<double>(failures) / static_cast<double>(shots);
    r.f_pro = 1.0 - r.p_fail;
    r.per_cycle = per_cycle_rate(r.f_pro, cycles);
    r.fail_ci = wilson_interval(failures, shots);
    r.per_cycle_ci = {per_cycle_rate(1.0 - r.fail_ci.low, cycles), per_cycle_rate(1.0 - r.fail_ci.high, cycles)};
    return r;
}

/// Failure count from residual frames: shot fails if frame XOR correction
/// anticommutes with either logical operator.
inline LogicalErrorRate logical_error_rate(const CodeLayout& layout, const std::vector<ShotRecord>& records,
                                           const std::vector<PauliFrame>& corrections, int cycles) {
    if (records.size() != corrections.size()) throw UsageError("one correction per shot required");
    std::uint64_t fails = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        PauliFrame res = records[i].frame;
        res ^= corrections[i];
        fails += logical_flip(layout, res).any() ? 1 : 0;
    }
    return logical_error_rate(fails, records.size(), cycles);
}

/// Runs fn(shot, worker) for shot in [0, shots) on `threads` workers with a
/// static interleaved partition. fn must only write worker-local state.
template <class Fn>
void parallel_shots(std::uint64_t shots, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || shots < 2) {
        for (std::uint64_t i = 0; i < shots; ++i) fn(i, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex mu;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::uint64_t i = t; i < shots; i += threads) fn(i, t);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace cqed
