#pragma once

// Stochastic error channels of a photon-mediated stabilizer measurement:
// heralded photon loss, the Pauli-twirled pulse-delay channel with correlated
// outcome flips, and idle dephasing.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqed/cavity_physics.hpp"
#include "cqed/common.hpp"

namespace cqed {

struct NoiseBudget {
    double p_cav = 0;
    double p_del = 0;
    double p_sw = 0;
    double p_cir = 0;
    /// Dephasing (Z-flip) rate per unit time, 1/(2 T2).
    double p_dep = 0;
    DelayProfile profile = DelayProfile::ideal();

    double t2() const { return p_dep > 0 ? 0.5 / p_dep : kInf; }

    static double dephasing_rate(double t2) { return std::isinf(t2) ? 0.0 : 0.5 / t2; }

    void validate() const {
        for (double p : {p_cav, p_del, p_sw, p_cir}) {
            if (!(p >= 0.0 && p <= 1.0)) throw UsageError("noise probabilities must lie in [0, 1]");
        }
        if (!(p_dep >= 0.0)) throw UsageError("dephasing rate must be >= 0");
        profile.validate();
    }
};

// ---------------------------------------------------------------------------
// Photon paths and heralded loss

enum class PathComponent { Source, Circulator, Switch, Cavity, Detector };

struct PhotonPath {
    std::vector<PathComponent> components;

    int count(PathComponent kind) const {
        return static_cast<int>(std::count(components.begin(), components.end(), kind));
    }
    int n_cav() const { return count(PathComponent::Cavity); }
    int n_sw() const { return count(PathComponent::Switch); }
    int n_cir() const { return count(PathComponent::Circulator); }
};

inline double component_loss(PathComponent c, const NoiseBudget& b) {
    switch (c) {
        case PathComponent::Circulator: return b.p_cir;
        case PathComponent::Switch: return b.p_sw;
        case PathComponent::Cavity: return b.p_cav;
        default: return 0.0;
    }
}

/// Number of atoms the photon interacted with before it was lost.
struct LossEvent {
    int stage = 0;
};

/// Walks the path component by component and returns the first loss, if any.
/// A loss inside a cavity counts that cavity's atom as touched.
template <class Engine>
std::optional<LossEvent> sample_loss_location(const PhotonPath& path, const NoiseBudget& budget, Engine& rng) {
    int reflected = 0;
    for (auto c : path.components) {
        if (c == PathComponent::Cavity) ++reflected;
        const double p = component_loss(c, budget);
        if (p > 0 && uniform01(rng) < p) return LossEvent{reflected};
    }
    return std::nullopt;
}

/// Exact distribution of the loss stage along a path: entry i is the
/// probability of losing the photon after touching i atoms; the final entry
/// is the survival probability.
inline std::vector<double> loss_stage_distribution(const PhotonPath& path, const NoiseBudget& budget) {
    const int w = path.n_cav();
    std::vector<double> out(w + 2, 0.0);
    double alive = 1.0;
    int reflected = 0;
    for (auto c : path.components) {
        if (c == PathComponent::Cavity) ++reflected;
        const double p = component_loss(c, budget);
        out[reflected] += alive * p;
        alive *= 1.0 - p;
    }
    out[w + 1] = alive;
    return out;
}

/// Backaction of a lost photon: the prefix Pauli on atoms 1..stage is applied
/// with probability 1/2 and the syndrome is recorded as 2.
struct LossBackaction {
    std::uint32_t mask = 0;
    double probability = 0.5;
    int syndrome = 2;
};

inline LossBackaction loss_backaction(LossEvent event, int weight) {
    if (event.stage < 0 || event.stage > weight) throw ModelError("loss stage out of range");
    return {event.stage == 0 ? 0u : (1u << event.stage) - 1u, 0.5, 2};
}

// ---------------------------------------------------------------------------
// Pulse-delay channel

/// Polarization measurement outcome; L is the even-parity result.
enum class Polarization { L = 0, R = 1 };

/// Reference shift (in units of the differential delay) of the L pulse.
inline constexpr int kReferenceShift = 2;

/// Post-measurement density-matrix factor for |A_k><A_l| given the outcome,
/// where A_k is the class of basis states with k atoms in |1>.
inline double table2_factor(int k, int l, const DelayProfile& profile, Polarization outcome) {
    if (k < 0 || l < 0 || k > 4 || l > 4) throw ModelError("weight class out of range");
    const double sigma = outcome == Polarization::L ? 1.0 : -1.0;
    const double sk = (k % 2 == 0) ? 1.0 : -1.0;
    const double sl = (l % 2 == 0) ? 1.0 : -1.0;
    return 0.25 * (1.0 + sigma * sl * profile.at(l - kReferenceShift) + sigma * sk * profile.at(k - kReferenceShift) +
                   sk * sl * profile.at(k - l));
}

struct ChannelEvent {
    std::uint32_t mask = 0;
    bool flip = false;
    double prob = 0;
};

/// Stochastic Pauli channel of one no-loss stabilizer measurement: a
/// basis-aligned Pauli string on the support (bit i = i-th visited atom)
/// jointly distributed with a flip of the reported outcome.
class TwirledChannel {
   public:
    TwirledChannel() = default;

    TwirledChannel(int weight, std::vector<double> probs) : weight_(weight), probs_(std::move(probs)) {
        cumulative_.resize(probs_.size());
        double acc = 0;
        for (std::size_t v = 0; v < probs_.size(); ++v) {
            acc += probs_[v];
            cumulative_[v] = acc;
        }
    }

    int weight() const { return weight_; }

    /// Probability of (mask, flip).
    double probability(std::uint32_t mask, bool flip) const {
        return probs_.at(mask | (static_cast<std::uint32_t>(flip) << weight_));
    }

    std::vector<ChannelEvent> events() const {
        std::vector<ChannelEvent> out;
        for (std::uint32_t v = 0; v < probs_.size(); ++v) {
            if (probs_[v] > 0) out.push_back(decode(v));
        }
        return out;
    }

    const std::vector<double>& table() const { return probs_; }

    double flip_probability() const {
        double s = 0;
        for (std::uint32_t v = 0; v < probs_.size(); ++v) {
            if (v >> weight_) s += probs_[v];
        }
        return s;
    }

    /// Draws an event from a uniform variate in [0, 1).
    ChannelEvent sample(double u) const {
        for (std::uint32_t v = 0; v < cumulative_.size(); ++v) {
            if (u < cumulative_[v]) return decode(v);
        }
        return decode(static_cast<std::uint32_t>(cumulative_.size() - 1));
    }

    std::uint64_t fingerprint() const {
        std::uint64_t h = fnv1a(&weight_, sizeof(weight_));
        return fnv1a(probs_.data(), probs_.size() * sizeof(double), h);
    }

   private:
    ChannelEvent decode(std::uint32_t v) const {
        return {v & ((1u << weight_) - 1u), static_cast<bool>(v >> weight_), probs_[v]};
    }

    int weight_ = 0;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

/// Joint relative Gram matrix of the reflected pulses on (atoms x polarization).
/// Index bits 0..w-1 hold the atom basis state, bit w the polarization
/// (0 = L reference, 1 = R). Entry (i, j) is the overlap of the two pulse
/// envelopes with the ideal CZ signs divided out.
inline std::vector<double> joint_overlap_matrix(const DelayProfile& profile, int weight) {
    const std::uint32_t dim = 2u << weight;
    auto shift = [&](std::uint32_t j) {
        return (j >> weight) ? std::popcount(j & ((1u << weight) - 1u)) : kReferenceShift;
    };
    std::vector<double> n(static_cast<std::size_t>(dim) * dim);
    for (std::uint32_t a = 0; a < dim; ++a) {
        for (std::uint32_t b = 0; b < dim; ++b) n[a * dim + b] = profile.at(shift(a) - shift(b));
    }
    return n;
}

/// Pauli-twirls the joint measurement channel into a distribution over
/// (Pauli mask on the support, outcome flip).
inline TwirledChannel build_twirled_channel(const DelayProfile& profile, int weight) {
    if (weight != 3 && weight != 4) throw ModelError("stabilizer weight must be 3 or 4");
    profile.validate();
    const std::uint32_t dim = 2u << weight;
    const auto n = joint_overlap_matrix(profile, weight);

    // Averaging over X-type conjugations leaves a multiplier depending only on
    // the XOR of row and column; its Walsh transform gives the Z-string weights.
    std::vector<double> f(dim, 0.0);
    for (std::uint32_t u = 0; u < dim; ++u) {
        double s = 0;
        for (std::uint32_t j = 0; j < dim; ++j) s += n[j * dim + (j ^ u)];
        f[u] = s / dim;
    }
    for (std::uint32_t len = 1; len < dim; len <<= 1) {
        for (std::uint32_t i = 0; i < dim; i += len << 1) {
            for (std::uint32_t j = i; j < i + len; ++j) {
                const double a = f[j], b = f[j + len];
                f[j] = a + b;
                f[j + len] = a - b;
            }
        }
    }
    double total = 0;
    for (auto& p : f) {
        p /= dim;
        if (p < -1e-10) {
            throw ModelError("twirled delay channel has negative probability " + format_double(p) +
                             "; overlap profile is not completely positive");
        }
        p = std::max(p, 0.0);
        total += p;
    }
    for (auto& p : f) p /= total;
    return TwirledChannel(weight, std::move(f));
}

/// Z-flip probability from T2 dephasing over one cycle.
inline double dephasing_rule(double t2, double cycle_time) {
    if (!(t2 > 0) || !(cycle_time >= 0)) throw UsageError("dephasing_rule needs T2 > 0 and cycle_time >= 0");
    if (std::isinf(t2)) return 0.0;
    return -0.5 * std::expm1(-cycle_time / t2);
}

}  // namespace cqed
