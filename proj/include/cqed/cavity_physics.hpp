#pragma once

// Single-sided cavity reflection model for the atom-photon CZ gate.
//
// All rates are in units of the atomic polarization decay rate gamma, and all
// times in units of 1/gamma. Only the first-order (delay) part of the
// frequency response is kept: the reflected pulse is the input pulse scaled by
// L_q(0) and shifted by tau_q.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cqed/common.hpp"

namespace cqed {

struct CavityParams {
    double g = 1.0;
    double gamma = 1.0;
    double kappa_ex = 1.0;
    double kappa_in = 0.0;

    double kappa() const { return kappa_ex + kappa_in; }

    /// C_in = g^2 / (2 kappa_in gamma); infinite for a lossless cavity.
    double internal_cooperativity() const {
        return kappa_in > 0 ? g * g / (2.0 * kappa_in * gamma) : kInf;
    }

    void validate() const {
        if (!(g > 0) || !(gamma > 0) || !(kappa_ex > 0) || !(kappa_in >= 0) || !std::isfinite(g) ||
            !std::isfinite(kappa_ex) || !std::isfinite(kappa_in)) {
            throw UsageError("cavity parameters must satisfy g, gamma, kappa_ex > 0 and kappa_in >= 0");
        }
    }
};

struct PulseParams {
    /// Gaussian width L_p.
    double pulse_length = 1.0;
    /// Occupation time per reflection is window_factor * pulse_length.
    double window_factor = 6.0;

    double occupation_time() const { return window_factor * pulse_length; }

    void validate() const {
        if (!(pulse_length > 0) || !(window_factor >= 1)) {
            throw UsageError("pulse_length must be > 0 and window_factor >= 1");
        }
    }
};

struct ReflectionDelays {
    double tau0 = 0;
    double tau1 = 0;
};

/// Reflection delays plus overlap factors W_0..W_max between pulses whose
/// delays differ by m |tau0 - tau1|.
struct DelayProfile {
    double tau0 = 0;
    double tau1 = 0;
    std::vector<double> w{1.0, 1.0, 1.0, 1.0, 1.0};
    /// False when the pulse is too short for the first-order delay model.
    bool first_order_valid = true;
    std::vector<std::string> warnings;

    double at(int m) const {
        m = std::abs(m);
        if (m >= static_cast<int>(w.size())) {
            throw ModelError("delay profile has no W_" + std::to_string(m));
        }
        return w[m];
    }

    void validate() const {
        if (w.empty() || w[0] != 1.0) {
            throw ModelError("delay profile must have W_0 = 1");
        }
        for (double x : w) {
            if (!(x >= 0.0 && x <= 1.0)) {
                throw ModelError("overlap factors must lie in [0, 1]");
            }
        }
    }

    /// Profile of an ideal (delay-free) gate.
    static DelayProfile ideal(int max_m = 4) {
        DelayProfile p;
        p.w.assign(max_m + 1, 1.0);
        return p;
    }

    /// Analytic Gaussian family W_m = W_1^(m^2).
    static DelayProfile from_w1(double w1, int max_m = 4) {
        DelayProfile p;
        p.w.resize(max_m + 1);
        for (int m = 0; m <= max_m; ++m) {
            p.w[m] = m == 0 ? 1.0 : std::pow(w1, static_cast<double>(m * m));
        }
        return p;
    }
};

enum class AtomState { Zero = 0, One = 1 };

enum class LossModel { StateAveraged, WorstCase };

/// Amplitude reflection coefficient L_q(delta) of the atom-cavity system.
inline std::complex<double> response_function(const CavityParams& p, double delta, AtomState state) {
    using C = std::complex<double>;
    const C i_delta(0.0, delta);
    C num = -p.kappa_ex + p.kappa_in - i_delta;
    C den = p.kappa_ex + p.kappa_in - i_delta;
    if (state == AtomState::One) {
        const C atom = (p.g * p.g) / (C(p.gamma, 0.0) - i_delta);
        num += atom;
        den += atom;
    }
    return num / den;
}

inline ReflectionDelays reflection_delays(const CavityParams& p) {
    const double ke = p.kappa_ex, ki = p.kappa_in, g2 = p.g * p.g, ga = p.gamma;

    const double den0 = ke * ke - ki * ki;
    if (std::abs(den0) < 1e-12 * (ke * ke + ki * ki)) {
        throw ModelError("reflection delay tau0 diverges at kappa_ex = kappa_in");
    }
    const double den1 = g2 * g2 + ga * ga * (ki * ki - ke * ke) + 2.0 * g2 * ga * ki;
    const double scale1 = g2 * g2 + ga * ga * (ki * ki + ke * ke) + 2.0 * g2 * ga * ki;
    if (std::abs(den1) < 1e-12 * scale1) {
        throw ModelError("reflection delay tau1 diverges for these cavity parameters");
    }
    return {2.0 * ke / den0, 2.0 * ke * (g2 - ga * ga) / den1};
}

/// Pulse length below which second-order distortion is no longer negligible.
inline double first_order_pulse_scale(const CavityParams& p) {
    const double k = p.kappa();
    return std::max(1.0 / k, k / (p.g * p.g));
}

/// Closed-form Gaussian overlaps W_m = exp(-m^2 (tau0 - tau1)^2 / (4 L_p^2)).
inline DelayProfile overlap_factors(const CavityParams& p, const PulseParams& pulse, int max_m = 4) {
    if (max_m < 1) throw UsageError("overlap_factors needs max_m >= 1");
    pulse.validate();
    const auto delays = reflection_delays(p);

    DelayProfile out;
    out.tau0 = delays.tau0;
    out.tau1 = delays.tau1;
    out.w.resize(max_m + 1);
    const double shift = delays.tau0 - delays.tau1;
    const double lp = pulse.pulse_length;
    for (int m = 0; m <= max_m; ++m) {
        out.w[m] = std::exp(-static_cast<double>(m * m) * shift * shift / (4.0 * lp * lp));
    }
    out.w[0] = 1.0;

    const double scale = first_order_pulse_scale(p);
    if (lp < 10.0 * scale) {
        out.first_order_valid = false;
        out.warnings.push_back("pulse length " + format_double(lp) +
                               " is below 10 x max(1/kappa, kappa/g^2) = " + format_double(10.0 * scale) +
                               "; first-order delay model may be inaccurate");
    }
    return out;
}

/// W_m by trapezoidal quadrature of two normalised Gaussians shifted by
/// m |tau0 - tau1|. Step size is halved until the estimate settles.
inline double numeric_overlap(const CavityParams& p, const PulseParams& pulse, int m) {
    pulse.validate();
    const auto delays = reflection_delays(p);
    const double shift = std::abs(static_cast<double>(m) * (delays.tau0 - delays.tau1));
    const double lp = pulse.pulse_length;
    const double norm = 1.0 / std::sqrt(std::sqrt(M_PI) * lp);
    auto f = [&](double t) { return norm * std::exp(-t * t / (2.0 * lp * lp)); };

    const double lo = -6.0 * lp;
    const double hi = shift + 6.0 * lp;
    auto trapezoid = [&](int n) {
        const double h = (hi - lo) / n;
        double s = 0.5 * (f(lo) * f(lo - shift) + f(hi) * f(hi - shift));
        for (int i = 1; i < n; ++i) {
            const double t = lo + i * h;
            s += f(t) * f(t - shift);
        }
        return s * h;
    };

    int n = 64;
    double prev = trapezoid(n);
    double change = kInf;
    for (int level = 0; level < 14; ++level) {
        n *= 2;
        const double cur = trapezoid(n);
        change = std::abs(cur - prev);
        prev = cur;
        if (change < 1e-13) break;
    }
    if (change > 1e-8) {
        throw ModelError("numeric_overlap: quadrature did not converge (last change " + format_double(change) + ")");
    }
    return prev;
}

/// Photon loss probability of one atom-photon CZ reflection.
inline double gate_loss_probability(const CavityParams& p, LossModel model = LossModel::StateAveraged) {
    const double r0 = std::norm(response_function(p, 0.0, AtomState::Zero));
    const double r1 = std::norm(response_function(p, 0.0, AtomState::One));
    const double loss = model == LossModel::StateAveraged ? 1.0 - 0.5 * (r0 + r1) : 1.0 - std::min(r0, r1);
    return std::clamp(loss, 0.0, 1.0);
}

/// True when the reflection phases realise a CZ: L_0(0) < 0 < L_1(0).
inline bool implements_cz(const CavityParams& p) {
    return response_function(p, 0.0, AtomState::Zero).real() < 0.0 &&
           response_function(p, 0.0, AtomState::One).real() > 0.0;
}

/// Scalar distortion proxy (1 - W_1)/2, used only by the operating-point search.
inline double delay_error_proxy(const DelayProfile& profile) { return 0.5 * (1.0 - profile.at(1)); }

}  // namespace cqed
