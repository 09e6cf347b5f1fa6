#pragma once

// Choice of (kappa_ex, L_p) minimising the closed-form error accumulation of a
// network structure: log grid search followed by local coordinate bisection.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cqed/cavity_physics.hpp"
#include "cqed/code_layout.hpp"
#include "cqed/noise_channels.hpp"

namespace cqed {

struct Peripherals {
    double p_sw = 0;
    double p_cir = 0;
};

/// Noise budget of a fully specified operating point.
inline NoiseBudget make_budget(const CavityParams& p, const PulseParams& pulse, Peripherals per, double t2,
                               LossModel loss_model = LossModel::StateAveraged) {
    NoiseBudget b;
    b.profile = overlap_factors(p, pulse, 4);
    b.p_cav = gate_loss_probability(p, loss_model);
    b.p_del = delay_error_proxy(b.profile);
    b.p_sw = per.p_sw;
    b.p_cir = per.p_cir;
    b.p_dep = NoiseBudget::dephasing_rate(t2);
    return b;
}

struct SearchRange {
    double kappa_ex_min = 1e-2;
    double kappa_ex_max = 1e4;
    double lp_min = 1e-2;
    double lp_max = 1e6;
    int grid = 32;
    int refine_rounds = 2;
};

struct OperatingPoint {
    CavityParams params;
    PulseParams pulse;
    NoiseBudget budget;
    double p_tot = kInf;
    bool on_boundary = false;
    std::vector<std::string> diagnostics;
};

class AccumulationObjective {
   public:
    AccumulationObjective(CavityParams base, StructureKind kind, int d, Peripherals per, double t2,
                          LossModel loss_model, double window_factor)
        : base_(base), layout_(build_layout(d)), per_(per), t2_(t2), loss_model_(loss_model), window_(window_factor) {
        net_ = assign_cavities(layout_, kind);
    }

    /// P_tot at (kappa_ex, L_p); +inf where the gate is not a CZ or the
    /// delay model is singular.
    double operator()(double kappa_ex, double lp) const {
        CavityParams p = base_;
        p.kappa_ex = kappa_ex;
        if (!implements_cz(p)) return kInf;
        try {
            const PulseParams pulse{lp, window_};
            return estimate_accumulation(layout_, net_, make_budget(p, pulse, per_, t2_, loss_model_), pulse);
        } catch (const ModelError&) {
            return kInf;
        }
    }

    const CodeLayout& layout() const { return layout_; }
    const NetworkStructure& structure() const { return net_; }

   private:
    CavityParams base_;
    CodeLayout layout_;
    NetworkStructure net_;
    Peripherals per_;
    double t2_;
    LossModel loss_model_;
    double window_;
};

/// Minimises P_tot over kappa_ex and L_p. `base.kappa_ex` is ignored.
inline OperatingPoint optimize_operating_point(const CavityParams& base, StructureKind kind, int d, Peripherals per,
                                               double t2, LossModel loss_model = LossModel::StateAveraged,
                                               double window_factor = 6.0, const SearchRange& range = {}) {
    if (d < 2) throw UsageError("code distance must be >= 2");
    if (!(range.kappa_ex_min > 0 && range.lp_min > 0 && range.kappa_ex_max > range.kappa_ex_min &&
          range.lp_max > range.lp_min && range.grid >= 3)) {
        throw UsageError("operating-point search ranges must be positive and non-empty");
    }
    const AccumulationObjective f(base, kind, d, per, t2, loss_model, window_factor);

    const double lk0 = std::log(range.kappa_ex_min), lk1 = std::log(range.kappa_ex_max);
    const double ll0 = std::log(range.lp_min), ll1 = std::log(range.lp_max);
    const double hk = (lk1 - lk0) / (range.grid - 1), hl = (ll1 - ll0) / (range.grid - 1);
    auto eval = [&](double lk, double ll) { return f(std::exp(lk), std::exp(ll)); };

    double best = kInf;
    int bi = -1, bj = -1;
    for (int i = 0; i < range.grid; ++i) {
        for (int j = 0; j < range.grid; ++j) {
            const double v = eval(lk0 + i * hk, ll0 + j * hl);
            if (v < best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    if (bi < 0) throw ModelError("no feasible CZ operating point in the search range");

    OperatingPoint out;
    if (bi == 0 || bi == range.grid - 1 || bj == 0 || bj == range.grid - 1) {
        out.on_boundary = true;
        out.diagnostics.push_back("optimum lies on the edge of the search range (kappa_ex grid index " +
                                  std::to_string(bi) + ", L_p grid index " + std::to_string(bj) + ")");
    }

    // Coordinate bisection on a shrinking log bracket; only improvements are kept.
    double lk = lk0 + bi * hk, ll = ll0 + bj * hl;
    double wk = hk, wl = hl;
    for (int round = 0; round < range.refine_rounds; ++round) {
        for (int axis = 0; axis < 2; ++axis) {
            const double centre = axis == 0 ? lk : ll;
            const double width = axis == 0 ? wk : wl;
            const double lo_lim = axis == 0 ? lk0 : ll0, hi_lim = axis == 0 ? lk1 : ll1;
            double a = std::max(lo_lim, centre - width), b = std::min(hi_lim, centre + width);
            auto g = [&](double x) { return axis == 0 ? eval(x, ll) : eval(lk, x); };
            for (int it = 0; it < 40; ++it) {
                const double m = 0.5 * (a + b), eps = 1e-3 * (b - a);
                if (g(m - eps) < g(m + eps)) b = m + eps; else a = m - eps;
            }
            const double x = 0.5 * (a + b);
            const double v = g(x);
            if (v < best) {
                best = v;
                (axis == 0 ? lk : ll) = x;
            }
        }
        wk *= 0.25;
        wl *= 0.25;
    }

    out.params = base;
    out.params.kappa_ex = std::exp(lk);
    out.pulse = PulseParams{std::exp(ll), window_factor};
    out.budget = make_budget(out.params, out.pulse, per, t2, loss_model);
    out.p_tot = best;
    for (const auto& w : out.budget.profile.warnings) out.diagnostics.push_back(w);
    return out;
}

}  // namespace cqed
