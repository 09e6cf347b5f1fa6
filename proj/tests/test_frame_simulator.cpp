#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "cqed/frame_simulator.hpp"

using namespace cqed;

namespace {

NoiseModel quiet_model(int d, StructureKind kind = StructureKind::NCavity, int cycles = 0) {
    auto L = build_layout(d);
    auto net = assign_cavities(L, kind);
    return build_noise_model(std::move(L), std::move(net), NoiseBudget{}, PulseParams{1.0, 6.0}, cycles ? cycles : d);
}

int bulk_qubit(const CodeLayout& L) {
    const int mid = L.d - 1;  // centre of the (2d-1)^2 grid
    return L.qubit_at.at({mid % 2 == 0 ? mid : mid - 1, mid % 2 == 0 ? mid : mid - 1});
}

}  // namespace

TEST(Simulator, ZeroNoiseIsSilent) {
    for (auto kind : {StructureKind::FourCavity, StructureKind::DCavity, StructureKind::NCavity}) {
        const auto m = quiet_model(3, kind);
        for (std::uint64_t shot = 0; shot < 50; ++shot) {
            auto rng = shot_rng(1, shot);
            const auto rec = simulate_shot(m, rng);
            for (auto v : rec.syndromes) EXPECT_EQ(v, 0);
            for (auto v : rec.final_syndrome) EXPECT_EQ(v, 0);
            EXPECT_FALSE(rec.flip.any());
        }
    }
}

TEST(Simulator, ForcedBulkZFlipsTwoXChecksEveryCycle) {
    const auto m = quiet_model(5);
    const auto& L = m.layout;
    const int q = bulk_qubit(L);
    FaultPlan plan{InjectedFault{InjectedFault::Kind::Data, 0, q, PauliKind::Z}};
    auto rng = shot_rng(3, 0);
    const auto rec = simulate_shot(m, rng, &plan);
    std::vector<int> expected;
    for (int s = 0; s < L.num_stabilizers(); ++s) {
        const auto& st = L.stabilizers[s];
        if (st.kind == PauliKind::X && std::count(st.support.begin(), st.support.end(), q)) expected.push_back(s);
    }
    ASSERT_EQ(expected.size(), 2u);
    for (int c = 0; c < rec.cycles; ++c) {
        for (int s = 0; s < L.num_stabilizers(); ++s) {
            const bool hit = std::count(expected.begin(), expected.end(), s) > 0;
            EXPECT_EQ(rec.at(c, s), hit ? 1 : 0);
        }
    }
    for (int s = 0; s < L.num_stabilizers(); ++s) {
        EXPECT_EQ(rec.final_syndrome[s], std::count(expected.begin(), expected.end(), s) > 0 ? 1 : 0);
    }
}

TEST(Simulator, ForcedLossAppliesPrefixHalfTheTime) {
    const auto m = quiet_model(3);
    const auto& L = m.layout;
    int s4 = -1;
    for (int s = 0; s < L.num_stabilizers(); ++s) {
        if (L.stabilizers[s].kind == PauliKind::Z && L.stabilizers[s].weight() == 4) s4 = s;
    }
    ASSERT_GE(s4, 0);
    InjectedFault f;
    f.kind = InjectedFault::Kind::Loss;
    f.cycle = 1;
    f.stabilizer = s4;
    f.stage = 2;
    FaultPlan plan{f};
    const int n = 100000;
    int applied = 0;
    const auto& sup = L.stabilizers[s4].support;
    for (int shot = 0; shot < n; ++shot) {
        auto rng = shot_rng(11, shot);
        const auto rec = simulate_shot(m, rng, &plan);
        ASSERT_EQ(rec.at(1, s4), 2);
        const bool z12 = rec.frame.z[sup[0]] && rec.frame.z[sup[1]];
        int weight = 0;
        for (auto b : rec.frame.z) weight += b;
        if (z12) {
            EXPECT_EQ(weight, 2);
            ++applied;
        } else {
            EXPECT_EQ(weight, 0);
        }
    }
    EXPECT_NEAR(applied / double(n), 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(Simulator, FullSupportBackactionIsHarmless) {
    const auto m = quiet_model(3);
    for (int s = 0; s < m.layout.num_stabilizers(); ++s) {
        InjectedFault f;
        f.kind = InjectedFault::Kind::Loss;
        f.stabilizer = s;
        f.stage = m.layout.stabilizers[s].weight();
        f.backaction = 1;
        FaultPlan plan{f};
        auto rng = shot_rng(1, s);
        const auto rec = simulate_shot(m, rng, &plan);
        EXPECT_FALSE(rec.flip.any());
        for (auto v : rec.final_syndrome) EXPECT_EQ(v, 0);
    }
}

TEST(Simulator, LossFrequencyMatchesPathProbability) {
    auto L = build_layout(3);
    auto net = assign_cavities(L, StructureKind::NCavity);
    NoiseBudget b;
    b.p_cav = 0.01;
    b.p_sw = 0.003;
    b.p_cir = 0.002;
    const auto m = build_noise_model(std::move(L), std::move(net), b, PulseParams{1.0, 6.0}, 3);
    double expect = 0;
    for (int s = 0; s < m.layout.num_stabilizers(); ++s) expect += m.loss_probability(s);
    expect /= m.layout.num_stabilizers();
    const int shots = 100000 / 3;
    std::uint64_t lost = 0, total = 0;
    for (int shot = 0; shot < shots; ++shot) {
        auto rng = shot_rng(5, shot);
        const auto rec = simulate_shot(m, rng);
        lost += std::count(rec.syndromes.begin(), rec.syndromes.end(), 2);
        total += rec.syndromes.size();
    }
    EXPECT_NEAR(lost / double(total), expect, 3 * std::sqrt(expect * (1 - expect) / total));
}

TEST(Simulator, FinalSyndromeMatchesResidualFrame) {
    auto L = build_layout(5);
    auto net = assign_cavities(L, StructureKind::DCavity);
    NoiseBudget b;
    b.p_cav = 0.02;
    b.p_dep = 1e-3;
    b.profile = DelayProfile::from_w1(0.9);
    const auto m = build_noise_model(std::move(L), std::move(net), b, PulseParams{1.0, 6.0}, 5);
    for (int shot = 0; shot < 200; ++shot) {
        auto rng = shot_rng(8, shot);
        const auto rec = simulate_shot(m, rng);
        for (int s = 0; s < m.layout.num_stabilizers(); ++s) {
            const auto& st = m.layout.stabilizers[s];
            EXPECT_EQ(rec.final_syndrome[s], support_parity(rec.frame, st.kind, st.support));
        }
        const auto lf = logical_flip(m.layout, rec.frame);
        EXPECT_EQ(lf.x_flipped, rec.flip.x_flipped);
        EXPECT_EQ(lf.z_flipped, rec.flip.z_flipped);
    }
}

TEST(Simulator, FlipFreeReadoutsTrackFrameParity) {
    // Dephasing only: every readout equals the parity of errors accumulated
    // up to that cycle (errors arrive only at cycle start).
    auto L = build_layout(3);
    auto net = assign_cavities(L, StructureKind::NCavity);
    NoiseBudget b;
    b.p_dep = 0.01;
    const auto m = build_noise_model(L, net, b, PulseParams{1.0, 6.0}, 4);
    for (int shot = 0; shot < 200; ++shot) {
        auto rng = shot_rng(21, shot);
        const auto rec = simulate_shot(m, rng);
        // Replay the same stream with a frame-only model to recover the per-cycle frames.
        auto rng2 = shot_rng(21, shot);
        PauliFrame f(L.num_qubits());
        for (int c = 0; c < m.cycles; ++c) {
            for (int q = 0; q < L.num_qubits(); ++q) {
                if (uniform01(rng2) < m.p_dephase) f.z[q] ^= 1;
            }
            for (const auto& round : m.net.schedule) {
                for (int s : round) {
                    uniform01(rng2);  // channel draw
                    const auto& st = L.stabilizers[s];
                    EXPECT_EQ(rec.at(c, s), support_parity(f, st.kind, st.support));
                }
            }
        }
    }
}

TEST(Simulator, DeterministicPerShotSeeding) {
    auto L = build_layout(3);
    auto net = assign_cavities(L, StructureKind::NCavity);
    NoiseBudget b;
    b.p_cav = 0.05;
    b.p_dep = 1e-3;
    b.profile = DelayProfile::from_w1(0.95);
    const auto m = build_noise_model(std::move(L), std::move(net), b, PulseParams{2.0, 6.0}, 3);
    for (int shot = 0; shot < 20; ++shot) {
        auto r1 = shot_rng(77, shot), r2 = shot_rng(77, shot);
        const auto a = simulate_shot(m, r1), c = simulate_shot(m, r2);
        EXPECT_EQ(a.syndromes, c.syndromes);
        EXPECT_EQ(a.frame, c.frame);
    }
}

TEST(LogicalRate, Examples) {
    const auto zero = logical_error_rate(0, 10000, 3);
    EXPECT_EQ(zero.per_cycle, 0.0);
    const double z2 = 1.96 * 1.96;
    EXPECT_NEAR(zero.fail_ci.high, z2 / (10000 + z2), 1e-12);
    EXPECT_NEAR(zero.fail_ci.high, 3.84e-4, 1e-6);
    EXPECT_NEAR(zero.per_cycle_ci.high, 1 - std::pow(1 - zero.fail_ci.high, 1.0 / 3), 1e-15);

    const auto all = logical_error_rate(50, 50, 4);
    EXPECT_EQ(all.f_pro, 0.0);
    EXPECT_EQ(all.per_cycle, 1.0);

    const auto mid = logical_error_rate(100, 100000, 5);
    EXPECT_NEAR(mid.per_cycle, 1 - std::pow(0.999, 0.2), 1e-16);
    EXPECT_NEAR(mid.per_cycle, 2.0009e-4, 1e-8);
    EXPECT_LT(mid.per_cycle_ci.low, mid.per_cycle);
    EXPECT_GT(mid.per_cycle_ci.high, mid.per_cycle);

    EXPECT_THROW(logical_error_rate(0, 0, 3), UsageError);
}

TEST(LogicalRate, BellFidelityEqualsIdentityWeight) {
    // Single logical qubit Pauli channel on half of a Bell pair.
    using cd = std::complex<double>;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 20; ++t) {
        double p[4];
        double s = 0;
        for (double& x : p) s += (x = u(rng));
        for (double& x : p) x /= s;
        const cd I[4] = {1, 0, 0, 1}, X[4] = {0, 1, 1, 0}, Y[4] = {0, cd(0, -1), cd(0, 1), 0}, Z[4] = {1, 0, 0, -1};
        const cd* P[4] = {I, X, Y, Z};
        // |Phi> = (|00> + |11>)/sqrt2; fidelity = sum_k p_k |<Phi|(P_k x I)|Phi>|^2.
        double fid = 0;
        for (int k = 0; k < 4; ++k) {
            const cd amp = (P[k][0] + P[k][3]) / 2.0;
            fid += p[k] * std::norm(amp);
        }
        EXPECT_NEAR(fid, p[0], 1e-14);
        const std::uint64_t shots = 1000000;
        const auto fails = static_cast<std::uint64_t>(std::llround((1 - p[0]) * shots));
        EXPECT_NEAR(logical_error_rate(fails, shots, 1).f_pro, p[0], 1e-6);
    }
}

TEST(LogicalRate, ResidualCountsAnticommutation) {
    const auto L = build_layout(3);
    std::vector<ShotRecord> recs(3);
    std::vector<PauliFrame> corr(3, PauliFrame(L.num_qubits()));
    for (auto& r : recs) r.frame = PauliFrame(L.num_qubits());
    for (int q : L.logical_z) recs[1].frame.z[q] = 1;  // Z_L commutes with Z_L but not X_L
    recs[2].frame.x[L.logical_z[0]] = 1;
    corr[2].x[L.logical_z[0]] = 1;  // corrected
    const auto r = logical_error_rate(L, recs, corr, 3);
    EXPECT_EQ(r.failures, 1u);
}

TEST(ParallelShots, CoversEveryShotOnce) {
    std::vector<int> hits(1000, 0);
    std::vector<std::vector<int>> per(4);
    parallel_shots(1000, 4, [&](std::uint64_t i, int w) { per[w].push_back(static_cast<int>(i)); });
    for (auto& v : per) {
        for (int i : v) ++hits[i];
    }
    for (int h : hits) EXPECT_EQ(h, 1);
}
