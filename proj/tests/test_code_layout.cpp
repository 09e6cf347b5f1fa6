#include <gtest/gtest.h>

#include <set>

#include "cqed/code_layout.hpp"

using namespace cqed;

namespace {

int overlap(const std::vector<int>& a, const std::vector<int>& b) {
    int n = 0;
    for (int x : a) n += std::count(b.begin(), b.end(), x) > 0;
    return n;
}

}  // namespace

TEST(Layout, CountsForSmallDistances) {
    for (int d = 2; d <= 15; ++d) {
        const auto L = build_layout(d);
        EXPECT_EQ(L.num_qubits(), 2 * d * d - 2 * d + 1);
        EXPECT_EQ(L.num_stabilizers(), 2 * d * (d - 1));
        int w4 = 0, w3 = 0;
        for (const auto& s : L.stabilizers) (s.weight() == 4 ? w4 : w3) += 1;
        EXPECT_EQ(w4, 2 * (d - 1) * (d - 2));
        EXPECT_EQ(w3, 4 * (d - 1));
        EXPECT_EQ(static_cast<int>(L.logical_x.size()), d);
        EXPECT_EQ(static_cast<int>(L.logical_z.size()), d);
    }
    const auto L2 = build_layout(2);
    EXPECT_EQ(L2.num_qubits(), 5);
    EXPECT_EQ(L2.num_stabilizers(), 4);
    const auto L3 = build_layout(3);
    EXPECT_EQ(L3.num_qubits(), 13);
    EXPECT_EQ(L3.num_stabilizers(), 12);
}

TEST(Layout, CommutationBruteForce) {
    for (int d : {2, 3, 4, 5}) {
        const auto L = build_layout(d);
        for (const auto& a : L.stabilizers) {
            for (const auto& b : L.stabilizers) {
                if (a.kind != b.kind) {
                    EXPECT_EQ(overlap(a.support, b.support) % 2, 0);
                }
            }
            // Z_L is a Z string, X_L an X string.
            EXPECT_EQ(overlap(a.support, a.kind == PauliKind::X ? L.logical_z : L.logical_x) % 2, 0);
        }
        EXPECT_EQ(overlap(L.logical_x, L.logical_z) % 2, 1);
    }
}

TEST(Layout, VisitOrderIsNorthWestEastSouth) {
    const auto L = build_layout(3);
    for (const auto& s : L.stabilizers) {
        std::vector<Coord> c;
        for (int q : s.support) c.push_back(L.data_qubits[q]);
        for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1], c[i]);
    }
}

TEST(Layout, RejectsTinyDistance) { EXPECT_THROW(build_layout(1), UsageError); }

TEST(Structure, InvariantsHoldExhaustively) {
    for (int d = 2; d <= 15; ++d) {
        const auto L = build_layout(d);
        for (auto kind : {StructureKind::FourCavity, StructureKind::DCavity, StructureKind::NCavity}) {
            const auto net = assign_cavities(L, kind);  // throws on violation
            for (const auto& s : L.stabilizers) {
                std::set<int> cav;
                for (int q : s.support) cav.insert(net.cavity_of[q]);
                EXPECT_EQ(cav.size(), s.support.size());
            }
            int n_cav = 0;
            for (const auto& p : net.paths) n_cav += p.n_cav();
            EXPECT_EQ(n_cav, 4 * (d - 1) * (2 * d - 1));
            if (kind == StructureKind::NCavity) {
                EXPECT_EQ(net.cavity_count, L.num_qubits());
                EXPECT_LE(net.depth(), 8);
                int n_cir = 0;
                for (const auto& p : net.paths) n_cir += p.n_cir();
                EXPECT_EQ(n_cir, 2 * (d - 1) * (5 * d - 2));
            } else if (kind == StructureKind::FourCavity) {
                EXPECT_EQ(net.cavity_count, d == 2 ? 3 : 4);  // d=2 never uses colour 2
                EXPECT_EQ(net.depth(), 2 * d * (d - 1));
            } else {
                EXPECT_GE(net.cavity_count, std::min(d, 4));
                EXPECT_LE(net.cavity_count, std::max(2 * d, 4));
            }
        }
    }
}

TEST(Structure, NCavityIdentityAssignment) {
    const auto L = build_layout(3);
    const auto net = assign_cavities(L, StructureKind::NCavity);
    EXPECT_EQ(net.cavity_count, 13);
    std::set<int> s(net.cavity_of.begin(), net.cavity_of.end());
    EXPECT_EQ(s.size(), 13u);
}

TEST(Structure, DCavityDistanceFive) {
    const auto L = build_layout(5);
    const auto net = assign_cavities(L, StructureKind::DCavity);
    EXPECT_EQ(L.num_stabilizers(), 40);
    EXPECT_GE(net.cavity_count, 5);
    EXPECT_LE(net.cavity_count, 10);
    std::cout << "DCavity d=5: " << net.cavity_count << " cavities, depth " << net.depth() << "\n";
}

TEST(Schedule, FourCavityFullySerial) {
    const auto L = build_layout(3);
    const auto net = assign_cavities(L, StructureKind::FourCavity);
    ASSERT_EQ(net.depth(), 12);
    for (const auto& r : net.schedule) EXPECT_EQ(r.size(), 1u);
}

TEST(Schedule, RoundsPartitionAndAreCavityDisjoint) {
    const auto L = build_layout(3);
    const auto net = assign_cavities(L, StructureKind::NCavity);
    std::vector<int> seen(L.num_stabilizers(), 0);
    for (const auto& r : net.schedule) {
        std::set<int> used;
        for (int s : r) {
            ++seen[s];
            for (int q : L.stabilizers[s].support) EXPECT_TRUE(used.insert(net.cavity_of[q]).second);
        }
    }
    for (int c : seen) EXPECT_EQ(c, 1);
    EXPECT_EQ(build_schedule(L, net), net.schedule);
}

TEST(Schedule, SingleStabilizerCornerCase) {
    CodeLayout L = build_layout(2);
    L.stabilizers.resize(1);
    NetworkStructure net = assign_cavities(build_layout(2), StructureKind::NCavity);
    EXPECT_EQ(build_schedule(L, net).size(), 1u);
}

TEST(Paths, CountsPerStructure) {
    const auto L = build_layout(3);
    for (int s = 0; s < L.num_stabilizers(); ++s) {
        const int w = L.stabilizers[s].weight();
        const auto n = assign_cavities(L, StructureKind::NCavity).paths[s];
        EXPECT_EQ(n.n_cav(), w);
        EXPECT_EQ(n.n_sw(), w);
        EXPECT_EQ(n.n_cir(), w + 1);
        const auto f = assign_cavities(L, StructureKind::FourCavity).paths[s];
        EXPECT_EQ(f.n_sw(), 4);
        EXPECT_EQ(f.n_cir(), w);
        const auto dd = assign_cavities(L, StructureKind::DCavity).paths[s];
        EXPECT_EQ(dd.n_sw(), w + 1);
        EXPECT_EQ(dd.n_cir(), w);
    }
}

TEST(Accumulation, ClosedFormsAtDistanceTwo) {
    const auto L = build_layout(2);
    NoiseBudget b;
    b.p_cav = 1e-3;
    b.p_del = 2e-4;
    b.p_sw = 3e-4;
    b.p_cir = 5e-4;
    b.p_dep = 1e-5;
    const PulseParams pulse{7.0, 6.0};
    const double n = estimate_accumulation(L, assign_cavities(L, StructureKind::NCavity), b, pulse);
    EXPECT_NEAR(n, 7.0 * 1e-5 + 12.0 / 5 * (1e-3 + 2e-4 + 3e-4) + 16.0 / 5 * 5e-4, 1e-15);
    const double f = estimate_accumulation(L, assign_cavities(L, StructureKind::FourCavity), b, pulse);
    EXPECT_NEAR(f, 4 * 7.0 * 1e-5 + 12.0 / 5 * (1e-3 + 2e-4 + 5e-4) + 16.0 / 5 * 3e-4, 1e-15);
    EXPECT_EQ(estimate_accumulation(L, assign_cavities(L, StructureKind::DCavity), NoiseBudget{}, pulse), 0.0);
}

TEST(Accumulation, ClosedFormsAllDistances) {
    NoiseBudget b;
    b.p_cav = 1e-3;
    b.p_del = 2e-4;
    b.p_sw = 3e-4;
    b.p_cir = 5e-4;
    b.p_dep = 1e-5;
    const PulseParams pulse{3.0, 6.0};
    for (int d = 2; d <= 11; ++d) {
        const auto L = build_layout(d);
        const double N = 2.0 * d * d - 2 * d + 1;
        const double eq1 = pulse.pulse_length * b.p_dep + 4.0 * (d - 1) * (2 * d - 1) / N * (b.p_cav + b.p_del + b.p_sw) +
                           2.0 * (d - 1) * (5 * d - 2) / N * b.p_cir;
        const double eq2 = 2.0 * d * (d - 1) * pulse.pulse_length * b.p_dep +
                           4.0 * (d - 1) * (2 * d - 1) / N * (b.p_cav + b.p_del + b.p_cir) + 8.0 * d * (d - 1) / N * b.p_sw;
        EXPECT_NEAR(estimate_accumulation(L, assign_cavities(L, StructureKind::NCavity), b, pulse), eq1, 1e-14);
        EXPECT_NEAR(estimate_accumulation(L, assign_cavities(L, StructureKind::FourCavity), b, pulse), eq2, 1e-14);
    }
}

TEST(CycleTime, DepthTimesOccupation) {
    const auto L = build_layout(3);
    auto net = assign_cavities(L, StructureKind::FourCavity);
    EXPECT_DOUBLE_EQ(cycle_time(net, PulseParams{2.5, 6.0}), 12 * 6 * 2.5);
    EXPECT_DOUBLE_EQ(cycle_time(net, PulseParams{5.0, 6.0}), 2 * cycle_time(net, PulseParams{2.5, 6.0}));
    EXPECT_DOUBLE_EQ(cycle_time(net, PulseParams{1.0, 6.0}, 0.5), 12 * 6.5);
    NetworkStructure one;
    one.schedule = {{0}};
    EXPECT_DOUBLE_EQ(cycle_time(one, PulseParams{1.0, 6.0}), 6.0);
}

TEST(LayoutJson, ContainsEverything) {
    const auto L = build_layout(3);
    const auto j = layout_json(L, assign_cavities(L, StructureKind::DCavity));
    EXPECT_EQ(j["qubits"].size(), 13u);
    EXPECT_EQ(j["stabilizers"].size(), 12u);
    EXPECT_EQ(j["structure"], "d");
    EXPECT_EQ(j["schedule"].size(), static_cast<std::size_t>(j["depth"].get<int>()));
}
