#pragma once

// Unrotated planar surface code, atom-to-cavity assignment for the three
// network structures, photon paths and measurement schedules.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cqed/common.hpp"
#include "cqed/noise_channels.hpp"
#include "json.hpp"

namespace cqed {

enum class PauliKind { X, Z };

inline PauliKind opposite(PauliKind k) { return k == PauliKind::X ? PauliKind::Z : PauliKind::X; }

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord&) const = default;
};

struct Stabilizer {
    PauliKind kind = PauliKind::X;
    Coord ancilla;
    /// Data-qubit indices in photon visit order (N, W, E, S; absent ones skipped).
    std::vector<int> support;
    int weight() const { return static_cast<int>(support.size()); }
};

struct CodeLayout {
    int d = 0;
    std::vector<Coord> data_qubits;
    std::vector<Stabilizer> stabilizers;
    /// X-type logical (column 0) and Z-type logical (row 0).
    std::vector<int> logical_x;
    std::vector<int> logical_z;
    std::map<Coord, int> qubit_at;

    int num_qubits() const { return static_cast<int>(data_qubits.size()); }
    int num_stabilizers() const { return static_cast<int>(stabilizers.size()); }

    /// Stabilizer indices of one Pauli type, in layout order.
    std::vector<int> stabilizers_of(PauliKind kind) const {
        std::vector<int> out;
        for (int s = 0; s < num_stabilizers(); ++s) {
            if (stabilizers[s].kind == kind) out.push_back(s);
        }
        return out;
    }
};

inline CodeLayout build_layout(int d) {
    if (d < 2) throw UsageError("code distance must be >= 2");
    CodeLayout L;
    L.d = d;
    const int n = 2 * d - 1;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if ((r + c) % 2 == 0) {
                L.qubit_at[{r, c}] = static_cast<int>(L.data_qubits.size());
                L.data_qubits.push_back({r, c});
            }
        }
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if ((r + c) % 2 == 0) continue;
            Stabilizer s;
            s.kind = (r % 2 == 0) ? PauliKind::X : PauliKind::Z;
            s.ancilla = {r, c};
            for (Coord nb : {Coord{r - 1, c}, Coord{r, c - 1}, Coord{r, c + 1}, Coord{r + 1, c}}) {
                auto it = L.qubit_at.find(nb);
                if (it != L.qubit_at.end()) s.support.push_back(it->second);
            }
            L.stabilizers.push_back(std::move(s));
        }
    }
    for (int c = 0; c < n; c += 2) L.logical_z.push_back(L.qubit_at.at({0, c}));
    for (int r = 0; r < n; r += 2) L.logical_x.push_back(L.qubit_at.at({r, 0}));
    return L;
}

// ---------------------------------------------------------------------------
// Network structures

enum class StructureKind { FourCavity, DCavity, NCavity };

inline std::string to_string(StructureKind k) {
    switch (k) {
        case StructureKind::FourCavity: return "4";
        case StructureKind::DCavity: return "d";
        case StructureKind::NCavity: return "n";
    }
    return "?";
}

inline StructureKind parse_structure(const std::string& s) {
    if (s == "4" || s == "four" || s == "4-cavity") return StructureKind::FourCavity;
    if (s == "d" || s == "d-cavity") return StructureKind::DCavity;
    if (s == "n" || s == "N" || s == "n-cavity") return StructureKind::NCavity;
    throw UsageError("unknown structure '" + s + "' (expected 4, d or n)");
}

struct NetworkStructure {
    StructureKind kind = StructureKind::NCavity;
    int cavity_count = 0;
    /// Cavity id hosting each data qubit.
    std::vector<int> cavity_of;
    /// Rounds of stabilizer ids measured in parallel, in time order.
    std::vector<std::vector<int>> schedule;
    /// Round index of each stabilizer.
    std::vector<int> round_of;
    /// Photon path of each stabilizer.
    std::vector<PhotonPath> paths;

    int depth() const { return static_cast<int>(schedule.size()); }
};

namespace detail {

inline PhotonPath make_path(StructureKind kind, int weight) {
    using P = PathComponent;
    PhotonPath path;
    auto& c = path.components;
    c.push_back(P::Source);
    switch (kind) {
        case StructureKind::NCavity:
            c.push_back(P::Circulator);
            for (int i = 0; i < weight; ++i) {
                c.insert(c.end(), {P::Switch, P::Cavity, P::Circulator});
            }
            break;
        case StructureKind::FourCavity:
            for (int i = 0; i < weight; ++i) {
                c.insert(c.end(), {P::Switch, P::Circulator, P::Cavity});
            }
            // Boundary stabilizers bypass the unused cavity through one more switch.
            for (int i = weight; i < 4; ++i) c.push_back(P::Switch);
            break;
        case StructureKind::DCavity:
            for (int i = 0; i < weight; ++i) {
                c.insert(c.end(), {P::Switch, P::Circulator, P::Cavity});
            }
            c.push_back(P::Switch);
            break;
    }
    c.push_back(P::Detector);
    return path;
}

}  // namespace detail

/// Greedy first-fit packing of stabilizers into rounds with no cavity reused
/// inside a round.
inline std::vector<std::vector<int>> build_schedule(const CodeLayout& layout, const NetworkStructure& net) {
    std::vector<std::vector<int>> rounds;
    std::vector<std::set<int>> used;
    for (int s = 0; s < layout.num_stabilizers(); ++s) {
        std::vector<int> cavs;
        for (int q : layout.stabilizers[s].support) cavs.push_back(net.cavity_of[q]);
        std::size_t r = 0;
        for (; r < rounds.size(); ++r) {
            bool clash = std::any_of(cavs.begin(), cavs.end(), [&](int c) { return used[r].count(c) > 0; });
            if (!clash) break;
        }
        if (r == rounds.size()) {
            rounds.emplace_back();
            used.emplace_back();
        }
        rounds[r].push_back(s);
        used[r].insert(cavs.begin(), cavs.end());
    }
    return rounds;
}

inline void check_structure(const CodeLayout& layout, const NetworkStructure& net) {
    for (const auto& s : layout.stabilizers) {
        std::set<int> cavs;
        for (int q : s.support) cavs.insert(net.cavity_of[q]);
        if (cavs.size() != s.support.size()) {
            throw ModelError("cavity assignment puts two atoms of one stabilizer in the same cavity");
        }
    }
    std::vector<int> seen(layout.num_stabilizers(), 0);
    for (const auto& round : net.schedule) {
        std::set<int> cavs;
        for (int s : round) {
            ++seen.at(s);
            for (int q : layout.stabilizers[s].support) {
                if (!cavs.insert(net.cavity_of[q]).second) throw ModelError("cavity reused within a round");
            }
        }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int k) { return k != 1; })) {
        throw ModelError("schedule does not partition the stabilizers");
    }
}

/// Assigns atoms to cavities, builds photon paths and the measurement schedule.
inline NetworkStructure assign_cavities(const CodeLayout& layout, StructureKind kind) {
    NetworkStructure net;
    net.kind = kind;
    net.cavity_of.resize(layout.num_qubits());
    const int modulus = std::max(layout.d, 4);
    for (int q = 0; q < layout.num_qubits(); ++q) {
        const auto [r, c] = layout.data_qubits[q];
        switch (kind) {
            case StructureKind::NCavity: net.cavity_of[q] = q; break;
            case StructureKind::FourCavity: net.cavity_of[q] = 2 * (r % 2) + ((r + c) / 2) % 2; break;
            case StructureKind::DCavity: net.cavity_of[q] = ((r + c) / 2 + 2 * (r % 2)) % modulus; break;
        }
    }
    net.cavity_count = static_cast<int>(std::set<int>(net.cavity_of.begin(), net.cavity_of.end()).size());
    for (const auto& s : layout.stabilizers) net.paths.push_back(detail::make_path(kind, s.weight()));
    net.schedule = build_schedule(layout, net);
    net.round_of.assign(layout.num_stabilizers(), -1);
    for (int r = 0; r < net.depth(); ++r) {
        for (int s : net.schedule[r]) net.round_of[s] = r;
    }
    check_structure(layout, net);
    return net;
}

/// Closed-form per-qubit error accumulation over one cycle, summed from the
/// structure's photon paths.
inline double estimate_accumulation(const CodeLayout& layout, const NetworkStructure& net, const NoiseBudget& b,
                                    const PulseParams& pulse) {
    double cav = 0, sw = 0, cir = 0;
    for (const auto& p : net.paths) {
        cav += p.n_cav();
        sw += p.n_sw();
        cir += p.n_cir();
    }
    const double idle_rounds = net.kind == StructureKind::NCavity ? 1.0 : static_cast<double>(net.depth());
    const double n = layout.num_qubits();
    return idle_rounds * pulse.pulse_length * b.p_dep + (cav * (b.p_cav + b.p_del) + sw * b.p_sw + cir * b.p_cir) / n;
}

/// Wall-clock duration of one syndrome cycle.
inline double cycle_time(const NetworkStructure& net, const PulseParams& pulse, double round_latency = 0.0) {
    return net.depth() * (pulse.occupation_time() + round_latency);
}

inline nlohmann::json layout_json(const CodeLayout& layout, const NetworkStructure& net) {
    using nlohmann::json;
    json j;
    j["d"] = layout.d;
    j["structure"] = to_string(net.kind);
    j["cavity_count"] = net.cavity_count;
    j["depth"] = net.depth();
    json qubits = json::array();
    for (int q = 0; q < layout.num_qubits(); ++q) {
        qubits.push_back({{"index", q},
                          {"row", layout.data_qubits[q].row},
                          {"col", layout.data_qubits[q].col},
                          {"cavity", net.cavity_of[q]}});
    }
    j["qubits"] = qubits;
    json stabs = json::array();
    for (int s = 0; s < layout.num_stabilizers(); ++s) {
        const auto& st = layout.stabilizers[s];
        const auto& path = net.paths[s];
        stabs.push_back({{"index", s},
                         {"kind", st.kind == PauliKind::X ? "X" : "Z"},
                         {"row", st.ancilla.row},
                         {"col", st.ancilla.col},
                         {"support", st.support},
                         {"round", net.round_of[s]},
                         {"n_cav", path.n_cav()},
                         {"n_sw", path.n_sw()},
                         {"n_cir", path.n_cir()}});
    }
    j["stabilizers"] = stabs;
    j["logical_x"] = layout.logical_x;
    j["logical_z"] = layout.logical_z;
    j["schedule"] = net.schedule;
    return j;
}

}  // namespace cqed
