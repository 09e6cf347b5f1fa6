#pragma once

// Detector graphs for the two CSS halves and MWPM decoding with uniform or
// loss-weighted edge costs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cqed/blossom.hpp"
#include "cqed/code_layout.hpp"
#include "cqed/common.hpp"
#include "cqed/frame_simulator.hpp"

namespace cqed {

enum class DecoderKind { Uniform, Weighted };

inline std::string to_string(DecoderKind k) { return k == DecoderKind::Uniform ? "uniform" : "weighted"; }

inline DecoderKind parse_decoder(const std::string& s) {
    if (s == "uniform") return DecoderKind::Uniform;
    if (s == "weighted") return DecoderKind::Weighted;
    throw UsageError("unknown decoder '" + s + "' (expected uniform or weighted)");
}

/// XOR-combination of independent flip probabilities.
inline double combine_prob(double p1, double p2) { return p1 * (1 - p2) + p2 * (1 - p1); }

inline double edge_weight(double p) {
    if (p > 0.5) throw ModelError("edge probability " + format_double(p) + " exceeds 1/2; matching model invalid");
    if (p <= 0) return kInf;
    return std::log((1 - p) / p);
}

struct GraphEdge {
    int u = 0;
    int v = 0;
    double p = 0;
    double weight = kInf;
    /// Data qubits flipped by the fault this edge stands for.
    std::vector<int> fault;
    bool time_like = false;
};

/// Detection events of one stabilizer type over cycles+1 layers plus a single
/// boundary node. Layer `cycles` compares the noiseless final readout.
struct DetectorGraph {
    PauliKind kind = PauliKind::X;
    int layers = 0;
    std::vector<int> stabs;
    std::vector<int> local;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<std::pair<int, int>>> adj;
    /// time_edge[layer * stabs + i] for layer < cycles.
    std::vector<int> time_edge;
    /// prefix_edges[cycle * num_all_stabs + s']: edges of the loss prefixes
    /// 1..w-1 of opposite-type stabilizer s' measured in that cycle.
    std::vector<std::vector<int>> prefix_edges;
    int num_all_stabs = 0;

    int num_stabs() const { return static_cast<int>(stabs.size()); }
    int num_nodes() const { return num_stabs() * layers + 1; }
    int boundary() const { return num_stabs() * layers; }
    int node(int local_stab, int layer) const { return layer * num_stabs() + local_stab; }

    std::vector<double> weights() const {
        std::vector<double> w(edges.size());
        for (std::size_t k = 0; k < edges.size(); ++k) w[k] = edges[k].weight;
        return w;
    }
    int finite_edge_count(bool time_like) const {
        return static_cast<int>(std::count_if(edges.begin(), edges.end(), [&](const GraphEdge& e) {
            return e.time_like == time_like && std::isfinite(e.weight);
        }));
    }
};

namespace detail {

class GraphBuilder {
   public:
    GraphBuilder(const NoiseModel& m, PauliKind kind) : m_(m) {
        g_.kind = kind;
        g_.layers = m.cycles + 1;
        g_.local.assign(m.layout.num_stabilizers(), -1);
        for (int s : m.layout.stabilizers_of(kind)) {
            g_.local[s] = g_.num_stabs();
            g_.stabs.push_back(s);
        }
        g_.num_all_stabs = m.layout.num_stabilizers();
        checks_of_.assign(m.layout.num_qubits(), {});
        for (int s : g_.stabs) {
            for (int q : m.layout.stabilizers[s].support) checks_of_[q].push_back(s);
        }
        g_.adj.assign(g_.num_nodes(), {});
    }

    /// Detection events toggled by `qubits` flipping in cycle c after round r
    /// (r = -1: before any measurement of the cycle).
    std::vector<int> detectors(const std::vector<int>& qubits, int c, int r) const {
        std::vector<int> out;
        for (int q : qubits) {
            for (int s : checks_of_[q]) {
                const int layer = m_.net.round_of[s] > r ? c : c + 1;
                const int nd = g_.node(g_.local[s], layer);
                auto it = std::find(out.begin(), out.end(), nd);
                if (it == out.end()) out.push_back(nd);
                else out.erase(it);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Adds a data fault; non-graphlike masks are split into single qubits.
    /// Returns the edges touched.
    std::vector<int> add_fault(const std::vector<int>& qubits, int c, int r, double p) {
        auto det = detectors(qubits, c, r);
        if (det.empty()) return {};
        if (det.size() <= 2) return {add(det, p, qubits, false)};
        std::vector<int> out;
        for (int q : qubits) {
            auto sub = add_fault({q}, c, r, p);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }

    int add(const std::vector<int>& det, double p, const std::vector<int>& fault, bool time_like) {
        const int u = det[0];
        const int v = det.size() == 2 ? det[1] : g_.boundary();
        const auto key = std::minmax(u, v);
        auto it = index_.find(key);
        int k;
        if (it == index_.end()) {
            k = static_cast<int>(g_.edges.size());
            GraphEdge e;
            e.u = key.first;
            e.v = key.second;
            e.fault = fault;
            e.time_like = time_like;
            g_.edges.push_back(std::move(e));
            dominant_.push_back(p);
            index_.emplace(key, k);
            g_.adj[key.first].push_back({key.second, k});
            g_.adj[key.second].push_back({key.first, k});
        } else {
            k = it->second;
            if (p > dominant_[k]) {
                dominant_[k] = p;
                g_.edges[k].fault = fault;
            }
        }
        g_.edges[k].p = combine_prob(g_.edges[k].p, p);
        return k;
    }

    DetectorGraph build() {
        const auto& L = m_.layout;
        const int cycles = m_.cycles;
        const PauliKind err = opposite(g_.kind);

        if (err == PauliKind::Z && m_.p_dephase > 0) {
            for (int c = 0; c < cycles; ++c) {
                for (int q = 0; q < L.num_qubits(); ++q) add_fault({q}, c, -1, m_.p_dephase);
            }
        }

        g_.prefix_edges.assign(static_cast<std::size_t>(cycles) * L.num_stabilizers(), {});
        for (int s : L.stabilizers_of(err)) {
            const auto& st = L.stabilizers[s];
            const int r = m_.net.round_of[s];
            const double survive = m_.loss_dist[s].back();
            const auto& ch = m_.channel(s);
            for (int c = 0; c < cycles; ++c) {
                for (const auto& ev : ch.events()) {
                    if (ev.mask == 0) continue;
                    std::vector<int> qs;
                    for (int i = 0; i < st.weight(); ++i) {
                        if (ev.mask >> i & 1u) qs.push_back(st.support[i]);
                    }
                    add_fault(qs, c, r, ev.prob * survive);
                }
                std::vector<int> prefix;
                for (int i = 1; i <= st.weight(); ++i) {
                    prefix.push_back(st.support[i - 1]);
                    const double p = 0.5 * m_.loss_dist[s][i];
                    if (p <= 0) continue;
                    auto touched = add_fault(prefix, c, r, p);
                    if (i < st.weight()) {
                        auto& dst = g_.prefix_edges[static_cast<std::size_t>(c) * L.num_stabilizers() + s];
                        dst.insert(dst.end(), touched.begin(), touched.end());
                    }
                }
            }
        }

        // Measurement flips and lost readouts on this graph's own checks.
        std::vector<double> p_change(g_.num_nodes(), 0.0);
        for (const auto& e : g_.edges) {
            p_change[e.u] = combine_prob(p_change[e.u], e.p);
            p_change[e.v] = combine_prob(p_change[e.v], e.p);
        }
        g_.time_edge.assign(static_cast<std::size_t>(cycles) * g_.num_stabs(), -1);
        for (int i = 0; i < g_.num_stabs(); ++i) {
            const int s = g_.stabs[i];
            const double survive = m_.loss_dist[s].back();
            const double flip = m_.channel(s).flip_probability() * survive;
            for (int c = 0; c < cycles; ++c) {
                const int a = g_.node(i, c), b = g_.node(i, c + 1);
                const double erase = (1 - survive) * p_change[a];
                const int k = add({a, b}, 0.0, {}, true);
                g_.edges[k].p = combine_prob(combine_prob(g_.edges[k].p, flip), erase);
                g_.time_edge[static_cast<std::size_t>(c) * g_.num_stabs() + i] = k;
            }
        }

        for (auto& e : g_.edges) e.weight = edge_weight(e.p);
        return std::move(g_);
    }

   private:
    const NoiseModel& m_;
    DetectorGraph g_;
    std::vector<std::vector<int>> checks_of_;
    std::map<std::pair<int, int>, int> index_;
    std::vector<double> dominant_;
};

}  // namespace detail

/// Detector graph of the checks of `kind` (X checks see Z faults and vice versa).
inline DetectorGraph build_detector_graph(const NoiseModel& m, PauliKind kind) {
    return detail::GraphBuilder(m, kind).build();
}

// ---------------------------------------------------------------------------
// Shortest paths

struct ShortestPaths {
    std::vector<double> dist;
    std::vector<int> pred_edge;
};

/// Dijkstra from `source`. The boundary node is never expanded, so paths do
/// not pass through it. Stops once every node in `targets` is settled.
inline ShortestPaths dijkstra(const DetectorGraph& g, const std::vector<double>& w, int source,
                              const std::vector<int>* targets = nullptr) {
    const int n = g.num_nodes();
    ShortestPaths sp{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
    std::vector<char> done(n, 0);
    std::vector<char> wanted;
    int remaining = 0;
    if (targets) {
        wanted.assign(n, 0);
        for (int t : *targets) {
            if (!wanted[t]) ++remaining;
            wanted[t] = 1;
        }
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    sp.dist[source] = 0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (targets && wanted[u] && --remaining == 0) break;
        if (u == g.boundary() && u != source) continue;
        for (auto [v, k] : g.adj[u]) {
            const double nd = d + w[k];
            if (nd < sp.dist[v]) {
                sp.dist[v] = nd;
                sp.pred_edge[v] = k;
                pq.push({nd, v});
            }
        }
    }
    return sp;
}

/// Toggles the fault of every edge on the stored path from the tree root to `target`.
inline void apply_path(const DetectorGraph& g, const ShortestPaths& sp, int target, std::vector<std::uint8_t>& out) {
    int v = target;
    while (sp.pred_edge[v] != -1) {
        const auto& e = g.edges[sp.pred_edge[v]];
        for (int q : e.fault) out[q] ^= 1;
        v = e.u == v ? e.v : e.u;
    }
}

// ---------------------------------------------------------------------------
// Matching

struct DefectMatching {
    /// Pairs of defect indices; second == -1 means matched to the boundary.
    std::vector<std::pair<int, int>> pairs;
    double weight = 0;
};

inline constexpr double kCostScale = 1048576.0;  // 2^20

/// Exact minimum-weight perfect matching of m defects where each may instead
/// go to the boundary. cost(i, j) and boundary_cost(i) may be +inf.
template <class PairCost, class BoundaryCost>
DefectMatching match_defects(int m, PairCost&& cost, BoundaryCost&& boundary_cost) {
    DefectMatching out;
    if (m == 0) return out;
    std::vector<double> b(m);
    for (int i = 0; i < m; ++i) b[i] = boundary_cost(i);
    auto q = [](double c) { return static_cast<std::int64_t>(std::llround(c * kCostScale)); };

    struct Cand {
        int u, v;
        std::int64_t c;
    };
    std::vector<Cand> cands;
    std::vector<std::vector<double>> pc(m, std::vector<double>(m, kInf));
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double c = cost(i, j);
            pc[i][j] = pc[j][i] = c;
            if (std::isfinite(c) && !(c >= b[i] + b[j])) cands.push_back({i, j, q(c)});
        }
        if (std::isfinite(b[i])) cands.push_back({i, m + i, q(b[i])});
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) cands.push_back({m + i, m + j, 0});
    }
    std::int64_t cmax = 0;
    for (const auto& c : cands) cmax = std::max(cmax, c.c);
    std::vector<WeightedEdge<std::int64_t>> edges;
    edges.reserve(cands.size());
    for (const auto& c : cands) edges.push_back({c.u, c.v, cmax + 1 - c.c});

    const auto mate = max_weight_matching(2 * m, std::move(edges), true);
    for (int i = 0; i < m; ++i) {
        const int j = mate[i];
        if (j < 0) throw ModelError("no perfect matching: a defect cannot reach any partner or the boundary");
        if (j == m + i) {
            out.pairs.push_back({i, -1});
            out.weight += b[i];
        } else if (j < m && i < j) {
            out.pairs.push_back({i, j});
            out.weight += pc[i][j];
        } else if (j >= m) {
            throw ModelError("matching paired a defect with a foreign boundary copy");
        }
    }
    return out;
}

struct GraphMatching {
    DefectMatching matching;
    /// Fault of the matched paths, one byte per data qubit.
    std::vector<std::uint8_t> correction;
};

/// MWPM of the given defect nodes with exact per-defect shortest paths under
/// `weights` (the graph's own weights when null).
inline GraphMatching mwpm(const DetectorGraph& g, const std::vector<int>& defects, int num_qubits,
                          const std::vector<double>* weights = nullptr) {
    GraphMatching out;
    out.correction.assign(num_qubits, 0);
    const int m = static_cast<int>(defects.size());
    if (m == 0) return out;
    const std::vector<double> base = weights ? std::vector<double>{} : g.weights();
    const std::vector<double>& w = weights ? *weights : base;

    std::vector<int> targets = defects;
    targets.push_back(g.boundary());
    std::vector<ShortestPaths> sp;
    sp.reserve(m);
    for (int d : defects) sp.push_back(dijkstra(g, w, d, &targets));

    out.matching = match_defects(
        m, [&](int i, int j) { return sp[i].dist[defects[j]]; },
        [&](int i) { return sp[i].dist[g.boundary()]; });
    for (auto [i, j] : out.matching.pairs) apply_path(g, sp[i], j < 0 ? g.boundary() : defects[j], out.correction);
    return out;
}

// ---------------------------------------------------------------------------
// Decoders

struct DecoderOptions {
    DecoderKind kind = DecoderKind::Uniform;
    double alpha = 5.0;
    /// Weighted decoding: make the time-like edge of an erased readout free.
    bool free_erasure_time_edge = true;
};

class Decoder {
   public:
    Decoder(const NoiseModel& m, DecoderOptions opt) : m_(m), opt_(opt) {
        if (opt_.kind == DecoderKind::Weighted && !(opt_.alpha > 1)) throw UsageError("alpha must be > 1");
        graphs_[0] = build_detector_graph(m, PauliKind::X);
        graphs_[1] = build_detector_graph(m, PauliKind::Z);
        if (opt_.kind == DecoderKind::Uniform) {
            for (int t = 0; t < 2; ++t) {
                const auto& g = graphs_[t];
                const auto w = g.weights();
                apsp_[t].reserve(g.num_nodes());
                for (int u = 0; u < g.num_nodes(); ++u) apsp_[t].push_back(dijkstra(g, w, u));
            }
        }
    }

    const DetectorGraph& graph(PauliKind k) const { return graphs_[k == PauliKind::X ? 0 : 1]; }
    const DecoderOptions& options() const { return opt_; }

    /// Detection events per graph after replacing lost readouts with the
    /// previous cycle's (possibly substituted) value.
    std::vector<int> defects(const ShotRecord& rec, PauliKind kind) const {
        const auto& g = graph(kind);
        std::vector<int> out;
        for (int i = 0; i < g.num_stabs(); ++i) {
            const int s = g.stabs[i];
            int prev = 0;
            for (int c = 0; c <= rec.cycles; ++c) {
                int cur = c < rec.cycles ? rec.at(c, s) : rec.final_syndrome[s];
                if (cur == 2) cur = prev;
                if (cur != prev) out.push_back(g.node(i, c));
                prev = cur;
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Pauli correction for one shot.
    PauliFrame decode(const ShotRecord& rec) const {
        PauliFrame corr(m_.layout.num_qubits());
        for (int t = 0; t < 2; ++t) {
            const auto& g = graphs_[t];
            const auto def = defects(rec, g.kind);
            auto& dst = corr.part(opposite(g.kind));
            std::vector<std::uint8_t> fix;
            if (opt_.kind == DecoderKind::Uniform) {
                fix = uniform_correction(t, def);
            } else {
                const auto w = weighted_weights(rec, g);
                fix = mwpm(g, def, m_.layout.num_qubits(), &w).correction;
            }
            for (std::size_t q = 0; q < fix.size(); ++q) dst[q] ^= fix[q];
        }
        return corr;
    }

    /// Per-shot weights of the weighted policy for graph g.
    std::vector<double> weighted_weights(const ShotRecord& rec, const DetectorGraph& g) const {
        auto w = g.weights();
        const auto& L = m_.layout;
        for (int c = 0; c < rec.cycles; ++c) {
            for (int s = 0; s < L.num_stabilizers(); ++s) {
                if (rec.at(c, s) != 2) continue;
                if (L.stabilizers[s].kind == g.kind) {
                    if (opt_.free_erasure_time_edge) {
                        w[g.time_edge[static_cast<std::size_t>(c) * g.num_stabs() + g.local[s]]] = 0.0;
                    }
                } else {
                    for (int k : g.prefix_edges[static_cast<std::size_t>(c) * L.num_stabilizers() + s]) {
                        w[k] /= opt_.alpha;
                    }
                }
            }
        }
        return w;
    }

   private:
    std::vector<std::uint8_t> uniform_correction(int t, const std::vector<int>& def) const {
        const auto& g = graphs_[t];
        const auto& ap = apsp_[t];
        std::vector<std::uint8_t> fix(m_.layout.num_qubits(), 0);
        const int m = static_cast<int>(def.size());
        if (m == 0) return fix;
        const auto match = match_defects(
            m, [&](int i, int j) { return ap[def[i]].dist[def[j]]; },
            [&](int i) { return ap[def[i]].dist[g.boundary()]; });
        for (auto [i, j] : match.pairs) apply_path(g, ap[def[i]], j < 0 ? g.boundary() : def[j], fix);
        return fix;
    }

    const NoiseModel& m_;
    DecoderOptions opt_;
    DetectorGraph graphs_[2];
    std::vector<ShortestPaths> apsp_[2];
};

/// Uniform-policy correction (convenience wrapper).
inline PauliFrame uniform_decode(const ShotRecord& rec, const Decoder& uniform) { return uniform.decode(rec); }

/// Graphviz dump of a detector graph.
inline std::string to_dot(const DetectorGraph& g) {
    std::ostringstream os;
    os << "graph detectors_" << (g.kind == PauliKind::X ? "X" : "Z") << " {\n";
    os << "  n" << g.boundary() << " [label=\"boundary\", shape=box];\n";
    for (int l = 0; l < g.layers; ++l) {
        for (int i = 0; i < g.num_stabs(); ++i) {
            os << "  n" << g.node(i, l) << " [label=\"s" << g.stabs[i] << "@" << l << "\"];\n";
        }
    }
    for (const auto& e : g.edges) {
        if (!std::isfinite(e.weight)) continue;
        os << "  n" << e.u << " -- n" << e.v << " [label=\"" << format_double(e.weight) << "\""
           << (e.time_like ? ", style=dashed" : "") << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace cqed
