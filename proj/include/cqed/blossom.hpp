#pragma once

// Maximum-weight matching in general graphs (Edmonds' blossom algorithm with
// primal-dual updates, O(n^3)). Follows the structure of J. van Rantwijk's
// reference implementation. Dual variables are stored doubled so that
// integral weights keep every quantity integral.

#include <algorithm>
#include <cassert>
#include <type_traits>
#include <vector>

#include "cqed/common.hpp"

namespace cqed {

template <class Weight>
struct WeightedEdge {
    int u;
    int v;
    Weight w;
};

template <class Weight>
class BlossomMatcher {
   public:
    BlossomMatcher(int num_vertices, std::vector<WeightedEdge<Weight>> edges)
        : n_(num_vertices), edges_(std::move(edges)) {}

    /// Returns mate[v] (or -1). With max_cardinality, only maximum-cardinality
    /// matchings are considered.
    std::vector<int> solve(bool max_cardinality) {
        init();
        if (edges_.empty()) return std::vector<int>(n_, -1);

        for (int stage = 0; stage < n_; ++stage) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = n_; b < 2 * n_; ++b) blossombestedges_[b].clear(), hasbest_[b] = false;
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < n_; ++v) {
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
            }

            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    const int v = queue_.back();
                    queue_.pop_back();
                    assert(label_[inblossom_[v]] == 1);
                    for (int p : neighbend_[v]) {
                        const int k = p / 2;
                        const int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        Weight kslack{};
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            if (kslack <= 0) allowedge_[k] = true;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                const int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            const int b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                int deltatype = -1, deltaedge = -1, deltablossom = -1;
                Weight delta{};
                if (!max_cardinality) {
                    deltatype = 1;
                    delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n_);
                }
                for (int v = 0; v < n_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        const Weight d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * n_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        const Weight ks = slack(bestedge_[b]);
                        Weight d;
                        if constexpr (std::is_integral_v<Weight>) {
                            assert(ks % 2 == 0);
                            d = ks / 2;
                        } else {
                            d = ks / 2;
                        }
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = n_; b < 2 * n_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (deltatype == -1 || dualvar_[b] < delta)) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    deltatype = 1;
                    delta = std::max(Weight{}, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
                }

                for (int v = 0; v < n_; ++v) {
                    const int l = label_[inblossom_[v]];
                    if (l == 1) dualvar_[v] -= delta;
                    else if (l == 2) dualvar_[v] += delta;
                }
                for (int b = n_; b < 2 * n_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1) dualvar_[b] += delta;
                        else if (label_[b] == 2) dualvar_[b] -= delta;
                    }
                }

                if (deltatype == 1) {
                    break;
                } else if (deltatype == 2) {
                    allowedge_[deltaedge] = true;
                    int i = edges_[deltaedge].u, j = edges_[deltaedge].v;
                    if (label_[inblossom_[i]] == 0) std::swap(i, j);
                    assert(label_[inblossom_[i]] == 1);
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = true;
                    const int i = edges_[deltaedge].u;
                    assert(label_[inblossom_[i]] == 1);
                    queue_.push_back(i);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;

            for (int b = n_; b < 2 * n_; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0) {
                    expand_blossom(b, true);
                }
            }
        }

        std::vector<int> out(n_, -1);
        for (int v = 0; v < n_; ++v) {
            if (mate_[v] >= 0) out[v] = endpoint_[mate_[v]];
        }
        return out;
    }

   private:
    void init() {
        const int m = static_cast<int>(edges_.size());
        Weight maxweight{};
        for (const auto& e : edges_) {
            if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) {
                throw ModelError("blossom: invalid edge");
            }
            maxweight = std::max(maxweight, e.w);
        }
        endpoint_.resize(2 * m);
        neighbend_.assign(n_, {});
        for (int k = 0; k < m; ++k) {
            endpoint_[2 * k] = edges_[k].u;
            endpoint_[2 * k + 1] = edges_[k].v;
            neighbend_[edges_[k].u].push_back(2 * k + 1);
            neighbend_[edges_[k].v].push_back(2 * k);
        }
        mate_.assign(n_, -1);
        label_.assign(2 * n_, 0);
        labelend_.assign(2 * n_, -1);
        inblossom_.resize(n_);
        for (int v = 0; v < n_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * n_, -1);
        blossomchilds_.assign(2 * n_, {});
        blossombase_.assign(2 * n_, -1);
        for (int v = 0; v < n_; ++v) blossombase_[v] = v;
        blossomendps_.assign(2 * n_, {});
        bestedge_.assign(2 * n_, -1);
        blossombestedges_.assign(2 * n_, {});
        hasbest_.assign(2 * n_, false);
        unusedblossoms_.clear();
        for (int b = n_; b < 2 * n_; ++b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * n_, Weight{});
        for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight;
        allowedge_.assign(m, false);
        queue_.clear();
    }

    Weight slack(int k) const {
        const auto& e = edges_[k];
        return dualvar_[e.u] + dualvar_[e.v] - 2 * e.w;
    }

    void leaves(int b, std::vector<int>& out) const {
        if (b < n_) {
            out.push_back(b);
        } else {
            for (int t : blossomchilds_[b]) leaves(t, out);
        }
    }

    std::vector<int> leaves(int b) const {
        std::vector<int> out;
        leaves(b, out);
        return out;
    }

    static int wrap(int j, int len) { return ((j % len) + len) % len; }

    void assign_label(int w, int t, int p) {
        const int b = inblossom_[w];
        assert(label_[w] == 0 && label_[b] == 0);
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            leaves(b, queue_);
        } else if (t == 2) {
            const int base = blossombase_[b];
            assert(mate_[base] >= 0);
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    /// Traces back from v and w to find a new blossom base, or -1 for an
    /// augmenting path.
    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            assert(label_[b] == 1);
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                assert(label_[b] == 2);
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].u, w = edges_[k].v;
        const int bb = inblossom_[base];
        int bv = inblossom_[v], bw = inblossom_[w];
        const int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        assert(label_[bb] == 1);
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = Weight{};
        for (int leaf : leaves(b)) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }

        std::vector<int> bestedgeto(2 * n_, -1);
        for (int child : path) {
            std::vector<int> nblist;
            if (!hasbest_[child]) {
                for (int leaf : leaves(child)) {
                    for (int p : neighbend_[leaf]) nblist.push_back(p / 2);
                }
            } else {
                nblist = blossombestedges_[child];
            }
            for (int kk : nblist) {
                int i = edges_[kk].u, j = edges_[kk].v;
                if (inblossom_[j] == b) std::swap(i, j);
                const int bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
                    bestedgeto[bj] = kk;
                }
            }
            blossombestedges_[child].clear();
            hasbest_[child] = false;
            bestedge_[child] = -1;
        }
        auto& best = blossombestedges_[b];
        best.clear();
        for (int kk : bestedgeto) {
            if (kk != -1) best.push_back(kk);
        }
        hasbest_[b] = true;
        bestedge_[b] = -1;
        for (int kk : best) {
            if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
        }
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < n_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                for (int leaf : leaves(s)) inblossom_[leaf] = s;
            }
        }

        if (!endstage && label_[b] == 2) {
            const auto& childs = blossomchilds_[b];
            const auto& endps = blossomendps_[b];
            const int len = static_cast<int>(childs.size());
            const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
            int jstep, endptrick;
            if (j & 1) {
                j -= len;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endps[wrap(j - endptrick, len)] ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endps[wrap(j - endptrick, len)] / 2] = true;
                j += jstep;
                p = endps[wrap(j - endptrick, len)] ^ endptrick;
                allowedge_[p / 2] = true;
                j += jstep;
            }
            int bv = childs[wrap(j, len)];
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (childs[wrap(j, len)] != entrychild) {
                bv = childs[wrap(j, len)];
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                int v = -1;
                for (int leaf : leaves(bv)) {
                    v = leaf;
                    if (label_[leaf] != 0) break;
                }
                if (label_[v] != 0) {
                    assert(label_[v] == 2);
                    assert(inblossom_[v] == bv);
                    label_[v] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(v, 2, labelend_[v]);
                }
                j += jstep;
            }
        }

        label_[b] = labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        hasbest_[b] = false;
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    /// Swaps matched/unmatched edges along the even-length path inside b from
    /// vertex v to the base.
    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= n_) augment_blossom(t, v);
        auto& childs = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        const int len = static_cast<int>(childs.size());
        const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
        int j = i, jstep, endptrick;
        if (i & 1) {
            j -= len;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            t = childs[wrap(j, len)];
            const int p = endps[wrap(j - endptrick, len)] ^ endptrick;
            if (t >= n_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = childs[wrap(j, len)];
            if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(childs.begin(), childs.begin() + i, childs.end());
        std::rotate(endps.begin(), endps.begin() + i, endps.end());
        blossombase_[b] = blossombase_[childs[0]];
        assert(blossombase_[b] == v);
    }

    void augment_matching(int k) {
        const int v0 = edges_[k].u, w0 = edges_[k].v;
        for (auto [s, p] : {std::pair{v0, 2 * k + 1}, std::pair{w0, 2 * k}}) {
            while (true) {
                const int bs = inblossom_[s];
                assert(label_[bs] == 1);
                if (bs >= n_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const int t = endpoint_[labelend_[bs]];
                const int bt = inblossom_[t];
                assert(label_[bt] == 2);
                s = endpoint_[labelend_[bt]];
                const int j = endpoint_[labelend_[bt] ^ 1];
                assert(blossombase_[bt] == t);
                if (bt >= n_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int n_;
    std::vector<WeightedEdge<Weight>> edges_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_;
    std::vector<std::vector<int>> blossomchilds_, blossomendps_, blossombestedges_;
    std::vector<char> hasbest_;
    std::vector<int> unusedblossoms_;
    std::vector<Weight> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
};

template <class Weight>
std::vector<int> max_weight_matching(int num_vertices, std::vector<WeightedEdge<Weight>> edges,
                                     bool max_cardinality = false) {
    return BlossomMatcher<Weight>(num_vertices, std::move(edges)).solve(max_cardinality);
}

}  // namespace cqed
