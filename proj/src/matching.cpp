#include <algorithm>
#include <stdexcept>

#include "qec3d/decoders.hpp"

namespace qec3d {

RingMatch match_ring(std::vector<std::size_t> defects, std::size_t m) {
    std::sort(defects.begin(), defects.end());
    if (std::adjacent_find(defects.begin(), defects.end()) != defects.end()) {
        throw std::invalid_argument("match_ring: repeated defect");
    }
    if (!defects.empty() && defects.back() >= m) throw std::invalid_argument("match_ring: defect outside ring");
    if (defects.size() % 2 != 0) throw InvalidSyndrome("odd number of defects on a symmetry line");
    RingMatch out;
    if (defects.empty()) return out;

    const std::size_t k = defects.size() / 2;
    std::size_t cost_a = 0;
    for (std::size_t i = 0; i < k; ++i) cost_a += defects[2 * i + 1] - defects[2 * i];
    const std::size_t cost_b = m - cost_a;
    // Pairing A flips qubit 0 exactly when defect 0 is present.
    const bool use_a = cost_a < cost_b || (cost_a == cost_b && defects.front() != 0);
    if (use_a) {
        for (std::size_t i = 0; i < k; ++i) {
            out.pairs.emplace_back(defects[2 * i], defects[2 * i + 1]);
            for (std::size_t q = defects[2 * i]; q < defects[2 * i + 1]; ++q) out.flips.push_back(q);
        }
        out.cost = cost_a;
    } else {
        for (std::size_t q = 0; q < defects.front(); ++q) out.flips.push_back(q);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            out.pairs.emplace_back(defects[2 * i + 1], defects[2 * i + 2]);
            for (std::size_t q = defects[2 * i + 1]; q < defects[2 * i + 2]; ++q) out.flips.push_back(q);
        }
        out.pairs.emplace_back(defects.back(), defects.front());
        for (std::size_t q = defects.back(); q < m; ++q) out.flips.push_back(q);
        out.cost = cost_b;
    }
    return out;
}

namespace {

// Edmonds' blossom algorithm with primal-dual updates, O(V^3).
class BlossomMatcher {
public:
    using Edge = std::tuple<std::size_t, std::size_t, std::int64_t>;

    BlossomMatcher(std::size_t vertices, const std::vector<Edge>& edges, bool max_cardinality)
        : nv_(static_cast<long>(vertices)), ne_(static_cast<long>(edges.size())), maxcard_(max_cardinality) {
        std::int64_t maxw = 0;
        for (const auto& [i, j, w] : edges) {
            if (i == j || i >= vertices || j >= vertices) throw std::invalid_argument("matching: bad edge");
            ei_.push_back(static_cast<long>(i));
            ej_.push_back(static_cast<long>(j));
            ew_.push_back(w);
            maxw = std::max(maxw, w);
        }
        endpoint_.resize(2 * ne_);
        for (long p = 0; p < 2 * ne_; ++p) endpoint_[p] = (p % 2 == 0) ? ei_[p / 2] : ej_[p / 2];
        neighbend_.resize(nv_);
        for (long k = 0; k < ne_; ++k) {
            neighbend_[ei_[k]].push_back(2 * k + 1);
            neighbend_[ej_[k]].push_back(2 * k);
        }
        mate_.assign(nv_, -1);
        label_.assign(2 * nv_, 0);
        labelend_.assign(2 * nv_, -1);
        inblossom_.resize(nv_);
        for (long v = 0; v < nv_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * nv_, -1);
        childs_.resize(2 * nv_);
        endps_.resize(2 * nv_);
        blossombase_.assign(2 * nv_, -1);
        for (long v = 0; v < nv_; ++v) blossombase_[v] = v;
        bestedge_.assign(2 * nv_, -1);
        bestedges_.resize(2 * nv_);
        bestedges_set_.assign(2 * nv_, 0);
        for (long b = 2 * nv_ - 1; b >= nv_; --b) unused_.push_back(b);
        dual_.assign(2 * nv_, 0);
        for (long v = 0; v < nv_; ++v) dual_[v] = maxw;
        allow_.assign(ne_, 0);
    }

    std::vector<long> run() {
        for (long round = 0; round < nv_; ++round) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (long b = nv_; b < 2 * nv_; ++b) {
                bestedges_[b].clear();
                bestedges_set_[b] = 0;
            }
            std::fill(allow_.begin(), allow_.end(), 0);
            queue_.clear();
            for (long v = 0; v < nv_; ++v) {
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
            }
            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    const long v = queue_.back();
                    queue_.pop_back();
                    for (long p : neighbend_[v]) {
                        const long k = p / 2;
                        const long w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        std::int64_t kslack = 0;
                        if (!allow_[k]) {
                            kslack = slack(k);
                            if (kslack <= 0) allow_[k] = 1;
                        }
                        if (allow_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                const long base = scan_blossom(v, w);
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
                            const long b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                int deltatype = -1;
                std::int64_t delta = 0;
                long deltaedge = -1, deltablossom = -1;
                if (!maxcard_) {
                    deltatype = 1;
                    delta = *std::min_element(dual_.begin(), dual_.begin() + nv_);
                }
                for (long v = 0; v < nv_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        const std::int64_t d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (long b = 0; b < 2 * nv_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        const std::int64_t ks = slack(bestedge_[b]);
                        if (ks % 2 != 0) throw std::logic_error("matching: odd slack between S-blossoms");
                        const std::int64_t d = ks / 2;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (long b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (deltatype == -1 || dual_[b] < delta)) {
                        delta = dual_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    deltatype = 1;
                    delta = std::max<std::int64_t>(0, *std::min_element(dual_.begin(), dual_.begin() + nv_));
                }
                for (long v = 0; v < nv_; ++v) {
                    if (label_[inblossom_[v]] == 1) {
                        dual_[v] -= delta;
                    } else if (label_[inblossom_[v]] == 2) {
                        dual_[v] += delta;
                    }
                }
                for (long b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1) {
                            dual_[b] += delta;
                        } else if (label_[b] == 2) {
                            dual_[b] -= delta;
                        }
                    }
                }
                if (deltatype == 1) break;
                if (deltatype == 2) {
                    allow_[deltaedge] = 1;
                    long i = ei_[deltaedge], j = ej_[deltaedge];
                    if (label_[inblossom_[i]] == 0) std::swap(i, j);
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allow_[deltaedge] = 1;
                    queue_.push_back(ei_[deltaedge]);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;
            for (long b = nv_; b < 2 * nv_; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dual_[b] == 0) {
                    expand_blossom(b, true);
                }
            }
        }
        std::vector<long> out(nv_, -1);
        for (long v = 0; v < nv_; ++v) {
            if (mate_[v] >= 0) out[v] = endpoint_[mate_[v]];
        }
        return out;
    }

private:
    std::int64_t slack(long k) const { return dual_[ei_[k]] + dual_[ej_[k]] - 2 * ew_[k]; }

    static long wrap(long i, long n) { return ((i % n) + n) % n; }

    void leaves(long b, std::vector<long>& out) const {
        if (b < nv_) {
            out.push_back(b);
            return;
        }
        for (long t : childs_[b]) leaves(t, out);
    }
    std::vector<long> leaves(long b) const {
        std::vector<long> out;
        leaves(b, out);
        return out;
    }

    void assign_label(long w, long t, long p) {
        const long b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            leaves(b, queue_);
        } else if (t == 2) {
            const long base = blossombase_[b];
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    long scan_blossom(long v, long w) {
        std::vector<long> path;
        long base = -1;
        while (v != -1 || w != -1) {
            long b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (long b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(long base, long k) {
        long v = ei_[k], w = ej_[k];
        const long bb = inblossom_[base];
        long bv = inblossom_[v], bw = inblossom_[w];
        const long b = unused_.back();
        unused_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        std::vector<long> path, ep;
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            ep.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(ep.begin(), ep.end());
        ep.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            ep.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        childs_[b] = path;
        endps_[b] = ep;
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dual_[b] = 0;
        for (long lv : leaves(b)) {
            if (label_[inblossom_[lv]] == 2) queue_.push_back(lv);
            inblossom_[lv] = b;
        }
        std::vector<long> bestedgeto(2 * nv_, -1);
        for (long sb : path) {
            std::vector<long> nblist;
            if (!bestedges_set_[sb]) {
                for (long lv : leaves(sb)) {
                    for (long p : neighbend_[lv]) nblist.push_back(p / 2);
                }
            } else {
                nblist = bestedges_[sb];
            }
            for (long kk : nblist) {
                long i = ei_[kk], j = ej_[kk];
                if (inblossom_[j] == b) std::swap(i, j);
                const long bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
                    bestedgeto[bj] = kk;
                }
            }
            bestedges_[sb].clear();
            bestedges_set_[sb] = 0;
            bestedge_[sb] = -1;
        }
        bestedges_[b].clear();
        for (long kk : bestedgeto) {
            if (kk != -1) bestedges_[b].push_back(kk);
        }
        bestedges_set_[b] = 1;
        bestedge_[b] = -1;
        for (long kk : bestedges_[b]) {
            if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
        }
    }

    void expand_blossom(long b, bool endstage) {
        const std::vector<long> children = childs_[b];
        for (long s : children) {
            blossomparent_[s] = -1;
            if (s < nv_) {
                inblossom_[s] = s;
            } else if (endstage && dual_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                for (long lv : leaves(s)) inblossom_[lv] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            const long len = static_cast<long>(children.size());
            const auto& ep = endps_[b];
            auto ch = [&](long i) { return children[wrap(i, len)]; };
            auto en = [&](long i) { return ep[wrap(i, len)]; };
            const long entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            long j = std::find(children.begin(), children.end(), entrychild) - children.begin();
            long jstep, endptrick;
            if (j & 1) {
                j -= len;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            long p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[en(j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allow_[en(j - endptrick) / 2] = 1;
                j += jstep;
                p = en(j - endptrick) ^ endptrick;
                allow_[p / 2] = 1;
                j += jstep;
            }
            long bv = ch(j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (ch(j) != entrychild) {
                bv = ch(j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                long found = -1;
                for (long lv : leaves(bv)) {
                    if (label_[lv] != 0) {
                        found = lv;
                        break;
                    }
                }
                if (found >= 0) {
                    label_[found] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(found, 2, labelend_[found]);
                }
                j += jstep;
            }
        }
        label_[b] = labelend_[b] = -1;
        childs_[b].clear();
        endps_[b].clear();
        blossombase_[b] = -1;
        bestedges_[b].clear();
        bestedges_set_[b] = 0;
        bestedge_[b] = -1;
        unused_.push_back(b);
    }

    void augment_blossom(long b, long v) {
        long t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= nv_) augment_blossom(t, v);
        const long len = static_cast<long>(childs_[b].size());
        const long i = std::find(childs_[b].begin(), childs_[b].end(), t) - childs_[b].begin();
        long j = i, jstep, endptrick;
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
            t = childs_[b][wrap(j, len)];
            const long p = endps_[b][wrap(j - endptrick, len)] ^ endptrick;
            if (t >= nv_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = childs_[b][wrap(j, len)];
            if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(childs_[b].begin(), childs_[b].begin() + i, childs_[b].end());
        std::rotate(endps_[b].begin(), endps_[b].begin() + i, endps_[b].end());
        blossombase_[b] = blossombase_[childs_[b][0]];
    }

    void augment_matching(long k) {
        const long v = ei_[k], w = ej_[k];
        for (auto [s, p] : {std::pair{v, 2 * k + 1}, std::pair{w, 2 * k}}) {
            while (true) {
                const long bs = inblossom_[s];
                if (bs >= nv_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const long t = endpoint_[labelend_[bs]];
                const long bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                const long j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= nv_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    long nv_, ne_;
    bool maxcard_;
    std::vector<long> ei_, ej_;
    std::vector<std::int64_t> ew_;
    std::vector<long> endpoint_;
    std::vector<std::vector<long>> neighbend_;
    std::vector<long> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_, unused_;
    std::vector<std::vector<long>> childs_, endps_, bestedges_;
    std::vector<char> bestedges_set_;
    std::vector<std::int64_t> dual_;
    std::vector<char> allow_;
    std::vector<long> queue_;
};

}  // namespace

std::vector<long> max_weight_matching(std::size_t vertices, const std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>>& edges,
                                      bool max_cardinality) {
    if (edges.empty()) return std::vector<long>(vertices, -1);
    return BlossomMatcher(vertices, edges, max_cardinality).run();
}

std::vector<std::size_t> mwpm(std::size_t count, const std::function<std::int64_t(std::size_t, std::size_t)>& weight) {
    if (count % 2 != 0) throw InvalidSyndrome("odd number of defects for perfect matching");
    if (count == 0) return {};
    std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> edges;
    edges.reserve(count * (count - 1) / 2);
    std::int64_t wmax = 0;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            const std::int64_t w = weight(i, j);
            if (w < 0) throw std::invalid_argument("mwpm: negative weight");
            wmax = std::max(wmax, w);
            edges.emplace_back(i, j, w);
        }
    }
    for (auto& e : edges) std::get<2>(e) = wmax + 1 - std::get<2>(e);
    const auto mate = max_weight_matching(count, edges, true);
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (mate[i] < 0) throw std::logic_error("mwpm: matching is not perfect");
        out[i] = static_cast<std::size_t>(mate[i]);
    }
    return out;
}

}  // namespace qec3d
