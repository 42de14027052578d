#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "decoders_internal.hpp"

namespace qec3d {

namespace {

using detail::Incidence;

// Qubits seen by a product of generators under pure Z noise.
std::vector<std::uint32_t> z_seen(const StabilizerCode& code, const std::vector<std::uint32_t>& gens) {
    std::map<std::uint32_t, int> count;
    for (auto g : gens) {
        for (const auto& t : code.stabilizers[g].terms()) {
            if (has_x(t.letter)) count[t.qubit] ^= 1;
        }
    }
    std::vector<std::uint32_t> out;
    for (const auto& [q, c] : count) {
        if (c) out.push_back(q);
    }
    return out;
}

// Cycles of two-body checks: qubits[i] sits between checks[i] and checks[i+1].
struct RingStage {
    std::vector<std::vector<std::uint32_t>> derived;
    std::vector<std::vector<std::uint32_t>> checks;
    std::vector<std::vector<std::uint32_t>> qubits;
};

RingStage make_stage(const StabilizerCode& code, std::vector<std::vector<std::uint32_t>> derived) {
    RingStage st;
    st.derived = std::move(derived);
    const std::size_t nc = st.derived.size();
    std::vector<std::array<std::uint32_t, 2>> check_qubits(nc);
    std::map<std::uint32_t, std::vector<std::uint32_t>> qubit_checks;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto seen = z_seen(code, st.derived[c]);
        if (seen.size() != 2) throw std::invalid_argument("symmetry decoder: check is not two-body under Z noise");
        check_qubits[c] = {seen[0], seen[1]};
        for (auto q : seen) qubit_checks[q].push_back(static_cast<std::uint32_t>(c));
    }
    for (const auto& [q, cs] : qubit_checks) {
        if (cs.size() != 2) throw std::invalid_argument("symmetry decoder: qubit is not on exactly two line checks");
    }
    std::vector<char> visited(nc, 0);
    for (std::size_t c0 = 0; c0 < nc; ++c0) {
        if (visited[c0]) continue;
        std::vector<std::uint32_t> checks{static_cast<std::uint32_t>(c0)}, qubits;
        visited[c0] = 1;
        std::uint32_t cur = static_cast<std::uint32_t>(c0);
        std::uint32_t q = check_qubits[c0][0];
        while (true) {
            qubits.push_back(q);
            const auto& cs = qubit_checks[q];
            const std::uint32_t next = cs[0] == cur ? cs[1] : cs[0];
            if (next == c0) break;
            if (visited[next]) throw std::logic_error("symmetry decoder: malformed line");
            visited[next] = 1;
            checks.push_back(next);
            q = check_qubits[next][0] == q ? check_qubits[next][1] : check_qubits[next][0];
            cur = next;
        }
        st.checks.push_back(std::move(checks));
        st.qubits.push_back(std::move(qubits));
    }
    return st;
}

// All single generators that act as two-body checks under pure Z noise.
RingStage pair_stage(const StabilizerCode& code, std::string_view sector_prefix = "") {
    std::vector<std::vector<std::uint32_t>> derived;
    for (std::size_t g = 0; g < code.num_stabilizers(); ++g) {
        if (!std::string_view(code.sectors[g]).starts_with(sector_prefix)) continue;
        if (z_seen(code, {static_cast<std::uint32_t>(g)}).size() == 2) derived.push_back({static_cast<std::uint32_t>(g)});
    }
    return make_stage(code, std::move(derived));
}

struct DecodeState {
    std::vector<std::uint8_t> syndrome;
    std::vector<std::uint8_t> flips;

    void flip(const Incidence& inc, std::size_t q) {
        inc.apply(syndrome, q, Pauli::Z);
        flips[q] ^= 1U;
    }
};

// Matches every line of the stage; returns the number of flips per line.
std::vector<std::size_t> run_stage(const RingStage& st, const Incidence& inc, DecodeState& state) {
    std::vector<std::size_t> per_ring(st.checks.size(), 0);
    for (std::size_t r = 0; r < st.checks.size(); ++r) {
        std::vector<std::size_t> defects;
        for (std::size_t i = 0; i < st.checks[r].size(); ++i) {
            std::uint8_t b = 0;
            for (auto g : st.derived[st.checks[r][i]]) b ^= state.syndrome[g];
            if (b) defects.push_back(i);
        }
        if (defects.empty()) continue;
        const auto m = match_ring(std::move(defects), st.checks[r].size());
        for (auto i : m.flips) state.flip(inc, st.qubits[r][i]);
        per_ring[r] = m.flips.size();
    }
    return per_ring;
}

void require_cover(const StabilizerCode& code, std::initializer_list<const RingStage*> stages) {
    std::size_t covered = 0;
    for (const auto* st : stages) {
        for (const auto& r : st->qubits) covered += r.size();
    }
    if (covered != code.n) throw std::invalid_argument("symmetry decoder requires the Clifford-deformed code");
}

DecodeState start(const StabilizerCode& code, const Syndrome& s) {
    if (s.size() != code.num_stabilizers()) throw std::invalid_argument("symmetry decoder: syndrome size mismatch");
    return DecodeState{s.bits(), std::vector<std::uint8_t>(code.n, 0)};
}

DecodeResult finish(const StabilizerCode& code, const DecodeState& state) {
    DecodeResult res;
    std::vector<PauliOperator::Term> terms;
    for (std::size_t q = 0; q < state.flips.size(); ++q) {
        if (state.flips[q]) terms.push_back({static_cast<std::uint32_t>(q), Pauli::Z});
    }
    res.correction = PauliOperator(code.n, std::move(terms));
    res.converged = std::all_of(state.syndrome.begin(), state.syndrome.end(), [](std::uint8_t b) { return b == 0; });
    return res;
}

DecodeResult invalid(const StabilizerCode& code) {
    DecodeResult res;
    res.correction = PauliOperator(code.n);
    res.converged = false;
    res.invalid_syndrome = true;
    return res;
}

int wrap(int v, int n) { return ((v % n) + n) % n; }

// Shortest signed displacement on a cycle; ties go forward.
int torus_step(int from, int to, int n) {
    const int d = wrap(to - from, n);
    return d <= n - d ? d : d - n;
}

// Lookup of edge qubits of a periodic cubic lattice by (vertex, axis).
class EdgeIndex {
public:
    explicit EdgeIndex(const StabilizerCode& code) : dims_(code.dims) {
        index_.assign(static_cast<std::size_t>(3 * dims_[0] * dims_[1] * dims_[2]), -1);
        for (std::size_t q = 0; q < code.n; ++q) {
            const auto& c = code.coords[q];
            if (c.axis < 0) throw std::invalid_argument("symmetry decoder: expected edge qubits");
            std::array<int, 3> v{};
            for (int a = 0; a < 3; ++a) v[a] = (a == c.axis ? c.pos[a] - 1 : c.pos[a]) / 2;
            index_[slot(v[0], v[1], v[2], c.axis)] = static_cast<long>(q);
        }
    }
    std::size_t at(int x, int y, int z, int axis) const {
        const long q = index_[slot(wrap(x, dims_[0]), wrap(y, dims_[1]), wrap(z, dims_[2]), axis)];
        if (q < 0) throw std::logic_error("symmetry decoder: missing edge");
        return static_cast<std::size_t>(q);
    }
    const std::array<int, 3>& dims() const { return dims_; }

private:
    std::size_t slot(int x, int y, int z, int axis) const {
        return static_cast<std::size_t>(3 * (x + dims_[0] * (y + dims_[1] * z)) + axis);
    }
    std::array<int, 3> dims_;
    std::vector<long> index_;
};

void require_periodic(const StabilizerCode& code, std::string_view family) {
    if (code.family != family || code.boundary != Boundary::periodic) {
        throw std::invalid_argument("symmetry decoder: expected a periodic " + std::string(family) + " code");
    }
}

// ---------------------------------------------------------------------------

class CubicSymmetry : public Decoder {
public:
    explicit CubicSymmetry(const StabilizerCode& code) {
        require_periodic(code, "surface3d-cubic");
        auto p = std::make_shared<Plan>(Plan{code, Incidence(code), pair_stage(code), EdgeIndex(code), {}});
        const auto& d = code.dims;
        p->face_xy.assign(static_cast<std::size_t>(d[0] * d[1]), 0);
        for (std::size_t g = 0; g < code.num_stabilizers(); ++g) {
            if (code.sectors[g] != "face-xy") continue;
            int x = -1, y = -1, z = -1;
            for (const auto& t : code.stabilizers[g].terms()) {
                const auto& c = code.coords[t.qubit];
                if (c.axis == 0) x = (c.pos[0] - 1) / 2;
                if (c.axis == 1) y = (c.pos[1] - 1) / 2;
                z = c.pos[2] / 2;
            }
            if (z == 0) p->face_xy[static_cast<std::size_t>(x + d[0] * y)] = g;
        }
        require_cover(code, {&p->lines});
        plan_ = std::move(p);
    }

    DecodeResult decode(const Syndrome& s, CounterRng&) override {
        const Plan& p = *plan_;
        DecodeState st = start(p.code, s);
        try {
            run_stage(p.lines, p.inc, st);
            const auto& d = p.code.dims;
            std::vector<std::array<int, 2>> defects;
            for (int y = 0; y < d[1]; ++y) {
                for (int x = 0; x < d[0]; ++x) {
                    if (st.syndrome[p.face_xy[static_cast<std::size_t>(x + d[0] * y)]]) defects.push_back({x, y});
                }
            }
            const auto mate = mwpm(defects.size(), [&](std::size_t i, std::size_t j) {
                return std::abs(torus_step(defects[i][0], defects[j][0], d[0])) +
                       std::abs(torus_step(defects[i][1], defects[j][1], d[1]));
            });
            for (std::size_t i = 0; i < mate.size(); ++i) {
                if (mate[i] < i) continue;
                // Faces are labelled by their minimum corner; crossing to the
                // next face in x passes a y-edge and vice versa.
                int x = defects[i][0], y = defects[i][1];
                const int dx = torus_step(x, defects[mate[i]][0], d[0]);
                const int dy = torus_step(y, defects[mate[i]][1], d[1]);
                auto column = [&](int ex, int ey, int axis) {
                    for (int z = 0; z < d[2]; ++z) st.flip(p.inc, p.edges.at(ex, ey, z, axis));
                };
                for (int k = 0; k < std::abs(dx); ++k) {
                    if (dx > 0) {
                        column(x + 1, y, 1);
                        ++x;
                    } else {
                        column(x, y, 1);
                        --x;
                    }
                }
                for (int k = 0; k < std::abs(dy); ++k) {
                    if (dy > 0) {
                        column(x, y + 1, 0);
                        ++y;
                    } else {
                        column(x, y, 0);
                        --y;
                    }
                }
            }
        } catch (const InvalidSyndrome&) {
            return invalid(p.code);
        }
        return finish(p.code, st);
    }

    std::string name() const override { return "symmetry"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<CubicSymmetry>(*this); }

private:
    struct Plan {
        StabilizerCode code;
        Incidence inc;
        RingStage lines;
        EdgeIndex edges;
        std::vector<std::size_t> face_xy;
    };
    std::shared_ptr<const Plan> plan_;
};

// ---------------------------------------------------------------------------

class CheckerboardSymmetry : public Decoder {
public:
    explicit CheckerboardSymmetry(const StabilizerCode& code) {
        require_periodic(code, "surface3d-checkerboard");
        auto p = std::make_shared<Plan>(Plan{code, Incidence(code), {}, {}, {}, {}, {}});
        p->stage1 = pair_stage(code, "cube");
        p->stage3 = pair_stage(code, "triangle");

        // Product of the four bottom triangles of an odd cube: a two-body
        // check on its undeformed vertical edges.
        std::vector<std::uint32_t> triangles;
        for (std::size_t g = 0; g < code.num_stabilizers(); ++g) {
            if (code.sectors[g] == "triangle") triangles.push_back(static_cast<std::uint32_t>(g));
        }
        if (triangles.size() % 8 != 0) throw std::invalid_argument("symmetry decoder: unexpected triangle layout");
        std::vector<std::vector<std::uint32_t>> bottoms;
        for (std::size_t i = 0; i < triangles.size(); i += 8) {
            bottoms.push_back({triangles[i], triangles[i + 1], triangles[i + 2], triangles[i + 3]});
        }
        p->stage2 = make_stage(code, std::move(bottoms));
        require_cover(code, {&p->stage1, &p->stage2, &p->stage3});

        std::map<std::uint32_t, std::uint32_t> row_of;
        for (auto g : triangles) {
            if (z_seen(code, {g}).size() == 3) {
                row_of[g] = static_cast<std::uint32_t>(p->three_body.size());
                p->three_body.push_back(g);
            }
        }
        for (const RingStage* st : {&p->stage2, &p->stage3}) {
            for (const auto& ring : st->qubits) {
                std::vector<std::uint8_t> col(p->three_body.size(), 0);
                for (auto q : ring) {
                    for (const auto& [g, letter] : p->inc.by_qubit[q]) {
                        auto it = row_of.find(g);
                        if (it != row_of.end() && anticommute(letter, Pauli::Z)) col[it->second] ^= 1U;
                    }
                }
                std::vector<std::uint32_t> rows;
                for (std::size_t i = 0; i < col.size(); ++i) {
                    if (col[i]) rows.push_back(static_cast<std::uint32_t>(i));
                }
                p->complement_rows.push_back(std::move(rows));
            }
        }
        plan_ = std::move(p);
    }

    DecodeResult decode(const Syndrome& s, CounterRng&) override {
        const Plan& p = *plan_;
        DecodeState st = start(p.code, s);
        try {
            run_stage(p.stage1, p.inc, st);
            auto flips = run_stage(p.stage2, p.inc, st);
            const auto f3 = run_stage(p.stage3, p.inc, st);
            flips.insert(flips.end(), f3.begin(), f3.end());
            if (!fix_three_body(p, st, flips)) {
                auto res = finish(p.code, st);
                res.converged = false;
                return res;
            }
        } catch (const InvalidSyndrome&) {
            return invalid(p.code);
        }
        return finish(p.code, st);
    }

    std::string name() const override { return "symmetry"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<CheckerboardSymmetry>(*this); }

private:
    struct Plan {
        StabilizerCode code;
        Incidence inc;
        RingStage stage1, stage2, stage3;
        std::vector<std::uint32_t> three_body;
        // Three-body rows toggled by complementing each stage-2/3 line.
        std::vector<std::vector<std::uint32_t>> complement_rows;
    };

    const std::vector<std::uint32_t>& ring_qubits(const Plan& p, std::size_t r) const {
        const std::size_t n2 = p.stage2.qubits.size();
        return r < n2 ? p.stage2.qubits[r] : p.stage3.qubits[r - n2];
    }

    // Complements whole lines so that the three-body triangles are satisfied,
    // preferring lines whose complement adds the least weight.
    bool fix_three_body(const Plan& p, DecodeState& st, const std::vector<std::size_t>& flips) const {
        const std::size_t rows = p.three_body.size();
        bool any = false;
        for (auto g : p.three_body) any = any || st.syndrome[g];
        if (!any) return true;
        const std::size_t nr = p.complement_rows.size();
        std::vector<std::size_t> order(nr);
        std::iota(order.begin(), order.end(), 0);
        auto cost = [&](std::size_t r) {
            return static_cast<long>(ring_qubits(p, r).size()) - 2 * static_cast<long>(flips[r]);
        };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost(a) < cost(b); });
        gf2::DenseMatrix m(rows, nr + 1);
        for (std::size_t j = 0; j < nr; ++j) {
            for (auto i : p.complement_rows[order[j]]) m.flip(i, j);
        }
        for (std::size_t i = 0; i < rows; ++i) {
            if (st.syndrome[p.three_body[i]]) m.flip(i, nr);
        }
        const auto e = gf2::rref(std::move(m));
        for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
            if (e.pivot_cols[i] == nr) return false;
            if (!e.matrix.get(i, nr)) continue;
            for (auto q : ring_qubits(p, order[e.pivot_cols[i]])) st.flip(p.inc, q);
        }
        return true;
    }

    std::shared_ptr<const Plan> plan_;
};

// ---------------------------------------------------------------------------

class LineSymmetry2d : public Decoder {
public:
    explicit LineSymmetry2d(const StabilizerCode& code)
        : plan_(std::make_shared<Plan>(Plan{code, Incidence(code), pair_stage(code)})) {
        require_cover(code, {&plan_->lines});
    }

    DecodeResult decode(const Syndrome& s, CounterRng&) override {
        const Plan& p = *plan_;
        DecodeState st = start(p.code, s);
        try {
            run_stage(p.lines, p.inc, st);
        } catch (const InvalidSyndrome&) {
            return invalid(p.code);
        }
        return finish(p.code, st);
    }
    std::string name() const override { return "symmetry"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<LineSymmetry2d>(*this); }

private:
    struct Plan {
        StabilizerCode code;
        Incidence inc;
        RingStage lines;
    };
    std::shared_ptr<const Plan> plan_;
};

// Two-step decoder for the XY code: column matchings estimate the parities of
// horizontal neighbour pairs, row matchings then recover the qubits.
class XySymmetry2d : public Decoder {
public:
    explicit XySymmetry2d(const StabilizerCode& code) : plan_(std::make_shared<Plan>(Plan{code, Incidence(code)})) {
        const int lx = code.dims[0], ly = code.dims[1];
        if (code.n != static_cast<std::size_t>(lx * ly) || code.num_stabilizers() != code.n) {
            throw std::invalid_argument("symmetry decoder: unexpected XY code layout");
        }
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                const auto& c = code.coords[static_cast<std::size_t>(x + lx * y)].pos;
                const auto& g = code.stabilizers[static_cast<std::size_t>(x + lx * y)];
                if (c[0] != 2 * x || c[1] != 2 * y || g.at(qubit(x + 1, y + 1)) == Pauli::I) {
                    throw std::invalid_argument("symmetry decoder: unexpected XY code layout");
                }
            }
        }
    }

    DecodeResult decode(const Syndrome& s, CounterRng&) override {
        const Plan& p = *plan_;
        const int lx = p.code.dims[0], ly = p.code.dims[1];
        DecodeState st = start(p.code, s);
        try {
            // u[x + lx*y] estimates z(x, y) + z(x+1, y).
            std::vector<std::uint8_t> u(p.code.n, 0);
            std::vector<std::size_t> strip_weight(static_cast<std::size_t>(lx), 0);
            for (int x = 0; x < lx; ++x) {
                std::vector<std::size_t> defects;
                for (int y = 0; y < ly; ++y) {
                    if (st.syndrome[qubit(x, y)]) defects.push_back(static_cast<std::size_t>(y));
                }
                for (auto i : match_ring(std::move(defects), static_cast<std::size_t>(ly)).flips) {
                    u[qubit(x, static_cast<int>(i) + 1)] = 1;
                    ++strip_weight[static_cast<std::size_t>(x)];
                }
            }
            int parity = 0;
            for (int x = 0; x < lx; ++x) parity ^= u[qubit(x, 0)];
            if (parity) {
                int best = 0;
                long best_cost = 0;
                for (int x = 0; x < lx; ++x) {
                    const long c = ly - 2 * static_cast<long>(strip_weight[static_cast<std::size_t>(x)]);
                    if (x == 0 || c < best_cost) {
                        best = x;
                        best_cost = c;
                    }
                }
                for (int y = 0; y < ly; ++y) u[qubit(best, y)] ^= 1U;
            }
            for (int y = 0; y < ly; ++y) {
                std::vector<std::size_t> defects;
                for (int x = 0; x < lx; ++x) {
                    if (u[qubit(x, y)]) defects.push_back(static_cast<std::size_t>(x));
                }
                for (auto i : match_ring(std::move(defects), static_cast<std::size_t>(lx)).flips) {
                    st.flip(p.inc, qubit(static_cast<int>(i) + 1, y));
                }
            }
        } catch (const InvalidSyndrome&) {
            return invalid(p.code);
        }
        return finish(p.code, st);
    }
    std::string name() const override { return "symmetry"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<XySymmetry2d>(*this); }

private:
    struct Plan {
        StabilizerCode code;
        Incidence inc;
    };
    std::size_t qubit(int x, int y) const {
        const auto& d = plan_->code.dims;
        return static_cast<std::size_t>(wrap(x, d[0]) + d[0] * wrap(y, d[1]));
    }
    std::shared_ptr<const Plan> plan_;
};

std::unique_ptr<Decoder> make_2d(const StabilizerCode& code) {
    if (code.boundary != Boundary::periodic) throw std::invalid_argument("symmetry decoder: 2D codes must be periodic");
    if (code.family == "surface2d-xy") return std::make_unique<XySymmetry2d>(code);
    if (code.family == "surface2d-xzzx" || code.family == "surface2d-xzzx-rotated") {
        return std::make_unique<LineSymmetry2d>(code);
    }
    throw std::invalid_argument("symmetry decoder: unsupported 2D family " + code.family);
}

}  // namespace

namespace detail {

std::unique_ptr<Decoder> make_symmetry_decoder(const StabilizerCode& code) {
    if (code.family == "surface3d-cubic") return std::make_unique<CubicSymmetry>(code);
    if (code.family == "surface3d-checkerboard") return std::make_unique<CheckerboardSymmetry>(code);
    if (code.family.starts_with("surface2d")) return make_2d(code);
    throw std::invalid_argument("symmetry decoder: unsupported family " + code.family);
}

}  // namespace detail

DecodeResult symmetry_decode_cubic(const StabilizerCode& code, const Syndrome& s) {
    CounterRng rng(0, 0);
    return CubicSymmetry(code).decode(s, rng);
}

DecodeResult symmetry_decode_checkerboard(const StabilizerCode& code, const Syndrome& s) {
    CounterRng rng(0, 0);
    return CheckerboardSymmetry(code).decode(s, rng);
}

DecodeResult symmetry_decode_2d(const StabilizerCode& code, const Syndrome& s) {
    CounterRng rng(0, 0);
    return make_2d(code)->decode(s, rng);
}

}  // namespace qec3d
