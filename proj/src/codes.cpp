#include "qec3d/codes.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace qec3d {

namespace {

int wrap(int v, int period) {
    if (period <= 0) return v;
    v %= period;
    return v < 0 ? v + period : v;
}

std::uint64_t coord_key(const std::array<int, 3>& p, int sub) {
    auto field = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint16_t>(v + 0x4000)); };
    return (field(p[0]) << 48) | (field(p[1]) << 32) | (field(p[2]) << 16) | field(sub);
}

// Accumulates qubits keyed by (wrapped position, sublattice) and stabilizers
// given by positions.
class LatticeBuilder {
public:
    explicit LatticeBuilder(std::array<int, 3> period) : period_(period) {}

    std::array<int, 3> wrapped(std::array<int, 3> p) const {
        for (int a = 0; a < 3; ++a) p[a] = wrap(p[a], period_[a]);
        return p;
    }

    std::size_t add_qubit(QubitCoord c) {
        c.pos = wrapped(c.pos);
        auto [it, inserted] = index_.emplace(coord_key(c.pos, c.sublattice), coords_.size());
        if (!inserted) throw std::logic_error("LatticeBuilder: duplicate qubit");
        coords_.push_back(c);
        return it->second;
    }

    std::optional<std::size_t> find(std::array<int, 3> p, int sub = 0) const {
        auto it = index_.find(coord_key(wrapped(p), sub));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t at(std::array<int, 3> p, int sub = 0) const {
        auto q = find(p, sub);
        if (!q) throw std::logic_error("LatticeBuilder: no qubit at requested site");
        return *q;
    }

    // Repeated qubits are multiplied together.
    void add_stabilizer(std::string sector, const std::vector<std::pair<std::size_t, Pauli>>& terms) {
        std::map<std::size_t, Pauli> acc;
        for (const auto& [q, p] : terms) {
            auto [it, inserted] = acc.emplace(q, p);
            if (!inserted) it->second = it->second * p;
        }
        std::vector<PauliOperator::Term> t;
        for (const auto& [q, p] : acc) {
            if (p != Pauli::I) t.push_back({static_cast<std::uint32_t>(q), p});
        }
        pending_.push_back(std::move(t));
        sectors_.push_back(std::move(sector));
    }

    // Adds the neighbours of `centre` at offsets +-1 along each listed axis
    // that exist, all with the same letter.
    void add_star(std::string sector, std::array<int, 3> centre, std::initializer_list<int> axes, Pauli letter) {
        std::vector<std::pair<std::size_t, Pauli>> terms;
        for (int a : axes) {
            for (int s : {-1, 1}) {
                auto p = centre;
                p[a] += s;
                if (auto q = find(p)) terms.emplace_back(*q, letter);
            }
        }
        add_stabilizer(std::move(sector), terms);
    }

    StabilizerCode finish(std::string family, std::array<int, 3> dims, Boundary boundary) {
        StabilizerCode code;
        code.family = std::move(family);
        code.dims = dims;
        code.boundary = boundary;
        code.n = coords_.size();
        code.coords = coords_;
        code.frame.assign(code.n, AxisPerm::identity());
        for (auto& t : pending_) code.stabilizers.emplace_back(code.n, std::move(t));
        code.sectors = sectors_;
        return code;
    }

private:
    std::array<int, 3> period_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    std::vector<QubitCoord> coords_;
    std::vector<std::vector<PauliOperator::Term>> pending_;
    std::vector<std::string> sectors_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// Packed symplectic vectors: x part in words [0, w), z part in [w, 2w).
struct SymplecticRows {
    std::size_t n = 0;
    std::size_t w = 0;
    std::vector<std::vector<std::uint64_t>> rows;

    explicit SymplecticRows(std::size_t n_) : n(n_), w((n_ + 63) / 64) {}

    std::vector<std::uint64_t> pack(const PauliOperator& op) const {
        std::vector<std::uint64_t> r(2 * w, 0);
        for (const auto& t : op.terms()) {
            if (has_x(t.letter)) r[t.qubit >> 6] |= std::uint64_t{1} << (t.qubit & 63);
            if (has_z(t.letter)) r[w + (t.qubit >> 6)] |= std::uint64_t{1} << (t.qubit & 63);
        }
        return r;
    }

    PauliOperator unpack(const std::vector<std::uint64_t>& r) const {
        std::vector<PauliOperator::Term> terms;
        for (std::size_t q = 0; q < n; ++q) {
            const bool x = (r[q >> 6] >> (q & 63)) & 1U;
            const bool z = (r[w + (q >> 6)] >> (q & 63)) & 1U;
            if (x || z) terms.push_back({static_cast<std::uint32_t>(q), pauli_from_bits(x, z)});
        }
        return PauliOperator(n, std::move(terms));
    }

    bool product(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) const {
        unsigned acc = 0;
        for (std::size_t i = 0; i < w; ++i) {
            acc += static_cast<unsigned>(std::popcount(a[i] & b[w + i]) + std::popcount(a[w + i] & b[i]));
        }
        return acc & 1U;
    }
};

void xor_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

// Inverse of a square GF(2) matrix given as dense rows.
std::vector<std::vector<std::uint8_t>> invert(std::vector<std::vector<std::uint8_t>> g) {
    const std::size_t k = g.size();
    std::vector<std::vector<std::uint8_t>> inv(k, std::vector<std::uint8_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        while (p < k && !g[p][c]) ++p;
        if (p == k) throw std::runtime_error("compute_logicals: singular logical pairing matrix");
        std::swap(g[p], g[c]);
        std::swap(inv[p], inv[c]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r != c && g[r][c]) {
                for (std::size_t j = 0; j < k; ++j) {
                    g[r][j] ^= g[c][j];
                    inv[r][j] ^= inv[c][j];
                }
            }
        }
    }
    return inv;
}

// Representatives of ker(h_other) that are independent modulo rowspace(h_self).
std::vector<gf2::BitVector> css_logical_reps(const gf2::BitMatrix& h_self, const gf2::BitMatrix& h_other) {
    const std::size_t n = h_self.cols();
    std::vector<std::vector<std::size_t>> rows;
    rows.reserve(h_self.rows());
    for (std::size_t r = 0; r < h_self.rows(); ++r) rows.push_back(h_self.row(r));
    const std::size_t base = rows.size();
    auto kernel = gf2::kernel_basis(h_other);
    for (const auto& v : kernel) rows.push_back(v.support());
    const auto independent = gf2::independent_rows(gf2::BitMatrix(n, std::move(rows)));
    std::vector<gf2::BitVector> out;
    for (std::size_t r : independent) {
        if (r >= base) out.push_back(kernel[r - base]);
    }
    return out;
}

// Pairs pure logicals xs, zs so that xs[i] and zs[j] anticommute iff i == j.
std::vector<std::pair<gf2::BitVector, gf2::BitVector>> pair_by_gram(const std::vector<gf2::BitVector>& xs,
                                                                    const std::vector<gf2::BitVector>& zs) {
    if (xs.size() != zs.size()) throw std::runtime_error("compute_logicals: X/Z logical counts differ");
    const std::size_t k = xs.size();
    std::vector<std::vector<std::uint8_t>> g(k, std::vector<std::uint8_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        const auto dense = xs[i].to_dense();
        for (std::size_t j = 0; j < k; ++j) {
            unsigned acc = 0;
            for (std::size_t q : zs[j].support()) acc ^= dense[q];
            g[i][j] = static_cast<std::uint8_t>(acc);
        }
    }
    const auto m = invert(std::move(g));
    std::vector<std::pair<gf2::BitVector, gf2::BitVector>> out;
    for (std::size_t j = 0; j < k; ++j) {
        gf2::BitVector z(zs[j].len());
        for (std::size_t l = 0; l < k; ++l) {
            if (m[l][j]) z ^= zs[l];
        }
        out.emplace_back(xs[j], std::move(z));
    }
    return out;
}

std::vector<LogicalPair> symplectic_logicals(const StabilizerCode& code) {
    const std::size_t n = code.n;
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& s : code.stabilizers) {
        std::vector<std::size_t> r;
        for (const auto& t : s.terms()) {
            if (has_z(t.letter)) r.push_back(t.qubit);
            if (has_x(t.letter)) r.push_back(n + t.qubit);
        }
        rows.push_back(std::move(r));
    }
    const auto kernel = gf2::kernel_basis(gf2::BitMatrix(2 * n, std::move(rows)));
    SymplecticRows packer(n);
    std::vector<std::vector<std::uint64_t>> cand;
    for (const auto& v : kernel) {
        std::vector<std::uint64_t> r(2 * packer.w, 0);
        for (std::size_t b : v.support()) {
            const std::size_t q = b < n ? b : b - n;
            const std::size_t off = b < n ? 0 : packer.w;
            r[off + (q >> 6)] |= std::uint64_t{1} << (q & 63);
        }
        cand.push_back(std::move(r));
    }
    std::vector<LogicalPair> out;
    std::vector<char> used(cand.size(), 0);
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (used[i]) continue;
        std::size_t j = i + 1;
        while (j < cand.size() && (used[j] || !packer.product(cand[i], cand[j]))) ++j;
        if (j == cand.size()) continue;
        used[i] = used[j] = 1;
        for (std::size_t u = 0; u < cand.size(); ++u) {
            if (used[u]) continue;
            const bool with_j = packer.product(cand[u], cand[j]);
            const bool with_i = packer.product(cand[u], cand[i]);
            if (with_j) xor_into(cand[u], cand[i]);
            if (with_i) xor_into(cand[u], cand[j]);
        }
        out.push_back({packer.unpack(cand[i]), packer.unpack(cand[j])});
    }
    return out;
}

PauliOperator push_forward(const gf2::BitVector& bits, Pauli parent_letter, const std::vector<AxisPerm>& frame) {
    std::vector<PauliOperator::Term> terms;
    for (std::size_t q : bits.support()) terms.push_back({static_cast<std::uint32_t>(q), frame[q](parent_letter)});
    return PauliOperator(bits.len(), std::move(terms));
}

std::optional<CssSplit> split_in_frame(const StabilizerCode& code, const std::vector<AxisPerm>* inverse_frame) {
    CssSplit split;
    std::vector<std::vector<std::size_t>> xr, zr;
    for (std::size_t i = 0; i < code.stabilizers.size(); ++i) {
        bool any_x = false, any_z = false;
        std::vector<std::size_t> supp;
        for (const auto& t : code.stabilizers[i].terms()) {
            const Pauli p = inverse_frame ? (*inverse_frame)[t.qubit](t.letter) : t.letter;
            if (p == Pauli::X) any_x = true;
            else if (p == Pauli::Z) any_z = true;
            else return std::nullopt;
            supp.push_back(t.qubit);
        }
        if (any_x && any_z) return std::nullopt;
        if (any_z) {
            zr.push_back(std::move(supp));
            split.z_rows.push_back(i);
        } else {
            xr.push_back(std::move(supp));
            split.x_rows.push_back(i);
        }
    }
    split.hx = gf2::BitMatrix(code.n, std::move(xr));
    split.hz = gf2::BitMatrix(code.n, std::move(zr));
    return split;
}

StabilizerCode with_recipe(StabilizerCode code, const std::string& recipe_name, std::string family) {
    code = deform(code, recipe_by_name(recipe_name));
    code.family = std::move(family);
    return code;
}

}  // namespace

Boundary parse_boundary(std::string_view text) {
    if (text == "periodic") return Boundary::periodic;
    if (text == "open") return Boundary::open;
    if (text == "open_rough_pair" || text == "open-rough-pair") return Boundary::open_rough_pair;
    if (text == "periodic_with_seam" || text == "periodic-with-seam") return Boundary::periodic_with_seam;
    if (text == "open_smooth_top_bottom" || text == "open-smooth-top-bottom") return Boundary::open_smooth_top_bottom;
    throw std::invalid_argument("unknown boundary '" + std::string(text) + "'");
}

std::string to_string(Boundary b) {
    switch (b) {
        case Boundary::periodic: return "periodic";
        case Boundary::open: return "open";
        case Boundary::open_rough_pair: return "open_rough_pair";
        case Boundary::periodic_with_seam: return "periodic_with_seam";
        case Boundary::open_smooth_top_bottom: return "open_smooth_top_bottom";
    }
    return "?";
}

Surface2dKind parse_surface2d_kind(std::string_view text) {
    if (text == "css") return Surface2dKind::css;
    if (text == "xzzx") return Surface2dKind::xzzx;
    if (text == "xy") return Surface2dKind::xy;
    throw std::invalid_argument("unknown 2D surface code kind '" + std::string(text) + "'");
}

std::string to_string(Surface2dKind k) {
    switch (k) {
        case Surface2dKind::css: return "css";
        case Surface2dKind::xzzx: return "xzzx";
        case Surface2dKind::xy: return "xy";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// StabilizerCode

gf2::BitMatrix StabilizerCode::symplectic() const {
    std::vector<std::vector<std::size_t>> rows;
    rows.reserve(stabilizers.size());
    for (const auto& s : stabilizers) {
        std::vector<std::size_t> r;
        for (const auto& t : s.terms()) {
            if (has_x(t.letter)) r.push_back(t.qubit);
        }
        for (const auto& t : s.terms()) {
            if (has_z(t.letter)) r.push_back(n + t.qubit);
        }
        rows.push_back(std::move(r));
    }
    return gf2::BitMatrix(2 * n, std::move(rows));
}

std::size_t StabilizerCode::k() const {
    if (auto split = parent_split()) return n - gf2::rank(split->hx) - gf2::rank(split->hz);
    return n - gf2::rank(symplectic());
}

std::optional<CssSplit> StabilizerCode::css_split() const { return split_in_frame(*this, nullptr); }

std::optional<CssSplit> StabilizerCode::parent_split() const {
    std::vector<AxisPerm> inv(frame.size());
    for (std::size_t q = 0; q < frame.size(); ++q) inv[q] = frame[q].inverse();
    return split_in_frame(*this, &inv);
}

void StabilizerCode::validate() const {
    if (coords.size() != n) throw std::runtime_error("code: coordinate count differs from n");
    if (frame.size() != n) throw std::runtime_error("code: frame size differs from n");
    if (sectors.size() != stabilizers.size()) throw std::runtime_error("code: sector tags missing");
    for (const auto& s : stabilizers) {
        if (s.n() != n) throw std::runtime_error("code: stabilizer size mismatch");
    }
    // Pairwise commutation through the qubit incidence lists.
    std::vector<std::vector<std::pair<std::uint32_t, Pauli>>> touching(n);
    for (std::size_t i = 0; i < stabilizers.size(); ++i) {
        for (const auto& t : stabilizers[i].terms()) touching[t.qubit].push_back({static_cast<std::uint32_t>(i), t.letter});
    }
    std::vector<std::uint8_t> parity(stabilizers.size(), 0);
    std::vector<std::uint32_t> seen;
    for (std::size_t i = 0; i < stabilizers.size(); ++i) {
        seen.clear();
        for (const auto& t : stabilizers[i].terms()) {
            for (const auto& [j, letter] : touching[t.qubit]) {
                if (j <= i) continue;
                if (anticommute(t.letter, letter)) {
                    parity[j] ^= 1U;
                    seen.push_back(j);
                }
            }
        }
        for (std::uint32_t j : seen) {
            if (parity[j]) {
                throw std::runtime_error("code: stabilizers " + std::to_string(i) + " and " + std::to_string(j) +
                                         " anticommute");
            }
        }
        for (std::uint32_t j : seen) parity[j] = 0;
    }
    for (std::size_t a = 0; a < logicals.size(); ++a) {
        for (const PauliOperator* op : {&logicals[a].x, &logicals[a].z}) {
            if (op->n() != n) throw std::runtime_error("code: logical size mismatch");
            const auto dense = op->to_dense();
            for (std::size_t i = 0; i < stabilizers.size(); ++i) {
                if (!commutes_dense(stabilizers[i], dense)) {
                    throw std::runtime_error("code: logical " + std::to_string(a) + " anticommutes with stabilizer " +
                                             std::to_string(i));
                }
            }
        }
        for (std::size_t b = 0; b < logicals.size(); ++b) {
            const bool expect = a == b;
            if (commutes(logicals[a].x, logicals[b].z) == expect) {
                throw std::runtime_error("code: logical pairing broken between " + std::to_string(a) + " and " +
                                         std::to_string(b));
            }
            if (b > a && (!commutes(logicals[a].x, logicals[b].x) || !commutes(logicals[a].z, logicals[b].z))) {
                throw std::runtime_error("code: distinct logical pairs fail to commute");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Deformations

DeformationRecipe identity_recipe() {
    return {"none", [](const QubitCoord&) -> std::optional<AxisPerm> { return std::nullopt; }};
}

namespace {

void need_axis(const QubitCoord& c, const char* recipe) {
    if (c.axis < 0) throw std::invalid_argument(std::string("recipe '") + recipe + "' requires edge qubits");
}

bool even(int v) { return (v % 2 + 2) % 2 == 0; }

}  // namespace

DeformationRecipe recipe_by_name(std::string_view name) {
    using Sel = std::function<std::optional<AxisPerm>(const QubitCoord&)>;
    const AxisPerm h = AxisPerm::hadamard();
    Sel sel;
    if (name == "none" || name == "identity") return identity_recipe();
    if (name == "hadamard-z-edges") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            need_axis(c, "hadamard-z-edges");
            if (c.axis == 2) return h;
            return std::nullopt;
        };
    } else if (name == "hadamard-vertical-2d") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            need_axis(c, "hadamard-vertical-2d");
            if (c.axis == 1) return h;
            return std::nullopt;
        };
    } else if (name == "checkerboard-vertical") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            need_axis(c, "checkerboard-vertical");
            if (c.axis == 2 && even(c.pos[0] / 2 + c.pos[1] / 2 + (c.pos[2] - 1) / 2)) return h;
            return std::nullopt;
        };
    } else if (name == "color-diagonal") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            if (c.axis >= 0) throw std::invalid_argument("recipe 'color-diagonal' requires vertex qubits");
            if (c.pos[0] % 4 == 2 && !even(c.pos[1]) && c.pos[2] % 4 == 0) return h;
            return std::nullopt;
        };
    } else if (name == "sierpinski-even-y") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            if (even(c.pos[1] / 2)) return h;
            return std::nullopt;
        };
    } else if (name == "haah-checkerboard") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            if (even(c.pos[0] / 2 + c.pos[1] / 2)) return h;
            return std::nullopt;
        };
    } else if (name == "rotated-checkerboard") {
        sel = [h](const QubitCoord& c) -> std::optional<AxisPerm> {
            if (!c.vertical && even(c.pos[0] / 2 + c.pos[1] / 2)) return h;
            return std::nullopt;
        };
    } else if (name == "xy-all") {
        sel = [](const QubitCoord&) -> std::optional<AxisPerm> { return AxisPerm::swap_yz(); };
    } else {
        throw std::invalid_argument("unknown deformation '" + std::string(name) + "'");
    }
    return {std::string(name), std::move(sel)};
}

DeformationRecipe standard_recipe(const std::string& family) {
    if (family == "surface2d-css") return recipe_by_name("hadamard-vertical-2d");
    if (family == "surface3d-cubic" || family == "xcube") return recipe_by_name("hadamard-z-edges");
    if (family == "surface3d-checkerboard") return recipe_by_name("checkerboard-vertical");
    if (family == "color3d") return recipe_by_name("color-diagonal");
    if (family == "sierpinski") return recipe_by_name("sierpinski-even-y");
    if (family == "haah") return recipe_by_name("haah-checkerboard");
    throw std::invalid_argument("no standard deformation for family '" + family + "'");
}

StabilizerCode deform(const StabilizerCode& code, const DeformationRecipe& recipe) {
    if (recipe.name == "none") return code;
    CliffordDeformation d;
    for (std::size_t q = 0; q < code.n; ++q) {
        if (auto perm = recipe.select(code.coords[q])) d.set(q, *perm);
    }
    StabilizerCode out = code;
    for (auto& s : out.stabilizers) s = apply_deformation(s, d);
    for (auto& l : out.logicals) {
        l.x = apply_deformation(l.x, d);
        l.z = apply_deformation(l.z, d);
    }
    for (const auto& [q, perm] : d.entries()) out.frame[q] = out.frame[q].then(perm);
    out.deformation = code.deformation == "none" ? recipe.name : code.deformation + "+" + recipe.name;
    return out;
}

std::vector<LogicalPair> compute_logicals(const StabilizerCode& code) {
    if (auto split = code.parent_split()) {
        const auto xs = css_logical_reps(split->hx, split->hz);
        const auto zs = css_logical_reps(split->hz, split->hx);
        std::vector<LogicalPair> out;
        for (const auto& [x, z] : pair_by_gram(xs, zs)) {
            out.push_back({push_forward(x, Pauli::X, code.frame), push_forward(z, Pauli::Z, code.frame)});
        }
        return out;
    }
    return symplectic_logicals(code);
}

// ---------------------------------------------------------------------------
// 2D codes

StabilizerCode build_surface2d(Surface2dKind kind, int lx, int ly, Boundary boundary) {
    require(lx >= 2 && ly >= 2, "surface2d: dimensions must be at least 2");
    require(boundary == Boundary::periodic || boundary == Boundary::open, "surface2d: boundary must be periodic or open");
    const bool periodic = boundary == Boundary::periodic;
    if (kind == Surface2dKind::xy) {
        if (periodic) require(lx % 2 == 0 && ly % 2 == 0, "surface2d xy: periodic dimensions must be even");
        LatticeBuilder b({periodic ? 2 * lx : 0, periodic ? 2 * ly : 0, 0});
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) b.add_qubit({{2 * x, 2 * y, 0}, -1, 0, false});
        }
        const int lo = periodic ? 0 : -1;
        for (int y = lo; y < ly; ++y) {
            for (int x = lo; x < lx; ++x) {
                const Pauli letter = even(x + y) ? Pauli::X : Pauli::Z;
                std::vector<std::pair<std::size_t, Pauli>> terms;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        if (auto q = b.find({2 * (x + dx), 2 * (y + dy), 0})) terms.emplace_back(*q, letter);
                    }
                }
                if (terms.size() == 2) {
                    const bool side = x == -1 || x == lx - 1;
                    if (side != (letter == Pauli::Z)) continue;
                } else if (terms.size() != 4) {
                    continue;
                }
                b.add_stabilizer("plaquette", terms);
            }
        }
        StabilizerCode code = b.finish("surface2d-css-rotated", {lx, ly, 1}, boundary);
        code.logicals = compute_logicals(code);
        return with_recipe(std::move(code), "xy-all", "surface2d-xy");
    }
    LatticeBuilder b({periodic ? 2 * lx : 0, periodic ? 2 * ly : 0, 0});
    if (periodic) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                b.add_qubit({{2 * x + 1, 2 * y, 0}, 0, 0, false});
                b.add_qubit({{2 * x, 2 * y + 1, 0}, 1, 0, true});
            }
        }
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) b.add_star("vertex", {2 * x, 2 * y, 0}, {0, 1}, Pauli::Z);
        }
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) b.add_star("face", {2 * x + 1, 2 * y + 1, 0}, {0, 1}, Pauli::X);
        }
    } else {
        // Rough boundaries at both x ends, smooth at both y ends.
        for (int y = 0; y < ly; ++y) {
            for (int i = 0; i <= lx; ++i) b.add_qubit({{2 * i - 1, 2 * y, 0}, 0, 0, false});
            if (y + 1 < ly) {
                for (int x = 0; x < lx; ++x) b.add_qubit({{2 * x, 2 * y + 1, 0}, 1, 0, true});
            }
        }
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) b.add_star("vertex", {2 * x, 2 * y, 0}, {0, 1}, Pauli::Z);
        }
        for (int y = 0; y + 1 < ly; ++y) {
            for (int i = 0; i <= lx; ++i) b.add_star("face", {2 * i - 1, 2 * y + 1, 0}, {0, 1}, Pauli::X);
        }
    }
    StabilizerCode code = b.finish("surface2d-css", {lx, ly, 1}, boundary);
    code.logicals = compute_logicals(code);
    if (kind == Surface2dKind::xzzx) return with_recipe(std::move(code), "hadamard-vertical-2d", "surface2d-xzzx");
    return code;
}

StabilizerCode build_xzzx_rotated2d(int lx, int ly) {
    require(lx >= 2 && ly >= 2, "xzzx rotated: dimensions must be at least 2");
    LatticeBuilder b({2 * lx, 2 * ly, 0});
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) b.add_qubit({{2 * x, 2 * y, 0}, -1, 0, false});
    }
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            b.add_stabilizer("face", {{b.at({2 * x, 2 * y, 0}), Pauli::X},
                                      {b.at({2 * x + 2, 2 * y, 0}), Pauli::Z},
                                      {b.at({2 * x, 2 * y + 2, 0}), Pauli::Z},
                                      {b.at({2 * x + 2, 2 * y + 2, 0}), Pauli::X}});
        }
    }
    StabilizerCode code = b.finish("surface2d-xzzx-rotated", {lx, ly, 1}, Boundary::periodic);
    code.logicals = compute_logicals(code);
    return code;
}

// ---------------------------------------------------------------------------
// Cubic-lattice 3D codes

StabilizerCode build_surface3d_cubic(int lx, int ly, int lz, Boundary boundary) {
    require(lx >= 2 && ly >= 2 && lz >= 2, "surface3d-cubic: dimensions must be at least 2");
    const std::array<int, 3> dims{lx, ly, lz};
    if (boundary == Boundary::periodic) {
        LatticeBuilder b({2 * lx, 2 * ly, 2 * lz});
        for (int z = 0; z < lz; ++z) {
            for (int y = 0; y < ly; ++y) {
                for (int x = 0; x < lx; ++x) {
                    for (int a = 0; a < 3; ++a) {
                        std::array<int, 3> p{2 * x, 2 * y, 2 * z};
                        p[a] += 1;
                        b.add_qubit({p, a, 0, a == 2});
                    }
                }
            }
        }
        for (int z = 0; z < lz; ++z) {
            for (int y = 0; y < ly; ++y) {
                for (int x = 0; x < lx; ++x) b.add_star("vertex", {2 * x, 2 * y, 2 * z}, {0, 1, 2}, Pauli::Z);
            }
        }
        static const char* kPlane[3] = {"face-xy", "face-xz", "face-yz"};
        static const int kAxes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int z = 0; z < lz; ++z) {
            for (int y = 0; y < ly; ++y) {
                for (int x = 0; x < lx; ++x) {
                    for (int f = 0; f < 3; ++f) {
                        std::array<int, 3> c{2 * x, 2 * y, 2 * z};
                        c[kAxes[f][0]] += 1;
                        c[kAxes[f][1]] += 1;
                        b.add_star(kPlane[f], c, {kAxes[f][0], kAxes[f][1]}, Pauli::X);
                    }
                }
            }
        }
        StabilizerCode code = b.finish("surface3d-cubic", dims, boundary);
        const std::size_t n = code.n;
        for (int a = 0; a < 3; ++a) {
            std::vector<std::size_t> line, membrane;
            for (int t = 0; t < dims[a]; ++t) {
                std::array<int, 3> p{0, 0, 0};
                p[a] = 2 * t + 1;
                line.push_back(b.at(p));
            }
            for (int u = 0; u < dims[(a + 1) % 3]; ++u) {
                for (int v = 0; v < dims[(a + 2) % 3]; ++v) {
                    std::array<int, 3> p{};
                    p[a] = 1;
                    p[(a + 1) % 3] = 2 * u;
                    p[(a + 2) % 3] = 2 * v;
                    membrane.push_back(b.at(p));
                }
            }
            code.logicals.push_back({PauliOperator::uniform(n, line, Pauli::X), PauliOperator::uniform(n, membrane, Pauli::Z)});
        }
        return code;
    }
    require(boundary == Boundary::open_rough_pair, "surface3d-cubic: boundary must be periodic or open_rough_pair");
    LatticeBuilder b({0, 0, 0});
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int i = 0; i <= lx; ++i) b.add_qubit({{2 * i - 1, 2 * y, 2 * z}, 0, 0, false});
            for (int x = 0; x < lx; ++x) {
                if (y + 1 < ly) b.add_qubit({{2 * x, 2 * y + 1, 2 * z}, 1, 0, false});
                if (z + 1 < lz) b.add_qubit({{2 * x, 2 * y, 2 * z + 1}, 2, 0, true});
            }
        }
    }
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) b.add_star("vertex", {2 * x, 2 * y, 2 * z}, {0, 1, 2}, Pauli::Z);
        }
    }
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int i = 0; i <= lx; ++i) {
                if (y + 1 < ly) b.add_star("face-xy", {2 * i - 1, 2 * y + 1, 2 * z}, {0, 1}, Pauli::X);
                if (z + 1 < lz) b.add_star("face-xz", {2 * i - 1, 2 * y, 2 * z + 1}, {0, 2}, Pauli::X);
            }
            for (int x = 0; x < lx; ++x) {
                if (y + 1 < ly && z + 1 < lz) b.add_star("face-yz", {2 * x, 2 * y + 1, 2 * z + 1}, {1, 2}, Pauli::X);
            }
        }
    }
    StabilizerCode code = b.finish("surface3d-cubic", dims, boundary);
    std::vector<std::size_t> line, membrane;
    for (int i = 0; i <= lx; ++i) line.push_back(b.at({2 * i - 1, 0, 0}));
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) membrane.push_back(b.at({-1, 2 * y, 2 * z}));
    }
    code.logicals.push_back({PauliOperator::uniform(code.n, line, Pauli::X), PauliOperator::uniform(code.n, membrane, Pauli::Z)});
    return code;
}

namespace {

LatticeBuilder periodic_edges(int lx, int ly, int lz) {
    LatticeBuilder b({2 * lx, 2 * ly, 2 * lz});
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                for (int a = 0; a < 3; ++a) {
                    std::array<int, 3> p{2 * x, 2 * y, 2 * z};
                    p[a] += 1;
                    b.add_qubit({p, a, 0, a == 2});
                }
            }
        }
    }
    return b;
}

// The twelve edges of the cube with minimum corner (x, y, z).
std::vector<std::size_t> cube_edges(const LatticeBuilder& b, int x, int y, int z) {
    std::vector<std::size_t> out;
    const std::array<int, 3> c{2 * x + 1, 2 * y + 1, 2 * z + 1};
    for (int a = 0; a < 3; ++a) {
        const int u = (a + 1) % 3, v = (a + 2) % 3;
        for (int su : {-1, 1}) {
            for (int sv : {-1, 1}) {
                auto p = c;
                p[u] += su;
                p[v] += sv;
                out.push_back(b.at(p));
            }
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, Pauli>> with_letter(const std::vector<std::size_t>& qs, Pauli p) {
    std::vector<std::pair<std::size_t, Pauli>> out;
    for (std::size_t q : qs) out.emplace_back(q, p);
    return out;
}

}  // namespace

StabilizerCode build_surface3d_checkerboard(int lx, int ly, int lz) {
    require(lx >= 2 && ly >= 2 && lz >= 2, "surface3d-checkerboard: dimensions must be at least 2");
    require(lx % 2 == 0 && ly % 2 == 0 && lz % 2 == 0, "surface3d-checkerboard: dimensions must be even");
    LatticeBuilder b = periodic_edges(lx, ly, lz);
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                if (even(x + y + z)) b.add_stabilizer("cube", with_letter(cube_edges(b, x, y, z), Pauli::Z));
            }
        }
    }
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                if (even(x + y + z)) continue;
                for (int corner = 0; corner < 8; ++corner) {
                    const std::array<int, 3> w{2 * (x + (corner & 1)), 2 * (y + ((corner >> 1) & 1)),
                                               2 * (z + ((corner >> 2) & 1))};
                    std::vector<std::pair<std::size_t, Pauli>> terms;
                    for (int a = 0; a < 3; ++a) {
                        auto p = w;
                        p[a] += ((corner >> a) & 1) ? -1 : 1;
                        terms.emplace_back(b.at(p), Pauli::X);
                    }
                    b.add_stabilizer("triangle", terms);
                }
            }
        }
    }
    StabilizerCode code = b.finish("surface3d-checkerboard", {lx, ly, lz}, Boundary::periodic);
    code.logicals = compute_logicals(code);
    return code;
}

StabilizerCode build_xcube(int lx, int ly, int lz) {
    require(lx >= 2 && ly >= 2 && lz >= 2, "xcube: dimensions must be at least 2");
    LatticeBuilder b = periodic_edges(lx, ly, lz);
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) b.add_stabilizer("cube", with_letter(cube_edges(b, x, y, z), Pauli::Z));
        }
    }
    static const char* kVertex[3] = {"vertex-x", "vertex-y", "vertex-z"};
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                for (int u = 0; u < 3; ++u) {
                    b.add_star(kVertex[u], {2 * x, 2 * y, 2 * z}, {(u + 1) % 3, (u + 2) % 3}, Pauli::X);
                }
            }
        }
    }
    StabilizerCode code = b.finish("xcube", {lx, ly, lz}, Boundary::periodic);

    std::vector<gf2::BitVector> xs, zs;
    for (int dir = 0; dir < 3; ++dir) {
        for (int plane = 0; plane < 3; ++plane) {
            if (dir == plane) continue;
            for (int ell = 0; ell < code.dims[plane]; ++ell) {
                xs.push_back(xcube_logical_x(code, dir, plane, ell).x_part());
                zs.push_back(xcube_logical_z(code, dir, plane, ell).z_part());
            }
        }
    }
    auto split = code.css_split();
    auto independent = [&](const gf2::BitMatrix& h, const std::vector<gf2::BitVector>& cand) {
        std::vector<std::vector<std::size_t>> rows;
        for (std::size_t r : gf2::independent_rows(h)) rows.push_back(h.row(r));
        const std::size_t base = rows.size();
        for (const auto& v : cand) rows.push_back(v.support());
        std::vector<gf2::BitVector> out;
        for (std::size_t r : gf2::independent_rows(gf2::BitMatrix(code.n, std::move(rows)))) {
            if (r >= base) out.push_back(cand[r - base]);
        }
        return out;
    };
    const auto xs_ind = independent(split->hx, xs);
    const auto zs_ind = independent(split->hz, zs);
    for (const auto& [x, z] : pair_by_gram(xs_ind, zs_ind)) {
        code.logicals.push_back({push_forward(x, Pauli::X, code.frame), push_forward(z, Pauli::Z, code.frame)});
    }
    return code;
}

namespace {

std::size_t edge_index(const StabilizerCode& code, std::array<int, 3> v, int axis) {
    for (int a = 0; a < 3; ++a) v[a] = wrap(v[a], code.dims[a]);
    const std::size_t vid = static_cast<std::size_t>(v[0]) +
                            static_cast<std::size_t>(code.dims[0]) *
                                (static_cast<std::size_t>(v[1]) + static_cast<std::size_t>(code.dims[1]) * v[2]);
    return 3 * vid + static_cast<std::size_t>(axis);
}

void check_xcube_axes(const StabilizerCode& code, int dir, int plane, int ell) {
    require(code.family == "xcube", "xcube logical requested on a different family");
    require(dir >= 0 && dir < 3 && plane >= 0 && plane < 3 && dir != plane, "xcube logical: invalid axes");
    require(ell >= 0 && ell < code.dims[plane], "xcube logical: plane index out of range");
}

}  // namespace

PauliOperator xcube_logical_x(const StabilizerCode& code, int dir, int plane, int ell) {
    check_xcube_axes(code, dir, plane, ell);
    const int third = 3 - dir - plane;
    std::vector<std::size_t> qs;
    for (int t = 0; t < code.dims[dir]; ++t) {
        std::array<int, 3> v{};
        v[dir] = t;
        v[plane] = ell;
        qs.push_back(edge_index(code, v, third));
    }
    std::vector<PauliOperator::Term> terms;
    for (std::size_t q : qs) terms.push_back({static_cast<std::uint32_t>(q), code.frame[q](Pauli::X)});
    return PauliOperator(code.n, std::move(terms));
}

PauliOperator xcube_logical_z(const StabilizerCode& code, int dir, int plane, int ell) {
    check_xcube_axes(code, dir, plane, ell);
    std::vector<std::size_t> qs;
    for (int t = 0; t < code.dims[dir]; ++t) {
        std::array<int, 3> v{};
        v[dir] = t;
        v[plane] = ell;
        qs.push_back(edge_index(code, v, dir));
    }
    std::vector<PauliOperator::Term> terms;
    for (std::size_t q : qs) terms.push_back({static_cast<std::uint32_t>(q), code.frame[q](Pauli::Z)});
    return PauliOperator(code.n, std::move(terms));
}

// ---------------------------------------------------------------------------
// Two-qubit-per-vertex fracton codes. Offsets are (dx, dy, dz, qubit).

namespace {

struct Offset {
    int dx, dy, dz, sub;
};

constexpr Offset kSierpinskiX[] = {{0, 1, 0, 0}, {0, 1, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 1}, {0, 1, 0, 1}};
constexpr Offset kSierpinskiZ[] = {{1, 1, 1, 0}, {0, 1, 1, 0}, {1, 0, 1, 0}, {1, 0, 1, 1}, {1, 0, 0, 1}};

constexpr Offset kHaahX[] = {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0},
                             {0, 0, 0, 1}, {1, 1, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}};
constexpr Offset kHaahZ[] = {{1, 1, 1, 0}, {0, 0, 1, 0}, {1, 0, 0, 0}, {0, 1, 0, 0},
                             {1, 1, 1, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}};

template <std::size_t NX, std::size_t NZ>
StabilizerCode two_qubit_cube_code(const std::string& family, int lx, int ly, int lz, const Offset (&xs)[NX],
                                   const Offset (&zs)[NZ]) {
    LatticeBuilder b({2 * lx, 2 * ly, 2 * lz});
    for (int z = 0; z < lz; ++z) {
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                for (int s = 0; s < 2; ++s) b.add_qubit({{2 * x, 2 * y, 2 * z}, -1, s, false});
            }
        }
    }
    auto add = [&](const char* sector, const auto& table, Pauli letter) {
        for (int z = 0; z < lz; ++z) {
            for (int y = 0; y < ly; ++y) {
                for (int x = 0; x < lx; ++x) {
                    std::vector<std::pair<std::size_t, Pauli>> terms;
                    for (const Offset& o : table) {
                        terms.emplace_back(b.at({2 * (x + o.dx), 2 * (y + o.dy), 2 * (z + o.dz)}, o.sub), letter);
                    }
                    b.add_stabilizer(sector, terms);
                }
            }
        }
    };
    add("cube-x", xs, Pauli::X);
    add("cube-z", zs, Pauli::Z);
    StabilizerCode code = b.finish(family, {lx, ly, lz}, Boundary::periodic);
    code.logicals = compute_logicals(code);
    return code;
}

}  // namespace

StabilizerCode build_sierpinski(int lx, int ly, int lz) {
    require(lx >= 2 && ly >= 2 && lz >= 2, "sierpinski: dimensions must be at least 2");
    require(ly % 2 == 0, "sierpinski: Ly must be even");
    return two_qubit_cube_code("sierpinski", lx, ly, lz, kSierpinskiX, kSierpinskiZ);
}

StabilizerCode build_haah(int lx, int ly, int lz) {
    require(lx >= 2 && ly >= 2 && lz >= 2, "haah: dimensions must be at least 2");
    return two_qubit_cube_code("haah", lx, ly, lz, kHaahX, kHaahZ);
}

// ---------------------------------------------------------------------------
// 3D color code on the truncated-octahedral (bcc) lattice

StabilizerCode build_color3d(int cx, int cy, int cz) {
    require(cx >= 2 && cy >= 2 && cz >= 2 && cx % 2 == 0 && cy % 2 == 0 && cz % 2 == 0,
            "color3d: cell counts must be even and at least 2");
    const std::array<int, 3> period{4 * cx, 4 * cy, 4 * cz};
    LatticeBuilder b(period);

    // The 24 vertices of a truncated octahedron: permutations of (0, +-1, +-2).
    std::vector<std::array<int, 3>> offsets;
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const auto& pm : perms) {
        for (int s1 : {-1, 1}) {
            for (int s2 : {-1, 1}) {
                std::array<int, 3> o{};
                o[pm[0]] = 0;
                o[pm[1]] = s1;
                o[pm[2]] = 2 * s2;
                offsets.push_back(o);
            }
        }
    }
    std::vector<std::array<int, 3>> centres;
    for (int sub = 0; sub < 2; ++sub) {
        for (int k = 0; k < cz; ++k) {
            for (int j = 0; j < cy; ++j) {
                for (int i = 0; i < cx; ++i) centres.push_back({4 * i + 2 * sub, 4 * j + 2 * sub, 4 * k + 2 * sub});
            }
        }
    }
    for (const auto& c : centres) {
        for (const auto& o : offsets) {
            std::array<int, 3> p{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
            if (!b.find(p)) b.add_qubit({p, -1, 0, false});
        }
    }
    auto vertex = [&](const std::array<int, 3>& c, const std::array<int, 3>& o) {
        return b.at({c[0] + o[0], c[1] + o[1], c[2] + o[2]});
    };
    for (const auto& c : centres) {
        std::vector<std::pair<std::size_t, Pauli>> terms;
        for (const auto& o : offsets) terms.emplace_back(vertex(c, o), Pauli::Z);
        b.add_stabilizer("cell", terms);
    }
    // Squares towards +axis from every cell; hexagons from the A cells.
    for (const auto& c : centres) {
        for (int a = 0; a < 3; ++a) {
            std::vector<std::pair<std::size_t, Pauli>> terms;
            for (const auto& o : offsets) {
                if (o[a] == 2) terms.emplace_back(vertex(c, o), Pauli::X);
            }
            b.add_stabilizer("face-square", terms);
        }
    }
    const std::size_t n_a = static_cast<std::size_t>(cx) * cy * cz;
    for (std::size_t ci = 0; ci < n_a; ++ci) {
        const auto& c = centres[ci];
        for (int sx : {-1, 1}) {
            for (int sy : {-1, 1}) {
                for (int sz : {-1, 1}) {
                    std::vector<std::pair<std::size_t, Pauli>> terms;
                    for (const auto& o : offsets) {
                        if (sx * o[0] + sy * o[1] + sz * o[2] == 3) terms.emplace_back(vertex(c, o), Pauli::X);
                    }
                    b.add_stabilizer("face-hexagon", terms);
                }
            }
        }
    }
    StabilizerCode code = b.finish("color3d", {cx, cy, cz}, Boundary::periodic);
    code.logicals = compute_logicals(code);
    return code;
}

// ---------------------------------------------------------------------------
// Rotated-layout 3D surface code

StabilizerCode build_rotated_surface3d(int lx, int ly, int lz, Boundary boundary) {
    require(lx >= 2 && ly >= 2 && lz >= 2, "rotated3d: dimensions must be at least 2");
    const bool periodic = boundary == Boundary::periodic_with_seam || boundary == Boundary::periodic;
    require(periodic || boundary == Boundary::open_smooth_top_bottom,
            "rotated3d: boundary must be periodic_with_seam or open_smooth_top_bottom");
    if (periodic) require(lx % 2 == 0 || ly % 2 == 0, "rotated3d: at most one horizontal dimension may be odd");
    const int seam_axis = !periodic ? -1 : (lx % 2 ? 0 : (ly % 2 ? 1 : -1));
    const std::array<int, 3> len{lx, ly, lz};

    LatticeBuilder b({periodic ? 2 * lx : 0, periodic ? 2 * ly : 0, 0});
    // Horizontal qubits on grid vertices, octahedron faces carry vertical qubits.
    const int flo = periodic ? 0 : -1;
    const int fhx = lx;
    const int fhy = ly;
    struct Face {
        int i, j;
        bool octahedron;
        std::vector<std::array<int, 2>> corners;
    };
    std::vector<Face> faces;
    for (int j = flo; j < fhy; ++j) {
        for (int i = flo; i < fhx; ++i) {
            Face f{i, j, even(i + j), {}};
            for (int dj = 0; dj < 2; ++dj) {
                for (int di = 0; di < 2; ++di) {
                    const int ci = i + di, cj = j + dj;
                    if (periodic || (ci >= 0 && ci < lx && cj >= 0 && cj < ly)) f.corners.push_back({ci, cj});
                }
            }
            if (f.corners.size() == 2) {
                const bool side = i == -1 || i == lx - 1;
                if (side != f.octahedron) continue;
            } else if (f.corners.size() != 4) {
                continue;
            }
            faces.push_back(std::move(f));
        }
    }
    const int gaps = lz - 1;
    for (int z = 0; z < lz; ++z) {
        for (int j = 0; j < ly; ++j) {
            for (int i = 0; i < lx; ++i) b.add_qubit({{2 * i, 2 * j, 2 * z}, -1, 0, false});
        }
        if (z >= gaps) continue;
        for (const Face& f : faces) {
            if (f.octahedron) b.add_qubit({{2 * f.i + 1, 2 * f.j + 1, 2 * z + 1}, 2, 0, true});
        }
    }
    auto on_seam = [&](int ci, int cj) {
        if (seam_axis == 0) return wrap(ci, lx) == 0;
        if (seam_axis == 1) return wrap(cj, ly) == 0;
        return false;
    };
    // Faces crossing the wrap of the odd dimension take the defect.
    auto wrapping = [&](const Face& f) {
        if (seam_axis == 0) return f.i == lx - 1;
        if (seam_axis == 1) return f.j == ly - 1;
        return false;
    };
    auto swap_xz = [](Pauli p) { return AxisPerm::hadamard()(p); };
    for (int z = 0; z < lz; ++z) {
        for (const Face& f : faces) {
            const Pauli base = f.octahedron ? Pauli::Z : Pauli::X;
            std::vector<std::pair<std::size_t, Pauli>> terms;
            for (const auto& c : f.corners) {
                const Pauli p = wrapping(f) && on_seam(c[0], c[1]) ? swap_xz(base) : base;
                terms.emplace_back(b.at({2 * c[0], 2 * c[1], 2 * z}), p);
            }
            if (f.octahedron) {
                for (int dz : {-1, 1}) {
                    if (auto q = b.find({2 * f.i + 1, 2 * f.j + 1, 2 * z + dz})) terms.emplace_back(*q, Pauli::Z);
                }
            }
            b.add_stabilizer(f.octahedron ? "octahedron" : "square", terms);
        }
    }
    for (int z = 0; z < gaps; ++z) {
        for (int j = 0; j < ly; ++j) {
            for (int i = 0; i < lx; ++i) {
                if (on_seam(i, j)) continue;
                std::vector<std::pair<std::size_t, Pauli>> terms;
                terms.emplace_back(b.at({2 * i, 2 * j, 2 * z}), Pauli::X);
                terms.emplace_back(b.at({2 * i, 2 * j, 2 * z + 2}), Pauli::X);
                for (int dj : {-1, 0}) {
                    for (int di : {-1, 0}) {
                        if (auto q = b.find({2 * (i + di) + 1, 2 * (j + dj) + 1, 2 * z + 1})) {
                            terms.emplace_back(*q, Pauli::X);
                        }
                    }
                }
                b.add_stabilizer("diamond", terms);
            }
        }
    }
    StabilizerCode code = b.finish("rotated3d", len, boundary);
    code = deform(code, recipe_by_name("rotated-checkerboard"));
    // With a seam the parent frame is not CSS, so logicals come from the
    // general symplectic routine either way.
    code.logicals = compute_logicals(code);
    return code;
}

// ---------------------------------------------------------------------------

StabilizerCode build_code(const std::string& family, const std::vector<int>& dims, Boundary boundary) {
    auto need = [&](std::size_t count) {
        if (dims.size() != count) {
            throw std::invalid_argument(family + " expects " + std::to_string(count) + " dimensions");
        }
    };
    if (family == "surface2d-xzzx-rotated") {
        need(2);
        return build_xzzx_rotated2d(dims[0], dims[1]);
    }
    if (family.rfind("surface2d-", 0) == 0) {
        need(2);
        return build_surface2d(parse_surface2d_kind(family.substr(10)), dims[0], dims[1], boundary);
    }
    need(3);
    if (family == "surface3d-cubic") return build_surface3d_cubic(dims[0], dims[1], dims[2], boundary);
    auto periodic_only = [&] {
        if (boundary != Boundary::periodic) throw std::invalid_argument(family + " supports periodic boundaries only");
    };
    if (family == "surface3d-checkerboard") {
        periodic_only();
        return build_surface3d_checkerboard(dims[0], dims[1], dims[2]);
    }
    if (family == "color3d") {
        periodic_only();
        return build_color3d(dims[0], dims[1], dims[2]);
    }
    if (family == "xcube") {
        periodic_only();
        return build_xcube(dims[0], dims[1], dims[2]);
    }
    if (family == "sierpinski") {
        periodic_only();
        return build_sierpinski(dims[0], dims[1], dims[2]);
    }
    if (family == "haah") {
        periodic_only();
        return build_haah(dims[0], dims[1], dims[2]);
    }
    if (family == "rotated3d") return build_rotated_surface3d(dims[0], dims[1], dims[2], boundary);
    throw std::invalid_argument("unknown code family '" + family + "'");
}

}  // namespace qec3d
