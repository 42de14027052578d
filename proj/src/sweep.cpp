#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decoders_internal.hpp"

namespace qec3d {

namespace {

int wrap(int v, int n) { return ((v % n) + n) % n; }

int torus_step(int from, int to, int n) {
    const int d = wrap(to - from, n);
    return d <= n - d ? d : d - n;
}

struct CubicLattice {
    std::array<int, 3> d;

    std::size_t vid(std::array<int, 3> v) const {
        return static_cast<std::size_t>(wrap(v[0], d[0]) + d[0] * (wrap(v[1], d[1]) + d[1] * wrap(v[2], d[2])));
    }
    std::size_t edge(std::array<int, 3> v, int axis) const { return 3 * vid(v) + static_cast<std::size_t>(axis); }
    std::size_t face(std::array<int, 3> v, int plane) const { return 3 * vid(v) + static_cast<std::size_t>(plane); }
    std::size_t vertices() const { return static_cast<std::size_t>(d[0] * d[1] * d[2]); }
    std::array<int, 3> coords(std::size_t id) const {
        const int i = static_cast<int>(id);
        return {i % d[0], (i / d[0]) % d[1], i / (d[0] * d[1])};
    }
};

// Plane index of the face spanned by axes a < b.
int plane_of(int a, int b) { return a == 0 ? (b == 1 ? 0 : 1) : 2; }

void toggle_edge_faces(const CubicLattice& lat, std::vector<std::uint8_t>& faces, std::size_t edge) {
    const auto v = lat.coords(edge / 3);
    const int a = static_cast<int>(edge % 3);
    for (int b = 0; b < 3; ++b) {
        if (b == a) continue;
        const int plane = plane_of(std::min(a, b), std::max(a, b));
        auto w = v;
        faces[lat.face(w, plane)] ^= 1U;
        w[b] -= 1;
        faces[lat.face(w, plane)] ^= 1U;
    }
}

void check_cubic(const StabilizerCode& code) {
    if (code.family != "surface3d-cubic" || code.boundary != Boundary::periodic) {
        throw std::invalid_argument("sweep-match: expected a periodic surface3d-cubic code");
    }
    const CubicLattice lat{code.dims};
    if (code.n != 3 * lat.vertices()) throw std::invalid_argument("sweep-match: unexpected code layout");
    for (std::size_t q = 0; q < code.n; ++q) {
        const auto v = lat.coords(q / 3);
        const int a = static_cast<int>(q % 3);
        std::array<int, 3> p{2 * v[0], 2 * v[1], 2 * v[2]};
        p[a] += 1;
        if (code.coords[q].pos != p || code.coords[q].axis != a) {
            throw std::invalid_argument("sweep-match: unexpected qubit layout");
        }
    }
}

// Matches point defects on a periodic grid. Moving along axis a between
// neighbouring defect sites costs weight[a] and flips the qubit returned by
// `crossing(site, axis, forward)`.
template <class Crossing>
void match_grid(const std::vector<std::array<int, 3>>& defects, const std::array<int, 3>& dims,
                const std::array<std::int64_t, 3>& weight, Crossing crossing, std::vector<std::uint8_t>& flips) {
    const auto mate = mwpm(defects.size(), [&](std::size_t i, std::size_t j) {
        std::int64_t w = 0;
        for (int a = 0; a < 3; ++a) w += weight[a] * std::abs(torus_step(defects[i][a], defects[j][a], dims[a]));
        return w;
    });
    for (std::size_t i = 0; i < mate.size(); ++i) {
        if (mate[i] < i) continue;
        auto site = defects[i];
        for (int a = 0; a < 3; ++a) {
            const int step = torus_step(site[a], defects[mate[i]][a], dims[a]);
            for (int k = 0; k < std::abs(step); ++k) {
                flips[crossing(site, a, step > 0)] ^= 1U;
                site[a] = wrap(site[a] + (step > 0 ? 1 : -1), dims[a]);
            }
        }
    }
}

std::int64_t axis_weight(double q) {
    return std::max<std::int64_t>(1, std::llround(1000.0 * detail::weight_from_prob(q)));
}

// Mean of the prior over qubits selected by `pick`.
template <class Pick>
double mean_prior(const std::vector<double>& prior, std::size_t n, Pick pick) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (pick(q)) {
            sum += prior[q];
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

std::vector<std::size_t> sweep_step(const std::array<int, 3>& dims, std::vector<std::uint8_t>& face_syndrome,
                                    const std::array<int, 3>& direction, CounterRng& rng) {
    const CubicLattice lat{dims};
    if (face_syndrome.size() != 3 * lat.vertices()) throw std::invalid_argument("sweep_step: syndrome size mismatch");
    for (int a = 0; a < 3; ++a) {
        if (direction[a] != 1 && direction[a] != -1) throw std::invalid_argument("sweep_step: direction must be (+-1,+-1,+-1)");
    }
    std::vector<std::size_t> flips;
    for (std::size_t id = 0; id < lat.vertices(); ++id) {
        const auto v = lat.coords(id);
        std::array<std::size_t, 3> future{};
        for (int a = 0; a < 3; ++a) {
            auto w = v;
            if (direction[a] < 0) w[a] -= 1;
            future[a] = lat.edge(w, a);
        }
        // Faces between pairs of future edges: xy, xz, yz.
        std::array<std::uint8_t, 3> excited{};
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                auto w = v;
                if (direction[a] < 0) w[a] -= 1;
                if (direction[b] < 0) w[b] -= 1;
                excited[plane_of(a, b)] = face_syndrome[lat.face(w, plane_of(a, b))];
            }
        }
        const int count = excited[0] + excited[1] + excited[2];
        if (count == 2) {
            // The edge shared by both excited faces is the one along the axis
            // common to their planes.
            const int axis = !excited[2] ? 0 : (!excited[1] ? 1 : 2);
            flips.push_back(future[axis]);
        } else if (count == 3) {
            flips.push_back(future[rng.below(3)]);
        }
    }
    for (auto e : flips) toggle_edge_faces(lat, face_syndrome, e);
    return flips;
}

SweepResult sweep_decode(const std::array<int, 3>& dims, std::vector<std::uint8_t> face_syndrome, int t_max,
                         CounterRng& rng) {
    if (t_max < 0) throw std::invalid_argument("sweep_decode: t_max must be non-negative");
    SweepResult out;
    out.flips.assign(face_syndrome.size(), 0);
    auto clean = [&] { return std::all_of(face_syndrome.begin(), face_syndrome.end(), [](std::uint8_t b) { return b == 0; }); };
    for (int era = 0; era < 8 && !clean(); ++era) {
        const std::array<int, 3> dir{(era & 1) ? -1 : 1, (era & 2) ? -1 : 1, (era & 4) ? -1 : 1};
        for (int t = 0; t < t_max; ++t) {
            for (auto e : sweep_step(dims, face_syndrome, dir, rng)) out.flips[e] ^= 1U;
            ++out.steps;
            if (clean()) break;
        }
    }
    out.converged = clean();
    return out;
}

namespace {

class SweepMatch : public Decoder {
public:
    SweepMatch(const StabilizerCode& code, const NoiseModel& noise, double tmax_factor)
        : code_(std::make_shared<const StabilizerCode>(code)) {
        check_cubic(code);
        if (!(tmax_factor > 0)) throw std::invalid_argument("sweep-match: t_max factor must be positive");
        const CubicLattice lat{code.dims};
        const std::size_t nv = lat.vertices();
        for (std::size_t g = 0; g < code.num_stabilizers(); ++g) {
            const bool vertex = code.sectors[g] == "vertex";
            if ((vertex && g >= nv) || (!vertex && g < nv)) throw std::invalid_argument("sweep-match: unexpected generator layout");
        }
        const auto priors = parent_priors(code, noise);
        for (int a = 0; a < 3; ++a) {
            weight_[a] = axis_weight(mean_prior(priors.x, code.n, [a](std::size_t q) { return static_cast<int>(q % 3) == a; }));
        }
        const int lmax = *std::max_element(code.dims.begin(), code.dims.end());
        t_max_ = std::max(1, static_cast<int>(std::lround(tmax_factor * lmax)));
    }

    DecodeResult decode(const Syndrome& s, CounterRng& rng) override {
        const StabilizerCode& code = *code_;
        if (s.size() != code.num_stabilizers()) throw std::invalid_argument("sweep-match: syndrome size mismatch");
        const CubicLattice lat{code.dims};
        const std::size_t nv = lat.vertices();
        DecodeResult res;
        std::vector<std::uint8_t> xflips(code.n, 0);
        std::vector<std::array<int, 3>> defects;
        for (std::size_t v = 0; v < nv; ++v) {
            if (s.bits()[v]) defects.push_back(lat.coords(v));
        }
        try {
            match_grid(defects, code.dims, weight_,
                       [&](const std::array<int, 3>& site, int axis, bool forward) {
                           auto w = site;
                           if (!forward) w[axis] -= 1;
                           return lat.edge(w, axis);
                       },
                       xflips);
        } catch (const InvalidSyndrome&) {
            res.correction = PauliOperator(code.n);
            res.converged = false;
            res.invalid_syndrome = true;
            return res;
        }
        std::vector<std::uint8_t> faces(s.bits().begin() + static_cast<std::ptrdiff_t>(nv), s.bits().end());
        auto sweep = sweep_decode(code.dims, std::move(faces), t_max_, rng);
        res.converged = sweep.converged;
        res.correction = detail::parent_to_physical(code, xflips, sweep.flips);
        return res;
    }

    std::string name() const override { return "sweep-match"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<SweepMatch>(*this); }

private:
    std::shared_ptr<const StabilizerCode> code_;
    std::array<std::int64_t, 3> weight_{};
    int t_max_ = 1;
};

// Matching decoder for periodic 2D surface codes (CSS or XZZX), both sectors.
class Mwpm2d : public Decoder {
public:
    Mwpm2d(const StabilizerCode& code, const NoiseModel& noise) : code_(std::make_shared<const StabilizerCode>(code)) {
        if ((code.family != "surface2d-css" && code.family != "surface2d-xzzx") || code.boundary != Boundary::periodic) {
            throw std::invalid_argument("mwpm: expected a periodic surface2d-css or surface2d-xzzx code");
        }
        const int lx = code.dims[0], ly = code.dims[1];
        for (int y = 0; y < ly; ++y) {
            for (int x = 0; x < lx; ++x) {
                const auto q = static_cast<std::size_t>(2 * (x + lx * y));
                if (code.coords[q].pos != std::array<int, 3>{2 * x + 1, 2 * y, 0} ||
                    code.coords[q + 1].pos != std::array<int, 3>{2 * x, 2 * y + 1, 0}) {
                    throw std::invalid_argument("mwpm: unexpected qubit layout");
                }
            }
        }
        const auto priors = parent_priors(code, noise);
        auto horizontal = [](std::size_t q) { return q % 2 == 0; };
        auto vertical = [](std::size_t q) { return q % 2 == 1; };
        vertex_weight_ = {axis_weight(mean_prior(priors.x, code.n, horizontal)),
                          axis_weight(mean_prior(priors.x, code.n, vertical)), 1};
        face_weight_ = {axis_weight(mean_prior(priors.z, code.n, vertical)),
                        axis_weight(mean_prior(priors.z, code.n, horizontal)), 1};
    }

    DecodeResult decode(const Syndrome& s, CounterRng&) override {
        const StabilizerCode& code = *code_;
        if (s.size() != code.num_stabilizers()) throw std::invalid_argument("mwpm: syndrome size mismatch");
        const int lx = code.dims[0], ly = code.dims[1];
        const std::size_t cells = static_cast<std::size_t>(lx * ly);
        const std::array<int, 3> dims{lx, ly, 1};
        auto qubit = [&](int x, int y, int axis) {
            return static_cast<std::size_t>(2 * (wrap(x, lx) + lx * wrap(y, ly)) + axis);
        };
        std::vector<std::uint8_t> xflips(code.n, 0), zflips(code.n, 0);
        std::vector<std::array<int, 3>> vdef, fdef;
        for (std::size_t i = 0; i < cells; ++i) {
            const std::array<int, 3> site{static_cast<int>(i) % lx, static_cast<int>(i) / lx, 0};
            if (s.bits()[i]) vdef.push_back(site);
            if (s.bits()[cells + i]) fdef.push_back(site);
        }
        DecodeResult res;
        try {
            match_grid(vdef, dims, vertex_weight_,
                       [&](const std::array<int, 3>& v, int axis, bool fwd) {
                           return axis == 0 ? qubit(fwd ? v[0] : v[0] - 1, v[1], 0)
                                            : qubit(v[0], fwd ? v[1] : v[1] - 1, 1);
                       },
                       xflips);
            // Face (x, y) has corner (x, y); its +x neighbour lies across the
            // vertical edge at x+1, its +y neighbour across the horizontal edge at y+1.
            match_grid(fdef, dims, face_weight_,
                       [&](const std::array<int, 3>& f, int axis, bool fwd) {
                           return axis == 0 ? qubit(fwd ? f[0] + 1 : f[0], f[1], 1)
                                            : qubit(f[0], fwd ? f[1] + 1 : f[1], 0);
                       },
                       zflips);
        } catch (const InvalidSyndrome&) {
            res.correction = PauliOperator(code.n);
            res.converged = false;
            res.invalid_syndrome = true;
            return res;
        }
        res.correction = detail::parent_to_physical(code, xflips, zflips);
        return res;
    }

    std::string name() const override { return "mwpm"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<Mwpm2d>(*this); }

private:
    std::shared_ptr<const StabilizerCode> code_;
    std::array<std::int64_t, 3> vertex_weight_{}, face_weight_{};
};

}  // namespace

DecodeResult sweep_match_decode(const StabilizerCode& code, const Syndrome& s, const NoiseModel& noise,
                                CounterRng& rng, double tmax_factor) {
    return SweepMatch(code, noise, tmax_factor).decode(s, rng);
}

namespace detail {

std::unique_ptr<Decoder> make_sweep_match_decoder(const StabilizerCode& code, const NoiseModel& noise,
                                                  double tmax_factor) {
    return std::make_unique<SweepMatch>(code, noise, tmax_factor);
}

std::unique_ptr<Decoder> make_mwpm_decoder(const StabilizerCode& code, const NoiseModel& noise) {
    return std::make_unique<Mwpm2d>(code, noise);
}

}  // namespace detail

}  // namespace qec3d
