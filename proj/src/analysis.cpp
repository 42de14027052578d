#include "qec3d/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace qec3d {

std::string to_string(FitSector s) {
    switch (s) {
        case FitSector::total: return "total";
        case FitSector::x: return "x";
        case FitSector::z: return "z";
    }
    return "total";
}

FitSector parse_fit_sector(std::string_view text) {
    if (text == "total") return FitSector::total;
    if (text == "x") return FitSector::x;
    if (text == "z") return FitSector::z;
    throw std::invalid_argument("unknown fit sector: " + std::string(text));
}

CheckSector parse_check_sector(std::string_view text) {
    if (text == "x" || text == "X") return CheckSector::x;
    if (text == "z" || text == "Z") return CheckSector::z;
    throw std::invalid_argument("unknown check sector: " + std::string(text));
}

DataCell data_cell(const CellRecord& record, FitSector sector) {
    DataCell c;
    c.p = record.p;
    c.L = record.dims[0];
    c.n_trials = static_cast<double>(record.stats.n_trials);
    switch (sector) {
        case FitSector::total: c.n_fail = static_cast<double>(record.stats.n_fail_total); break;
        case FitSector::x: c.n_fail = record.stats.mean_fail_x(); break;
        case FitSector::z: c.n_fail = record.stats.mean_fail_z(); break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Finite-size scaling fit

double ThresholdFit::rescaled(double p, int L) const {
    return (p - p_th) * std::pow(static_cast<double>(L), 1.0 / nu);
}

double ThresholdFit::curve(double p, int L) const {
    const double x = rescaled(p, L);
    return a + b * x + c * x * x;
}

namespace {

struct Point {
    double p;
    double log_l;
    double y;
};

struct Quadratic {
    double sse = std::numeric_limits<double>::infinity();
    double a = 0, b = 0, c = 0;
};

Quadratic solve_quadratic(const std::vector<Point>& pts, double p_th, double nu) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (const auto& pt : pts) {
        const double x = (pt.p - p_th) * std::exp(pt.log_l / nu);
        const Eigen::Vector3d row(1.0, x, x * x);
        m += row * row.transpose();
        r += pt.y * row;
    }
    const auto qr = m.colPivHouseholderQr();
    if (qr.rank() < 3) return {};
    const Eigen::Vector3d coef = qr.solve(r);
    Quadratic q{0.0, coef[0], coef[1], coef[2]};
    for (const auto& pt : pts) {
        const double x = (pt.p - p_th) * std::exp(pt.log_l / nu);
        const double d = pt.y - (q.a + q.b * x + q.c * x * x);
        q.sse += d * d;
    }
    return q;
}

std::vector<Point> points_in_window(const std::vector<DataCell>& cells, FitWindow w) {
    std::vector<Point> pts;
    for (const auto& c : cells) {
        if (c.n_trials <= 0) throw std::invalid_argument("fit: cell without trials");
        if (c.n_fail < 0 || c.n_fail > c.n_trials) throw std::invalid_argument("fit: n_fail out of range");
        if (c.L <= 0) throw std::invalid_argument("fit: nonpositive size");
        if (c.p < w.lo || c.p > w.hi) continue;
        pts.push_back({c.p, std::log(static_cast<double>(c.L)), c.rate()});
    }
    return pts;
}

void require_nondegenerate(const std::vector<Point>& pts) {
    std::set<double> ps, ls, rates;
    for (const auto& pt : pts) {
        ps.insert(pt.p);
        ls.insert(pt.log_l);
        rates.insert(pt.y);
    }
    if (ls.size() < 3) throw std::invalid_argument("fit: need at least 3 distinct sizes in the window");
    if (ps.size() < 2) throw std::invalid_argument("fit: need at least 2 distinct error rates in the window");
    if (rates.size() < 2) throw std::invalid_argument("fit: logical error rates do not vary");
}

ThresholdFit fit_points(const std::vector<Point>& pts, FitWindow window) {
    require_nondegenerate(pts);
    double p_lo = std::numeric_limits<double>::infinity();
    double p_hi = -p_lo;
    for (const auto& pt : pts) {
        p_lo = std::min(p_lo, pt.p);
        p_hi = std::max(p_hi, pt.p);
    }
    p_lo = std::max(p_lo, window.lo);
    p_hi = std::min(p_hi, window.hi);

    constexpr double kPStep = 1e-3;
    constexpr double kNuStep = 0.05;
    double best_p = p_lo, best_nu = 1.0;
    Quadratic best;
    const long np = static_cast<long>(std::floor((p_hi - p_lo) / kPStep + 1e-9));
    for (long i = 0; i <= np; ++i) {
        const double p_th = p_lo + static_cast<double>(i) * kPStep;
        for (int j = 0; j <= 30; ++j) {
            const double nu = 0.5 + kNuStep * j;
            const auto q = solve_quadratic(pts, p_th, nu);
            if (q.sse < best.sse) {
                best = q;
                best_p = p_th;
                best_nu = nu;
            }
        }
    }
    if (!std::isfinite(best.sse)) throw std::invalid_argument("fit: ansatz is singular on this data");

    // Nelder-Mead refinement on (p_th, nu).
    struct Vertex {
        double p, nu;
        Quadratic q;
    };
    auto eval = [&](double p_th, double nu) {
        Vertex v{p_th, nu, {}};
        if (p_th > 0.0 && p_th < 1.0 && nu > 0.05) v.q = solve_quadratic(pts, p_th, nu);
        return v;
    };
    std::array<Vertex, 3> simplex{Vertex{best_p, best_nu, best}, eval(best_p + kPStep, best_nu),
                                  eval(best_p, best_nu + kNuStep)};
    auto by_sse = [](const Vertex& a, const Vertex& b) { return a.q.sse < b.q.sse; };
    for (int iter = 0; iter < 2000; ++iter) {
        std::sort(simplex.begin(), simplex.end(), by_sse);
        const double spread = std::max({std::abs(simplex[1].p - simplex[0].p), std::abs(simplex[2].p - simplex[0].p),
                                        std::abs(simplex[1].nu - simplex[0].nu), std::abs(simplex[2].nu - simplex[0].nu)});
        if (spread < 1e-12) break;
        const double cp = 0.5 * (simplex[0].p + simplex[1].p);
        const double cn = 0.5 * (simplex[0].nu + simplex[1].nu);
        auto towards = [&](double t) { return eval(cp + t * (simplex[2].p - cp), cn + t * (simplex[2].nu - cn)); };
        const auto r = towards(-1.0);
        if (r.q.sse < simplex[0].q.sse) {
            const auto e = towards(-2.0);
            simplex[2] = e.q.sse < r.q.sse ? e : r;
        } else if (r.q.sse < simplex[1].q.sse) {
            simplex[2] = r;
        } else {
            const auto c = r.q.sse < simplex[2].q.sse ? towards(-0.5) : towards(0.5);
            if (c.q.sse < std::min(r.q.sse, simplex[2].q.sse)) {
                simplex[2] = c;
            } else {
                for (std::size_t i = 1; i < 3; ++i) {
                    simplex[i] = eval(0.5 * (simplex[0].p + simplex[i].p), 0.5 * (simplex[0].nu + simplex[i].nu));
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_sse);
    best_p = simplex[0].p;
    best_nu = simplex[0].nu;
    best = simplex[0].q;

    ThresholdFit fit;
    fit.p_th = best_p;
    fit.nu = best_nu;
    fit.a = best.a;
    fit.b = best.b;
    fit.c = best.c;
    fit.low = fit.high = best_p;
    fit.residual = best.sse;
    return fit;
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

// Failure-rate draw from the posterior of one cell.
double draw_rate(const DataCell& c, CounterRng& rng) {
    return 1.0 - sample_beta(c.n_trials - c.n_fail + 1.0, c.n_fail + 1.0, rng);
}

}  // namespace

ThresholdFit fit_threshold(const std::vector<DataCell>& cells, FitWindow window) {
    return fit_points(points_in_window(cells, window), window);
}

double sample_beta(double a, double b, CounterRng& rng) {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("sample_beta: parameters must be positive");
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

ThresholdFit bootstrap_fit(const std::vector<DataCell>& cells, FitWindow window, std::size_t n_bs,
                           std::uint64_t seed) {
    std::vector<DataCell> in;
    for (const auto& c : cells) {
        if (c.p >= window.lo && c.p <= window.hi) in.push_back(c);
    }
    ThresholdFit fit = fit_threshold(in, window);
    if (n_bs == 0) return fit;
    std::vector<double> samples;
    std::size_t attempt = 0;
    while (samples.size() < n_bs) {
        if (attempt > 20 * n_bs + 100) throw std::invalid_argument("bootstrap: too many degenerate resamples");
        CounterRng rng(seed, attempt++, 0);
        std::vector<Point> pts;
        pts.reserve(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) {
            const auto& c = in[rng.below(in.size())];
            pts.push_back({c.p, std::log(static_cast<double>(c.L)), draw_rate(c, rng)});
        }
        try {
            samples.push_back(fit_points(pts, window).p_th);
        } catch (const std::invalid_argument&) {
            continue;
        }
    }
    fit.low = percentile(samples, 0.16);
    fit.high = percentile(samples, 0.84);
    fit.n_bootstrap = samples.size();
    return fit;
}

const ThresholdFit& select_min_sector(const std::vector<ThresholdFit>& fits) {
    if (fits.empty()) throw std::invalid_argument("select_min_sector: no fits");
    return *std::min_element(fits.begin(), fits.end(),
                             [](const ThresholdFit& a, const ThresholdFit& b) { return a.low < b.low; });
}

std::vector<CollapsePoint> collapse(const std::vector<DataCell>& cells, const ThresholdFit& fit) {
    std::vector<CollapsePoint> out;
    for (const auto& c : cells) out.push_back({fit.rescaled(c.p, c.L), c.rate(), c.L});
    return out;
}

// ---------------------------------------------------------------------------
// Crossing of two sizes

namespace {

double rate_variance(double rate, double n) { return (rate * (1.0 - rate) + 1.0 / n) / n; }

// Weighted least-squares polynomial (degree <= 2) through the rate difference;
// returns its smallest rising root inside the p range.
std::optional<double> rising_root(const std::vector<double>& ps, const std::vector<double>& diff,
                                  const std::vector<double>& var) {
    const std::size_t n = ps.size();
    const int degree = n >= 3 ? 2 : 1;
    const double lo = ps.front(), hi = ps.back();
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    if (half <= 0) return std::nullopt;
    Eigen::MatrixXd m(n, degree + 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / std::sqrt(var[i]);
        const double u = (ps[i] - mid) / half;
        double pw = 1.0;
        for (int d = 0; d <= degree; ++d) {
            m(static_cast<Eigen::Index>(i), d) = w * pw;
            pw *= u;
        }
        y(static_cast<Eigen::Index>(i)) = w * diff[i];
    }
    const Eigen::VectorXd coef = m.colPivHouseholderQr().solve(y);
    const double c0 = coef(0), c1 = coef(1), c2 = degree == 2 ? coef(2) : 0.0;

    std::vector<double> roots;
    if (std::abs(c2) <= 1e-12 * (std::abs(c1) + std::abs(c0))) {
        if (c1 != 0) roots.push_back(-c0 / c1);
    } else {
        const double disc = c1 * c1 - 4 * c2 * c0;
        if (disc < 0) return std::nullopt;
        const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
        roots.push_back(q / c2);
        if (q != 0) roots.push_back(c0 / q);
    }
    std::optional<double> best;
    for (double u : roots) {
        if (u < -1.0 || u > 1.0 || c1 + 2 * c2 * u <= 0) continue;
        if (!best || u < *best) best = u;
    }
    if (!best) return std::nullopt;
    return mid + half * *best;
}

std::vector<std::pair<DataCell, DataCell>> pair_by_p(const std::vector<DataCell>& small,
                                                     const std::vector<DataCell>& large) {
    std::map<double, DataCell> by_p;
    for (const auto& c : small) by_p[c.p] = c;
    std::vector<std::pair<DataCell, DataCell>> out;
    for (const auto& c : large) {
        auto it = by_p.find(c.p);
        if (it != by_p.end()) out.emplace_back(it->second, c);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first.p < b.first.p; });
    if (out.size() < 2) throw std::invalid_argument("crossing: need at least 2 shared error rates");
    return out;
}

}  // namespace

std::optional<double> crossing_point(const std::vector<DataCell>& small, const std::vector<DataCell>& large) {
    const auto pairs = pair_by_p(small, large);
    std::vector<double> ps, diff, var;
    for (const auto& [s, l] : pairs) {
        ps.push_back(s.p);
        diff.push_back(l.rate() - s.rate());
        var.push_back(rate_variance(s.rate(), s.n_trials) + rate_variance(l.rate(), l.n_trials));
    }
    return rising_root(ps, diff, var);
}

Crossing estimate_crossing(const std::vector<DataCell>& small, const std::vector<DataCell>& large, std::size_t n_bs,
                           std::uint64_t seed) {
    const auto pairs = pair_by_p(small, large);
    const auto centre = crossing_point(small, large);
    if (!centre) throw std::invalid_argument("crossing: the two sizes do not cross");
    Crossing out;
    out.p = *centre;
    std::vector<double> samples;
    for (std::size_t r = 0; r < n_bs; ++r) {
        CounterRng rng(seed, r, 0);
        std::vector<double> ps, diff, var;
        for (const auto& [s, l] : pairs) {
            ps.push_back(s.p);
            const double rs = draw_rate(s, rng);
            const double rl = draw_rate(l, rng);
            diff.push_back(rl - rs);
            var.push_back(rate_variance(rs, s.n_trials) + rate_variance(rl, l.n_trials));
        }
        if (auto z = rising_root(ps, diff, var)) samples.push_back(*z);
    }
    if (samples.size() >= 2) {
        double m = 0;
        for (double v : samples) m += v;
        m /= static_cast<double>(samples.size());
        double var = 0;
        for (double v : samples) var += (v - m) * (v - m);
        out.sigma = std::sqrt(var / static_cast<double>(samples.size() - 1));
    } else {
        out.sigma = std::numeric_limits<double>::infinity();
    }
    out.n_bootstrap = samples.size();
    return out;
}

// ---------------------------------------------------------------------------
// Code properties

namespace {

std::vector<std::vector<std::size_t>> sector_supports(const StabilizerCode& code, CheckSector sector) {
    auto split = code.css_split();
    if (!split) split = code.parent_split();
    if (!split) throw std::invalid_argument("code has no CSS sectors");
    const auto& h = sector == CheckSector::x ? split->hx : split->hz;
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t r = 0; r < h.rows(); ++r) rows.push_back(h.row(r));
    return rows;
}

}  // namespace

std::size_t girth(const StabilizerCode& code, CheckSector sector) {
    const auto checks = sector_supports(code, sector);
    const std::size_t m = checks.size();
    std::vector<std::vector<std::size_t>> adj(m + code.n);
    for (std::size_t c = 0; c < m; ++c) {
        for (auto q : checks[c]) {
            adj[c].push_back(m + q);
            adj[m + q].push_back(c);
        }
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(adj.size(), kUnseen), parent(adj.size(), kUnseen), queue;
    // Every cycle passes through a check node, so check roots suffice.
    for (std::size_t root = 0; root < m; ++root) {
        std::fill(dist.begin(), dist.end(), kUnseen);
        queue.assign(1, root);
        dist[root] = 0;
        parent[root] = kUnseen;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            if (2 * dist[u] >= best) break;
            for (auto w : adj[u]) {
                if (dist[w] == kUnseen) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if (w != parent[u]) {
                    best = std::min(best, dist[u] + dist[w] + 1);
                }
            }
        }
    }
    return best == std::numeric_limits<std::size_t>::max() ? 0 : best;
}

std::size_t split_belief_number(const StabilizerCode& code, CheckSector sector, int depth) {
    if (depth < 1) throw std::invalid_argument("split_belief_number: depth must be at least 1");
    const auto checks = sector_supports(code, sector);
    std::vector<std::vector<std::size_t>> by_qubit(code.n);
    for (std::size_t c = 0; c < checks.size(); ++c) {
        for (auto q : checks[c]) by_qubit[q].push_back(c);
    }
    std::size_t best = 0;
    std::vector<std::uint8_t> product(code.n, 0);
    std::vector<std::size_t> chosen;
    std::size_t weight = 0;
    auto toggle = [&](std::size_t c) {
        for (auto q : checks[c]) {
            product[q] ^= 1U;
            weight += product[q] ? 1 : static_cast<std::size_t>(-1);
        }
    };
    auto record = [&] {
        if (weight > 0 && weight % 2 == 0 && (best == 0 || weight / 2 < best)) best = weight / 2;
    };
    auto recurse = [&](auto&& self) -> void {
        record();
        if (static_cast<int>(chosen.size()) == depth) return;
        std::set<std::size_t> next;
        for (auto c : chosen) {
            for (auto q : checks[c]) {
                for (auto d : by_qubit[q]) {
                    if (d > chosen.front() && std::find(chosen.begin(), chosen.end(), d) == chosen.end()) next.insert(d);
                }
            }
        }
        for (auto d : next) {
            chosen.push_back(d);
            toggle(d);
            self(self);
            toggle(d);
            chosen.pop_back();
        }
    };
    for (std::size_t c = 0; c < checks.size(); ++c) {
        chosen.assign(1, c);
        toggle(c);
        recurse(recurse);
        toggle(c);
    }
    return best;
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double binary_entropy_threshold() {
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (binary_entropy(mid) < 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

bool is_logical(const StabilizerCode& code, const PauliOperator& op) {
    const auto letters = op.to_dense();
    for (const auto& s : code.stabilizers) {
        if (!commutes_dense(s, letters)) return false;
    }
    for (const auto& l : code.logicals) {
        if (!commutes_dense(l.x, letters) || !commutes_dense(l.z, letters)) return true;
    }
    return false;
}

std::optional<PauliOperator> min_pure_z_logical(const StabilizerCode& code, std::size_t weight_cap) {
    // Z-only operators commuting with the stabilizers form the kernel of the
    // stabilizer X-parts.
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& s : code.stabilizers) rows.push_back(s.x_part().support());
    const auto basis = gf2::kernel_basis(gf2::BitMatrix(code.n, rows));
    if (basis.size() > 30) throw std::invalid_argument("min_pure_z_logical: kernel too large to enumerate");

    const std::size_t words = (code.n + 63) / 64;
    auto pack = [&](const gf2::BitVector& v) {
        std::vector<std::uint64_t> w(words, 0);
        for (auto i : v.support()) w[i >> 6] |= std::uint64_t{1} << (i & 63);
        return w;
    };
    std::vector<std::vector<std::uint64_t>> packed;
    for (const auto& b : basis) packed.push_back(pack(b));
    // Anticommutation with a logical only depends on the X-parts of the logicals.
    std::vector<std::vector<std::uint64_t>> tests;
    for (const auto& l : code.logicals) {
        tests.push_back(pack(l.x.x_part()));
        tests.push_back(pack(l.z.x_part()));
    }

    std::vector<std::uint64_t> cur(words, 0);
    std::optional<gf2::BitVector> best;
    const std::uint64_t total = std::uint64_t{1} << basis.size();
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(g));
        for (std::size_t w = 0; w < words; ++w) cur[w] ^= packed[bit][w];
        std::size_t weight = 0;
        for (auto w : cur) weight += static_cast<std::size_t>(std::popcount(w));
        if (weight > weight_cap || (best && weight > best->weight())) continue;
        bool logical = false;
        for (const auto& t : tests) {
            std::size_t overlap = 0;
            for (std::size_t w = 0; w < words; ++w) overlap += static_cast<std::size_t>(std::popcount(cur[w] & t[w]));
            if (overlap % 2) {
                logical = true;
                break;
            }
        }
        if (!logical) continue;
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < code.n; ++i) {
            if ((cur[i >> 6] >> (i & 63)) & 1U) support.push_back(i);
        }
        gf2::BitVector v(code.n, std::move(support));
        if (!best || v.weight() < best->weight() || (v.weight() == best->weight() && v < *best)) best = std::move(v);
    }
    if (!best) return std::nullopt;
    return PauliOperator::uniform(code.n, best->support(), Pauli::Z);
}

}  // namespace qec3d
