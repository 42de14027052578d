// Acceptance runner: one PASS/FAIL line per criterion.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qec3d/analysis.hpp"
#include "qec3d/decoders.hpp"
#include "qec3d/harness.hpp"

using namespace qec3d;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void note(const std::string& line) { std::cout << "  " << line << '\n' << std::flush; }

unsigned workers() { return std::max(1U, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = true;
    std::string summary;
};

// ---------------------------------------------------------------------------
// Criterion 1

Outcome code_validity() {
    Outcome out;
    auto expect = [&](const std::string& label, const StabilizerCode& code, std::optional<std::size_t> k) {
        bool ok = true;
        try {
            code.validate();
        } catch (const std::exception& e) {
            note(label + ": " + e.what());
            ok = false;
        }
        for (std::size_t i = 0; ok && i < code.stabilizers.size(); ++i) {
            for (std::size_t j = i + 1; j < code.stabilizers.size(); ++j) {
                if (!commutes(code.stabilizers[i], code.stabilizers[j])) {
                    note(label + ": generators " + std::to_string(i) + " and " + std::to_string(j) + " anticommute");
                    ok = false;
                    break;
                }
            }
        }
        const std::size_t got = code.k();
        if (k && got != *k) ok = false;
        if (!k && got == 0) ok = false;
        note(label + ": n=" + std::to_string(code.n) + " k=" + std::to_string(got) +
             (k ? " expected " + std::to_string(*k) : std::string(" expected > 0")) + (ok ? "" : "  <-- mismatch"));
        out.pass = out.pass && ok;
        return ok;
    };

    struct Item {
        std::string label;
        std::function<StabilizerCode()> build;
        std::optional<std::size_t> k;
        std::string family;
    };
    auto xcube_k = [](int a, int b, int c) { return static_cast<std::size_t>(2 * (a + b + c) - 3); };
    std::vector<Item> items{
        {"surface2d css 4x4 periodic", [] { return build_surface2d(Surface2dKind::css, 4, 4, Boundary::periodic); }, 2,
         "surface2d-css"},
        {"surface2d css 5x3 open", [] { return build_surface2d(Surface2dKind::css, 5, 3, Boundary::open); }, 1, ""},
        {"surface2d xzzx 4x4", [] { return build_surface2d(Surface2dKind::xzzx, 4, 4, Boundary::periodic); }, 2, ""},
        {"surface2d xzzx 5x5", [] { return build_surface2d(Surface2dKind::xzzx, 5, 5, Boundary::periodic); }, 2, ""},
        {"surface2d xy 4x4", [] { return build_surface2d(Surface2dKind::xy, 4, 4, Boundary::periodic); }, 2, ""},
        {"surface2d xy 6x6", [] { return build_surface2d(Surface2dKind::xy, 6, 6, Boundary::periodic); }, 2, ""},
        {"xzzx rotated 3x4", [] { return build_xzzx_rotated2d(3, 4); }, std::nullopt, ""},
        {"xzzx rotated 5x6", [] { return build_xzzx_rotated2d(5, 6); }, std::nullopt, ""},
        {"cubic 3x3x3", [] { return build_surface3d_cubic(3, 3, 3, Boundary::periodic); }, 3, "surface3d-cubic"},
        {"cubic 4x5x6", [] { return build_surface3d_cubic(4, 5, 6, Boundary::periodic); }, 3, "surface3d-cubic"},
        {"checkerboard 4x4x4", [] { return build_surface3d_checkerboard(4, 4, 4); }, 3, "surface3d-checkerboard"},
        {"checkerboard 6x6x6", [] { return build_surface3d_checkerboard(6, 6, 6); }, 3, "surface3d-checkerboard"},
        {"color 2x2x2", [] { return build_color3d(2, 2, 2); }, 9, "color3d"},
        {"color 2x2x4", [] { return build_color3d(2, 2, 4); }, 9, "color3d"},
        {"xcube 3x3x3", [] { return build_xcube(3, 3, 3); }, xcube_k(3, 3, 3), "xcube"},
        {"xcube 3x4x5", [] { return build_xcube(3, 4, 5); }, xcube_k(3, 4, 5), "xcube"},
        {"sierpinski 3x6x4", [] { return build_sierpinski(3, 6, 4); }, std::nullopt, "sierpinski"},
        {"sierpinski 6x6x4", [] { return build_sierpinski(6, 6, 4); }, std::nullopt, "sierpinski"},
        {"haah 6x6x4", [] { return build_haah(6, 6, 4); }, 6, "haah"},
        {"haah 6x6x2", [] { return build_haah(6, 6, 2); }, 6, "haah"},
        {"rotated 2x3x2 seam", [] { return build_rotated_surface3d(2, 3, 2, Boundary::periodic_with_seam); }, 1, ""},
        {"rotated 3x4x2 seam", [] { return build_rotated_surface3d(3, 4, 2, Boundary::periodic_with_seam); }, 1, ""},
    };
    for (const auto& item : items) {
        const auto code = item.build();
        expect(item.label, code, item.k);
        if (!item.family.empty()) {
            const auto d = deform(code, standard_recipe(item.family));
            expect(item.label + " deformed", d, code.k());
        }
    }
    const auto rot = build_rotated_surface3d(2, 3, 2, Boundary::periodic_with_seam);
    expect("rotated 2x3x2 deformed", deform(rot, recipe_by_name("rotated-checkerboard")), rot.k());
    out.summary = "stabilizers commute, k counts match and deformation preserves k";
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 2

Outcome girth_table() {
    struct Row {
        std::string name;
        StabilizerCode code;
        std::array<std::size_t, 4> expected;
    };
    std::vector<Row> rows{
        {"cubic", build_surface3d_cubic(4, 4, 4, Boundary::periodic), {8, 8, 2, 3}},
        {"checkerboard", build_surface3d_checkerboard(4, 4, 4), {8, 6, 2, 6}},
        {"xcube", build_xcube(4, 4, 4), {8, 4, 2, 6}},
        {"color", build_color3d(2, 2, 2), {4, 6, 2, 12}},
    };
    Outcome out;
    std::size_t matched = 0;
    for (const auto& r : rows) {
        const std::array<std::size_t, 4> got{girth(r.code, CheckSector::x), girth(r.code, CheckSector::z),
                                             split_belief_number(r.code, CheckSector::x, 2),
                                             split_belief_number(r.code, CheckSector::z, 2)};
        std::ostringstream line;
        line << r.name << ": x-girth/z-girth/x-split/z-split = ";
        for (std::size_t i = 0; i < 4; ++i) {
            line << got[i] << (i < 3 ? "/" : "");
            if (got[i] == r.expected[i]) ++matched;
        }
        line << " expected ";
        for (std::size_t i = 0; i < 4; ++i) line << r.expected[i] << (i < 3 ? "/" : "");
        note(line.str());
        if (got != r.expected) out.pass = false;
    }
    out.summary = std::to_string(matched) + "/16 table entries reproduced";
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo helpers

CellRecord run_cell(const StabilizerCode& code, double p, double eta, const DecoderConfig& cfg, std::size_t trials,
                    std::uint64_t seed) {
    RunOptions opt;
    opt.n_trials = trials;
    opt.base_seed = seed;
    opt.workers = workers();
    CellRecord r;
    r.code = code.family;
    r.dims = code.dims;
    r.p = p;
    r.eta = eta;
    r.decoder = cfg.name;
    r.stats = run_trials(code, resolve(p, eta), cfg, opt);
    return r;
}

double binomial_sigma(double rate, double n) { return std::sqrt(std::max(rate * (1 - rate), 1.0 / n) / n); }

// ---------------------------------------------------------------------------
// Criterion 3

Outcome symmetry_monotone() {
    constexpr std::size_t kTrials = 3000;
    struct Family {
        std::string name;
        std::string recipe_family;
        std::vector<int> sizes;
        std::function<StabilizerCode(int)> build;
    };
    std::vector<Family> families{
        {"deformed cubic", "surface3d-cubic", {5, 7, 9},
         [](int L) { return build_surface3d_cubic(L, L, L, Boundary::periodic); }},
        {"deformed checkerboard", "surface3d-checkerboard", {6, 8, 10},
         [](int L) { return build_surface3d_checkerboard(L, L, L); }},
    };
    DecoderConfig cfg;
    cfg.name = "symmetry";
    Outcome out;
    std::size_t checks = 0, held = 0;
    for (const auto& fam : families) {
        std::vector<StabilizerCode> codes;
        for (int L : fam.sizes) codes.push_back(deform(fam.build(L), standard_recipe(fam.recipe_family)));
        for (double p : {0.2, 0.3, 0.4}) {
            std::vector<double> rates;
            std::ostringstream line;
            line << fam.name << " p=" << p << ":";
            for (std::size_t i = 0; i < codes.size(); ++i) {
                const auto r = run_cell(codes[i], p, kInf, cfg, kTrials, 300 + i);
                rates.push_back(r.stats.failure_rate());
                line << " L=" << fam.sizes[i] << " " << fmt("%.4f", rates.back());
            }
            for (std::size_t i = 1; i < rates.size(); ++i) {
                const double s = std::hypot(binomial_sigma(rates[i], kTrials), binomial_sigma(rates[i - 1], kTrials));
                ++checks;
                if (rates[i] <= rates[i - 1] + 3 * s) {
                    ++held;
                } else {
                    out.pass = false;
                    line << "  <-- increase L=" << fam.sizes[i - 1] << "->" << fam.sizes[i];
                }
            }
            note(line.str());
        }
    }
    out.summary = std::to_string(held) + "/" + std::to_string(checks) + " size steps non-increasing at 3 sigma, " +
                  std::to_string(kTrials) + " trials per cell";
    return out;
}

// ---------------------------------------------------------------------------
// Criteria 4-6

// Two grid steps either side of the grid point nearest the first sign change of
// p_L(largest) - p_L(smallest); the whole grid when the sizes do not cross.
FitWindow crossing_window(const std::vector<DataCell>& small, const std::vector<DataCell>& large) {
    for (std::size_t i = 1; i < small.size(); ++i) {
        const double d0 = large[i - 1].rate() - small[i - 1].rate();
        const double d1 = large[i].rate() - small[i].rate();
        if (d0 <= 0 && d1 > 0) {
            const double pc = small[i - 1].p + (small[i].p - small[i - 1].p) * (-d0) / (d1 - d0);
            return {pc - 0.025, pc + 0.025};
        }
    }
    return {};
}

Outcome threshold_criterion(const std::string& label, double eta, const DecoderConfig& cfg, std::vector<double> ps,
                            double target, double tol) {
    constexpr std::size_t kTrials = 4000;
    constexpr std::size_t kBootstrap = 200;
    const std::vector<int> sizes{5, 7, 9};
    std::vector<CellRecord> records;
    std::map<int, std::vector<DataCell>> totals;
    for (int L : sizes) {
        const auto code = build_surface3d_cubic(L, L, L, Boundary::periodic);
        std::ostringstream line;
        line << label << " L=" << L << ":";
        for (std::size_t i = 0; i < ps.size(); ++i) {
            records.push_back(run_cell(code, ps[i], eta, cfg, kTrials, 1000 * L + i));
            totals[L].push_back(data_cell(records.back(), FitSector::total));
            line << " " << fmt("%.2f", ps[i]) << ":" << fmt("%.4f", records.back().stats.failure_rate());
        }
        note(line.str());
    }
    const auto window = crossing_window(totals[sizes.front()], totals[sizes.back()]);
    note("fit window [" + fmt("%.4f", window.lo) + ", " + fmt("%.4f", window.hi) + "]");
    std::vector<ThresholdFit> fits;
    for (auto sector : {FitSector::total, FitSector::x, FitSector::z}) {
        std::vector<DataCell> cells;
        for (const auto& r : records) cells.push_back(data_cell(r, sector));
        try {
            auto f = bootstrap_fit(cells, window, kBootstrap, 17);
            f.sector = sector;
            note(to_string(sector) + " sector: p_th=" + fmt("%.4f", f.p_th) + " [" + fmt("%.4f", f.low) + ", " +
                 fmt("%.4f", f.high) + "] nu=" + fmt("%.3f", f.nu));
            fits.push_back(f);
        } catch (const std::invalid_argument& e) {
            note(to_string(sector) + " sector skipped: " + e.what());
        }
    }
    Outcome out;
    if (fits.empty()) {
        out.pass = false;
        out.summary = "no sector could be fitted";
        return out;
    }
    const auto& best = select_min_sector(fits);
    out.pass = std::abs(best.p_th - target) <= tol;
    out.summary = "threshold " + fmt("%.4f", best.p_th) + " (" + to_string(best.sector) + " sector), target " +
                  fmt("%.4f", target) + " +- " + fmt("%.3f", tol) + ", " + std::to_string(kTrials) +
                  " trials per cell";
    return out;
}

std::vector<double> grid(double lo, double hi) {
    std::vector<double> out;
    for (int i = 0; lo + 0.01 * i <= hi + 1e-9; ++i) out.push_back(std::round((lo + 0.01 * i) * 100) / 100);
    return out;
}

Outcome bposd_pure_z() { return threshold_criterion("bposd eta=inf", kInf, {}, grid(0.17, 0.25), 0.2137, 0.02); }

Outcome bposd_depolarizing() {
    return threshold_criterion("bposd eta=0.5", 0.5, {}, grid(0.02, 0.09), 0.0595, 0.01);
}

Outcome sweep_match_pure_z() {
    DecoderConfig cfg;
    cfg.name = "sweep-match";
    return threshold_criterion("sweep-match eta=inf", kInf, cfg, grid(0.11, 0.18), 0.1459, 0.015);
}

// ---------------------------------------------------------------------------
// Criterion 7

Outcome xcube_receding() {
    constexpr std::size_t kTrials = 5000;
    const auto ps = grid(0.08, 0.12);
    std::map<int, std::vector<DataCell>> cells;
    for (int L : {9, 11, 13, 15}) {
        const auto code = build_xcube(L, L, L);
        std::ostringstream line;
        line << "xcube eta=10 L=" << L << ":";
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const auto r = run_cell(code, ps[i], 10.0, {}, kTrials, 7000 + 100 * L + i);
            cells[L].push_back(data_cell(r, FitSector::z));
            line << " " << fmt("%.2f", ps[i]) << ":" << fmt("%.5f", cells[L].back().rate());
        }
        note(line.str());
    }
    Outcome out;
    try {
        const auto a = estimate_crossing(cells[9], cells[11], 400, 3);
        const auto b = estimate_crossing(cells[13], cells[15], 400, 4);
        note("crossing {9,11} = " + fmt("%.4f", a.p) + " +- " + fmt("%.4f", a.sigma) + " (" +
             std::to_string(a.n_bootstrap) + "/400 draws with a root)");
        note("crossing {13,15} = " + fmt("%.4f", b.p) + " +- " + fmt("%.4f", b.sigma) + " (" +
             std::to_string(b.n_bootstrap) + "/400 draws with a root)");
        const double margin = a.p - b.p;
        const double sigma = std::hypot(a.sigma, b.sigma);
        out.pass = margin > sigma;
        out.summary = "crossing shift " + fmt("%.4f", margin) + " vs 1 sigma " + fmt("%.4f", sigma);
    } catch (const std::invalid_argument& e) {
        out.pass = false;
        out.summary = std::string("crossing undefined: ") + e.what();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 8

Outcome fit_self_test() {
    ThresholdFit gen;
    gen.p_th = 0.21;
    gen.nu = 1.0;
    gen.a = 0.3;
    gen.b = 0.5;
    gen.c = 0.5;
    auto cells_for = [&](double n, std::mt19937_64* rng) {
        std::vector<DataCell> cells;
        for (int L : {5, 7, 9, 11}) {
            for (int i = 0; i <= 8; ++i) {
                const double p = 0.17 + 0.01 * i;
                const double rate = gen.curve(p, L);
                double fails = rate * n;
                if (rng) {
                    std::binomial_distribution<long> draw(static_cast<long>(n), rate);
                    fails = static_cast<double>(draw(*rng));
                }
                cells.push_back({p, L, n, fails});
            }
        }
        return cells;
    };
    Outcome out;
    const auto exact = fit_threshold(cells_for(1e6, nullptr));
    const double err = std::abs(exact.p_th - gen.p_th);
    note("noiseless fit p_th=" + fmt("%.6f", exact.p_th) + " error " + fmt("%.2e", err));
    if (err > 1e-4) out.pass = false;

    constexpr int kReps = 50;
    int covered = 0;
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < kReps; ++rep) {
        const auto f = bootstrap_fit(cells_for(2000, &rng), {}, 100, 500 + rep);
        if (f.low <= gen.p_th && gen.p_th <= f.high) ++covered;
    }
    note("bootstrap coverage " + std::to_string(covered) + "/" + std::to_string(kReps));
    if (covered * 100 < 60 * kReps) out.pass = false;
    out.summary = "noiseless error " + fmt("%.2e", err) + ", coverage " + std::to_string(covered) + "/" +
                  std::to_string(kReps);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 9

Outcome rotated_pure_z() {
    Outcome out;
    const auto code = build_rotated_surface3d(2, 3, 2, Boundary::periodic_with_seam);
    std::vector<std::size_t> horizontal;
    for (std::size_t q = 0; q < code.n; ++q) {
        if (!code.coords[q].vertical) horizontal.push_back(q);
    }
    const auto op = PauliOperator::uniform(code.n, horizontal, Pauli::Z);
    const bool logical = is_logical(code, op);
    note("rotated 2x3x2: n=" + std::to_string(code.n) + " k=" + std::to_string(code.k()) +
         ", all-horizontal Z has weight " + std::to_string(op.weight()) + (logical ? " and is logical" : " and is NOT logical"));
    const std::size_t cap = horizontal.size() - 1;
    const auto lighter = min_pure_z_logical(code, cap);
    note(lighter ? "found Z-only logical of weight " + std::to_string(lighter->weight()) + " <= cap " + std::to_string(cap)
                 : "no Z-only logical of weight <= " + std::to_string(cap));
    const double h = binary_entropy_threshold();
    const bool rounds = std::abs(std::round(h * 100) / 100 - 0.11) < 1e-12;
    note("binary entropy threshold " + fmt("%.6f", h));
    out.pass = logical && !lighter && rounds;
    out.summary = std::string("horizontal Z logical ") + (logical ? "yes" : "no") + ", lighter Z-only logical " +
                  (lighter ? "found" : "none") + ", h^-1(1/2) = " + fmt("%.4f", h);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 10

std::int64_t exhaustive_matching(const std::vector<std::vector<std::int64_t>>& w, std::vector<std::size_t> pts) {
    if (pts.empty()) return 0;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::size_t j = 1; j < pts.size(); ++j) {
        std::vector<std::size_t> rest;
        for (std::size_t k = 1; k < pts.size(); ++k) {
            if (k != j) rest.push_back(pts[k]);
        }
        best = std::min(best, w[pts[0]][pts[j]] + exhaustive_matching(w, rest));
    }
    return best;
}

std::vector<double> enumerate_posteriors(const gf2::BitMatrix& h, const std::vector<std::uint8_t>& s,
                                         const std::vector<double>& priors) {
    const std::size_t n = h.cols();
    std::vector<double> mass(n, 0.0);
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<std::uint8_t> e(n);
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = (mask >> i) & 1U;
            w *= e[i] ? priors[i] : 1.0 - priors[i];
        }
        if (h.multiply_dense(e) != s) continue;
        total += w;
        for (std::size_t i = 0; i < n; ++i) {
            if (e[i]) mass[i] += w;
        }
    }
    for (auto& m : mass) m /= total;
    return mass;
}

Outcome decoder_oracles() {
    Outcome out;
    std::mt19937_64 rng(10);

    int mwpm_ok = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 * (1 + rng() % 4);
        std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, 0));
        const bool metric = t % 2 == 0;
        std::vector<std::array<std::int64_t, 3>> pos(n);
        for (auto& p : pos) p = {static_cast<std::int64_t>(rng() % 9), static_cast<std::int64_t>(rng() % 9),
                                 static_cast<std::int64_t>(rng() % 9)};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                w[i][j] = metric ? std::abs(pos[i][0] - pos[j][0]) + std::abs(pos[i][1] - pos[j][1]) +
                                       std::abs(pos[i][2] - pos[j][2])
                                 : static_cast<std::int64_t>(rng() % 1000);
                w[j][i] = w[i][j];
            }
        }
        const auto mate = mwpm(n, [&](std::size_t i, std::size_t j) { return w[i][j]; });
        std::int64_t cost = 0;
        bool valid = mate.size() == n;
        for (std::size_t i = 0; valid && i < n; ++i) {
            valid = mate[i] < n && mate[i] != i && mate[mate[i]] == i;
            if (valid && mate[i] > i) cost += w[i][mate[i]];
        }
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        if (valid && cost == exhaustive_matching(w, all)) ++mwpm_ok;
    }
    note("mwpm: " + std::to_string(mwpm_ok) + "/1000 instances optimal");

    std::size_t ring_total = 0, ring_ok = 0;
    for (std::size_t m = 2; m <= 14; ++m) {
        std::vector<std::vector<std::int64_t>> w(m, std::vector<std::int64_t>(m));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t d = i > j ? i - j : j - i;
                w[i][j] = static_cast<std::int64_t>(std::min(d, m - d));
            }
        }
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
            if (std::popcount(mask) % 2) continue;
            std::vector<std::size_t> defects;
            for (std::size_t i = 0; i < m; ++i) {
                if ((mask >> i) & 1U) defects.push_back(i);
            }
            const auto r = match_ring(defects, m);
            std::vector<std::uint8_t> boundary(m, 0);
            for (auto q : r.flips) {
                boundary[q] ^= 1U;
                boundary[(q + 1) % m] ^= 1U;
            }
            bool ok = static_cast<std::int64_t>(r.cost) == exhaustive_matching(w, defects) &&
                      r.flips.size() == r.cost;
            for (std::size_t i = 0; i < m; ++i) ok = ok && boundary[i] == ((mask >> i) & 1U);
            ++ring_total;
            if (ok) ++ring_ok;
        }
    }
    note("match_ring: " + std::to_string(ring_ok) + "/" + std::to_string(ring_total) + " defect sets optimal, m <= 14");

    int tree_total = 0, tree_ok = 0;
    std::uniform_real_distribution<double> prior(0.02, 0.4);
    for (int t = 0; t < 500; ++t) {
        std::vector<std::vector<std::size_t>> rows;
        std::size_t vars = 1;
        const std::size_t checks = 1 + rng() % 7;
        for (std::size_t c = 0; c < checks; ++c) {
            std::vector<std::size_t> row{static_cast<std::size_t>(rng() % vars)};
            const std::size_t fresh = 1 + rng() % 2;
            for (std::size_t f = 0; f < fresh; ++f) row.push_back(vars++);
            rows.push_back(row);
        }
        const gf2::BitMatrix h(vars, rows);
        std::vector<double> priors(vars);
        for (auto& p : priors) p = prior(rng);
        std::vector<std::uint8_t> e(vars);
        for (auto& b : e) b = rng() % 3 == 0;
        const auto s = h.multiply_dense(e);
        BpOptions opt;
        opt.mode = BpMode::sum_product;
        opt.early_stop = false;
        opt.max_iters = 40;
        const auto post = bp_marginals(h, gf2::BitVector::from_dense(s), priors, opt).posteriors();
        const auto exact = enumerate_posteriors(h, s, priors);
        bool ok = true;
        for (std::size_t i = 0; i < vars; ++i) ok = ok && std::abs(post[i] - exact[i]) <= 1e-9;
        ++tree_total;
        if (ok) ++tree_ok;
    }
    note("bp on trees: " + std::to_string(tree_ok) + "/" + std::to_string(tree_total) + " match enumeration");

    int osd_total = 0, osd_ok = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t rows = 8 + rng() % 12, cols = rows + 4 + rng() % 20;
        gf2::BitMatrix h(rows, cols);
        for (std::size_t c = 0; c < cols; ++c) {
            for (int k = 0; k < 3; ++k) {
                const std::size_t r = rng() % rows;
                if (!h.test(r, c)) h.flip(r, c);
            }
        }
        std::vector<std::uint8_t> e(cols);
        for (auto& b : e) b = rng() % 5 == 0;
        const auto s = gf2::BitVector::from_dense(h.multiply_dense(e));
        std::vector<double> priors(cols, 0.1);
        for (auto method : {OsdMethod::combination_sweep, OsdMethod::osd0}) {
            OsdOptions o;
            o.method = method;
            const auto bp = bp_marginals(h, s, priors);
            const auto fix = osd(h, s, bp.posteriors(), o, priors);
            ++osd_total;
            if (h.multiply(fix) == s) ++osd_ok;
        }
    }
    for (int L : {4, 5}) {
        const auto code = build_surface3d_cubic(L, L, L, Boundary::periodic);
        const auto noise = resolve(0.15, 0.5);
        for (std::uint64_t t = 0; t < 100; ++t) {
            const auto err = sample(noise, code.n, 77, t);
            const auto r = bposd_decode(code, syndrome(code, err), noise);
            ++osd_total;
            if (syndrome(code, err * r.correction).is_zero()) ++osd_ok;
        }
    }
    note("osd: " + std::to_string(osd_ok) + "/" + std::to_string(osd_total) + " outputs satisfy He = s");

    out.pass = mwpm_ok == 1000 && ring_ok == ring_total && tree_ok == tree_total && osd_ok == osd_total;
    out.summary = "mwpm " + std::to_string(mwpm_ok) + "/1000, match_ring " + std::to_string(ring_ok) + "/" +
                  std::to_string(ring_total) + ", bp " + std::to_string(tree_ok) + "/" + std::to_string(tree_total) +
                  ", osd " + std::to_string(osd_ok) + "/" + std::to_string(osd_total);
    return out;
}

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qec3d acceptance criteria"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "code validity", 60, code_validity},
        {2, "girth and split-belief table", 60, girth_table},
        {3, "symmetry decoders suppress failures with size", 1800, symmetry_monotone},
        {4, "CSS cubic BP-OSD threshold, eta=inf", 7200, bposd_pure_z},
        {5, "CSS cubic BP-OSD threshold, eta=0.5", 7200, bposd_depolarizing},
        {6, "CSS cubic sweep-match threshold, eta=inf", 7200, sweep_match_pure_z},
        {7, "X-cube BP-OSD receding crossing, eta=10", 10800, xcube_receding},
        {8, "fit engine self-test", 300, fit_self_test},
        {9, "rotated layout pure-Z logicals", 600, rotated_pure_z},
        {10, "decoder oracles", 300, decoder_oracles},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::cout << "criterion " << c.id << ": " << c.title << '\n' << std::flush;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > c.budget_s) {
            o.pass = false;
            o.summary += ", over time budget";
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title << ": " << o.summary << " ("
                  << fmt("%.1f", elapsed) << " s)\n"
                  << std::flush;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
