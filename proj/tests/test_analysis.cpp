#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qec3d/analysis.hpp"

using namespace qec3d;

namespace {

ThresholdFit truth() {
    ThresholdFit f;
    f.p_th = 0.21;
    f.nu = 1.0;
    f.a = 0.3;
    f.b = 1.0;
    f.c = 0.5;
    return f;
}

std::vector<DataCell> ansatz_cells(const ThresholdFit& f, double n_trials) {
    std::vector<DataCell> cells;
    for (int L : {5, 7, 9}) {
        for (int i = 0; i <= 8; ++i) {
            const double p = 0.17 + 0.01 * i;
            cells.push_back({p, L, n_trials, f.curve(p, L) * n_trials});
        }
    }
    return cells;
}

}  // namespace

TEST_CASE("noiseless ansatz data recovers the parameters") {
    const auto gen = truth();
    const auto fit = fit_threshold(ansatz_cells(gen, 1e6));
    CHECK(std::abs(fit.p_th - 0.21) < 1e-4);
    CHECK(std::abs(fit.nu - 1.0) < 1e-3);
    CHECK(std::abs(fit.a - 0.3) < 1e-4);
    CHECK(std::abs(fit.b - 1.0) < 1e-3);
    CHECK(std::abs(fit.c - 0.5) < 1e-2);
    CHECK(fit.curve(fit.p_th, 7) == doctest::Approx(fit.a));
}

TEST_CASE("fit does not depend on cell order") {
    auto cells = ansatz_cells(truth(), 1e6);
    const auto a = fit_threshold(cells);
    std::mt19937_64 rng(1);
    std::shuffle(cells.begin(), cells.end(), rng);
    const auto b = fit_threshold(cells);
    CHECK(a.p_th == b.p_th);
    CHECK(a.nu == b.nu);
}

TEST_CASE("degenerate data is rejected") {
    const auto cells = ansatz_cells(truth(), 1e6);
    std::vector<DataCell> one_p, two_l;
    for (const auto& c : cells) {
        if (std::abs(c.p - 0.2) < 1e-9) one_p.push_back(c);
        if (c.L != 9) two_l.push_back(c);
    }
    CHECK_THROWS_AS(fit_threshold(one_p), std::invalid_argument);
    CHECK_THROWS_AS(fit_threshold(two_l), std::invalid_argument);
    CHECK_THROWS_AS(fit_threshold(cells, {0.5, 0.6}), std::invalid_argument);
    auto zeros = cells;
    for (auto& c : zeros) c.n_fail = 0;
    CHECK_THROWS_AS(fit_threshold(zeros), std::invalid_argument);
    CHECK_THROWS_AS(fit_threshold({{0.1, 5, 10, 20}, {0.2, 7, 10, 1}, {0.3, 9, 10, 1}}), std::invalid_argument);
}

TEST_CASE("Beta posterior sampling") {
    CounterRng rng(5, 0, 0);
    double sum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += sample_beta(101, 1, rng);
    CHECK(sum / n == doctest::Approx(101.0 / 102).epsilon(1e-3));
    CHECK_THROWS_AS(sample_beta(0, 1, rng), std::invalid_argument);
}

TEST_CASE("bootstrap intervals shrink with more trials") {
    const auto gen = truth();
    const auto small = bootstrap_fit(ansatz_cells(gen, 1e3), {}, 100, 7);
    const auto large = bootstrap_fit(ansatz_cells(gen, 1e5), {}, 100, 7);
    CHECK(small.n_bootstrap == 100);
    CHECK(small.low <= small.high);
    CHECK(large.high - large.low < small.high - small.low);
    CHECK(large.low <= 0.21 + 1e-3);
    CHECK(large.high >= 0.21 - 1e-3);
}

TEST_CASE("bootstrap is reproducible") {
    const auto cells = ansatz_cells(truth(), 1e3);
    const auto a = bootstrap_fit(cells, {}, 30, 3);
    const auto b = bootstrap_fit(cells, {}, 30, 3);
    CHECK(a.low == b.low);
    CHECK(a.high == b.high);
}

TEST_CASE("minimum sector is the one with the lowest lower bound") {
    ThresholdFit t, x, z;
    t.low = 0.2;
    x.low = 0.18;
    x.sector = FitSector::x;
    z.low = 0.19;
    z.sector = FitSector::z;
    CHECK(select_min_sector({t, x, z}).sector == FitSector::x);
    CHECK_THROWS_AS(select_min_sector({}), std::invalid_argument);
}

TEST_CASE("crossing of two sizes") {
    auto gen = truth();
    gen.b = 0.5;
    gen.c = 0.0;
    std::vector<DataCell> small, large;
    for (const auto& c : ansatz_cells(gen, 1e6)) {
        if (c.L == 5) small.push_back(c);
        if (c.L == 9) large.push_back(c);
    }
    const auto p = crossing_point(small, large);
    REQUIRE(p);
    CHECK(std::abs(*p - 0.21) < 1e-9);
    const auto est = estimate_crossing(small, large, 200, 1);
    CHECK(est.sigma < 1e-3);
    CHECK(est.n_bootstrap == 200);
    CHECK_FALSE(crossing_point(large, small));
}

TEST_CASE("crossing with a curved difference") {
    // With C != 0 the difference is quadratic in p but still vanishes at p_th.
    const auto gen = truth();
    std::vector<DataCell> small, large;
    for (const auto& c : ansatz_cells(gen, 1e6)) {
        if (c.L == 5) small.push_back(c);
        if (c.L == 9) large.push_back(c);
    }
    const auto p = crossing_point(small, large);
    REQUIRE(p);
    CHECK(std::abs(*p - 0.21) < 1e-9);
    std::vector<DataCell> below(small.begin(), small.begin() + 3), below_l(large.begin(), large.begin() + 3);
    CHECK_FALSE(crossing_point(below, below_l));
}

TEST_CASE("data collapse points") {
    const auto gen = truth();
    const auto pts = collapse(ansatz_cells(gen, 1e6), gen);
    for (const auto& pt : pts) CHECK(pt.p_l == doctest::Approx(gen.a + gen.b * pt.x + gen.c * pt.x * pt.x));
}

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    const double root = binary_entropy_threshold();
    CHECK(std::round(root * 100) / 100 == doctest::Approx(0.11));
    CHECK(binary_entropy(root) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(root == doctest::Approx(0.1100278644).epsilon(1e-8));
}

TEST_CASE("girth of known Tanner graphs") {
    CHECK(girth(build_surface3d_cubic(4, 4, 4, Boundary::periodic), CheckSector::z) == 8);
    CHECK(girth(build_xcube(4, 4, 4), CheckSector::z) == 4);
    CHECK(girth(build_color3d(2, 2, 2), CheckSector::x) == 4);
    // Face checks of the toric code form a square lattice: shortest cycle has
    // four checks and four qubits.
    CHECK(girth(build_surface2d(Surface2dKind::css, 5, 5, Boundary::periodic), CheckSector::z) == 8);
    // Three faces around a cube corner pairwise share an edge.
    CHECK(girth(build_surface3d_cubic(4, 4, 4, Boundary::periodic), CheckSector::x) == 6);
}

TEST_CASE("split-belief numbers") {
    const auto cubic = build_surface3d_cubic(4, 4, 4, Boundary::periodic);
    CHECK(split_belief_number(cubic, CheckSector::z, 2) == 3);
    CHECK(split_belief_number(cubic, CheckSector::x, 2) == 2);
    const auto cb = build_surface3d_checkerboard(4, 4, 4);
    CHECK(split_belief_number(cb, CheckSector::x, 1) == 0);
    CHECK(split_belief_number(cb, CheckSector::x, 2) == 2);
    CHECK(split_belief_number(build_color3d(2, 2, 2), CheckSector::z, 2) == 12);
    CHECK_THROWS_AS(split_belief_number(cubic, CheckSector::z, 0), std::invalid_argument);
}

TEST_CASE("pure Z logicals on the rotated code") {
    const auto code = build_rotated_surface3d(2, 3, 2, Boundary::periodic_with_seam);
    std::vector<std::size_t> horizontal;
    for (std::size_t q = 0; q < code.n; ++q) {
        if (!code.coords[q].vertical) horizontal.push_back(q);
    }
    const auto all_h = PauliOperator::uniform(code.n, horizontal, Pauli::Z);
    CHECK(is_logical(code, all_h));
    CHECK_FALSE(min_pure_z_logical(code, horizontal.size() - 1));
    const auto best = min_pure_z_logical(code, code.n);
    REQUIRE(best);
    CHECK(best->weight() == horizontal.size());
    CHECK(is_logical(code, *best));
}

TEST_CASE("pure Z logical on a coprime XZZX torus covers the diagonal") {
    const auto code = build_xzzx_rotated2d(3, 4);
    const auto best = min_pure_z_logical(code, code.n);
    REQUIRE(best);
    CHECK(best->weight() == code.n);
}

TEST_CASE("pure Z logical weight is invariant under qubit relabeling") {
    const auto code = build_surface2d(Surface2dKind::css, 3, 3, Boundary::periodic);
    const auto best = min_pure_z_logical(code, code.n);
    REQUIRE(best);
    CHECK(best->weight() == 3);

    std::vector<std::size_t> perm(code.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(8);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabel = [&](const PauliOperator& op) {
        std::vector<PauliOperator::Term> terms;
        for (const auto& t : op.terms()) terms.push_back({static_cast<std::uint32_t>(perm[t.qubit]), t.letter});
        std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.qubit < b.qubit; });
        return PauliOperator(op.n(), terms);
    };
    auto shuffled = code;
    for (auto& s : shuffled.stabilizers) s = relabel(s);
    for (auto& l : shuffled.logicals) {
        l.x = relabel(l.x);
        l.z = relabel(l.z);
    }
    const auto other = min_pure_z_logical(shuffled, code.n);
    REQUIRE(other);
    CHECK(other->weight() == best->weight());
}
