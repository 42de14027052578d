#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "qec3d/codes.hpp"

using namespace qec3d;

namespace {

void check_commuting(const StabilizerCode& code) {
    for (std::size_t i = 0; i < code.stabilizers.size(); ++i) {
        const auto letters = code.stabilizers[i].to_dense();
        for (std::size_t j = i + 1; j < code.stabilizers.size(); ++j) {
            REQUIRE(commutes_dense(code.stabilizers[j], letters));
        }
    }
}

void check_logicals(const StabilizerCode& code) {
    REQUIRE(code.logicals.size() == code.k());
    for (const auto& l : code.logicals) {
        for (const auto& s : code.stabilizers) {
            CHECK(commutes(s, l.x));
            CHECK(commutes(s, l.z));
        }
    }
    for (std::size_t i = 0; i < code.logicals.size(); ++i) {
        for (std::size_t j = 0; j < code.logicals.size(); ++j) {
            CHECK(commutes(code.logicals[i].x, code.logicals[j].z) == (i != j));
            CHECK(commutes(code.logicals[i].x, code.logicals[j].x));
            CHECK(commutes(code.logicals[i].z, code.logicals[j].z));
        }
    }
}

void check_valid(const StabilizerCode& code) {
    CHECK_NOTHROW(code.validate());
    check_commuting(code);
    check_logicals(code);
}

std::map<std::size_t, std::size_t> weights(const StabilizerCode& code, std::string_view sector) {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t g = 0; g < code.stabilizers.size(); ++g) {
        if (code.sectors[g].rfind(sector, 0) == 0) ++out[code.stabilizers[g].weight()];
    }
    return out;
}

}  // namespace

TEST_CASE("2D surface codes") {
    const auto css = build_surface2d(Surface2dKind::css, 3, 3, Boundary::periodic);
    CHECK(css.n == 18);
    CHECK(css.k() == 2);
    check_valid(css);

    const auto xzzx = build_surface2d(Surface2dKind::xzzx, 3, 3, Boundary::periodic);
    check_valid(xzzx);
    for (const auto& s : xzzx.stabilizers) {
        std::multiset<Pauli> letters;
        for (const auto& t : s.terms()) letters.insert(t.letter);
        CHECK(letters == std::multiset<Pauli>{Pauli::X, Pauli::X, Pauli::Z, Pauli::Z});
    }

    const auto xy = build_surface2d(Surface2dKind::xy, 4, 4, Boundary::periodic);
    check_valid(xy);
    for (const auto& s : xy.stabilizers) {
        const Pauli first = s.terms().front().letter;
        CHECK((first == Pauli::X || first == Pauli::Y));
        for (const auto& t : s.terms()) CHECK(t.letter == first);
    }

    check_valid(build_surface2d(Surface2dKind::css, 3, 4, Boundary::open));
    check_valid(build_surface2d(Surface2dKind::xy, 3, 4, Boundary::open));
    CHECK_THROWS_AS(build_surface2d(Surface2dKind::css, 1, 3, Boundary::periodic), std::invalid_argument);
}

TEST_CASE("cubic surface code") {
    const auto c = build_surface3d_cubic(3, 3, 3, Boundary::periodic);
    CHECK(c.n == 81);
    CHECK(c.k() == 3);
    check_valid(c);
    CHECK(weights(c, "vertex") == std::map<std::size_t, std::size_t>{{6, 27}});
    CHECK(weights(c, "face") == std::map<std::size_t, std::size_t>{{4, 81}});
    for (const auto& l : c.logicals) CHECK(l.x.weight() >= 3);

    const auto open = build_surface3d_cubic(2, 2, 2, Boundary::open_rough_pair);
    CHECK(open.k() == 1);
    check_valid(open);
    CHECK(build_surface3d_cubic(3, 3, 3, Boundary::open_rough_pair).k() == 1);
}

TEST_CASE("checkerboard code") {
    const auto c = build_surface3d_checkerboard(4, 4, 4);
    CHECK(c.k() == 3);
    check_valid(c);
    CHECK(weights(c, "cube") == std::map<std::size_t, std::size_t>{{12, 32}});
    CHECK(weights(c, "triangle") == std::map<std::size_t, std::size_t>{{3, 256}});
    CHECK(build_surface3d_checkerboard(2, 2, 2).k() == 3);
    CHECK_THROWS_AS(build_surface3d_checkerboard(3, 4, 4), std::invalid_argument);
}

TEST_CASE("color code") {
    for (auto dims : {std::array<int, 3>{2, 2, 2}, std::array<int, 3>{4, 2, 2}}) {
        const auto c = build_color3d(dims[0], dims[1], dims[2]);
        CHECK(c.k() == 9);
        check_valid(c);
        for (std::size_t g = 0; g < c.stabilizers.size(); ++g) {
            if (c.sectors[g] == "cell") CHECK(c.stabilizers[g].weight() == 24);
        }
    }
    CHECK_THROWS_AS(build_color3d(3, 2, 2), std::invalid_argument);
}

TEST_CASE("X-cube model") {
    const auto c = build_xcube(3, 3, 3);
    CHECK(c.k() == 15);
    check_valid(c);
    const auto d = build_xcube(4, 3, 5);
    CHECK(d.k() == 21);
    check_valid(d);
    CHECK(weights(c, "cube") == std::map<std::size_t, std::size_t>{{12, 27}});
    CHECK(weights(c, "vertex") == std::map<std::size_t, std::size_t>{{4, 81}});

    // Relations between the string logicals.
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            if (i == k) continue;
            PauliOperator lhs(d.n), rhs(d.n);
            for (int ell = 0; ell < d.dims[k]; ++ell) lhs *= xcube_logical_x(d, i, k, ell);
            for (int ell = 0; ell < d.dims[i]; ++ell) rhs *= xcube_logical_x(d, k, i, ell);
            CHECK(lhs == rhs);
        }
    }
    for (int dir = 0; dir < 3; ++dir) {
        for (int plane = 0; plane < 3; ++plane) {
            if (dir == plane) continue;
            const auto x = xcube_logical_x(d, dir, plane, 1);
            const auto z = xcube_logical_z(d, dir, plane, 1);
            for (const auto& s : d.stabilizers) {
                CHECK(commutes(s, x));
                CHECK(commutes(s, z));
            }
        }
    }
}

TEST_CASE("X-cube vertex terms at a vertex multiply to identity") {
    const auto c = build_xcube(3, 3, 3);
    std::size_t nv = 0;
    for (std::size_t g = 0; g < c.stabilizers.size(); ++g) {
        if (c.sectors[g].rfind("vertex", 0) == 0) ++nv;
    }
    CHECK(nv == 81);
    // Vertex terms are emitted three per vertex, consecutively.
    std::vector<std::size_t> vertex_gens;
    for (std::size_t g = 0; g < c.stabilizers.size(); ++g) {
        if (c.sectors[g].rfind("vertex", 0) == 0) vertex_gens.push_back(g);
    }
    for (std::size_t i = 0; i + 2 < vertex_gens.size(); i += 3) {
        const auto prod = c.stabilizers[vertex_gens[i]] * c.stabilizers[vertex_gens[i + 1]] *
                          c.stabilizers[vertex_gens[i + 2]];
        CHECK(prod.is_identity());
    }
}

TEST_CASE("Sierpinski code") {
    const auto s = build_sierpinski(2, 2, 2);
    CHECK(s.n == 16);
    check_valid(s);
    CHECK(s.k() == 0);
    const auto t = build_sierpinski(3, 6, 4);
    CHECK(t.n == 2 * 3 * 6 * 4);
    check_valid(t);
    CHECK(t.k() == 4);
}

TEST_CASE("Haah code") {
    const auto a = build_haah(6, 6, 4);
    CHECK(a.k() == 6);
    check_valid(a);
    CHECK(weights(a, "") == std::map<std::size_t, std::size_t>{{8, 288}});
    CHECK(build_haah(6, 6, 2).k() == 6);
    CHECK(build_haah(2, 2, 2).k() == 6);
    for (auto d : {std::array<int, 3>{6, 6, 4}, std::array<int, 3>{6, 6, 2}}) {
        CHECK(std::lcm(std::lcm(d[0], d[1]), d[2]) / d[2] >= d[0] / 2);
    }
}

TEST_CASE("rotated 3D surface code") {
    const auto small = build_rotated_surface3d(2, 3, 2, Boundary::periodic_with_seam);
    check_commuting(small);
    CHECK(small.k() == 1);
    check_valid(small);
    for (auto d : {std::array<int, 3>{5, 6, 3}, std::array<int, 3>{6, 7, 2}}) {
        const auto c = build_rotated_surface3d(d[0], d[1], d[2], Boundary::periodic_with_seam);
        CHECK(c.k() == 1);
        check_valid(c);
    }
    check_valid(build_rotated_surface3d(3, 3, 3, Boundary::open_smooth_top_bottom));

    // Qubit count relative to the unrotated open code of the same distance.
    double last = 0;
    for (int L : {5, 9, 17}) {
        const auto rot = build_rotated_surface3d(L, L, L, Boundary::open_smooth_top_bottom);
        const auto std_code = build_surface3d_cubic(L, L, L, Boundary::open_rough_pair);
        const double ratio = static_cast<double>(rot.n) / static_cast<double>(std_code.n);
        CHECK(std::abs(ratio - 0.5) < 2.0 / L);
        last = ratio;
    }
    CHECK(last == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("deformation preserves k and commutation") {
    struct Case {
        StabilizerCode code;
        std::string family;
    };
    std::vector<Case> cases{
        {build_surface3d_cubic(3, 3, 3, Boundary::periodic), "surface3d-cubic"},
        {build_surface3d_checkerboard(4, 4, 4), "surface3d-checkerboard"},
        {build_color3d(2, 2, 2), "color3d"},
        {build_xcube(3, 3, 3), "xcube"},
        {build_sierpinski(3, 6, 4), "sierpinski"},
        {build_haah(6, 6, 2), "haah"},
        {build_surface2d(Surface2dKind::css, 4, 4, Boundary::periodic), "surface2d-css"},
    };
    for (const auto& c : cases) {
        const auto d = deform(c.code, standard_recipe(c.family));
        CHECK(d.k() == c.code.k());
        check_valid(d);
        CHECK(deform(c.code, identity_recipe()).stabilizers == c.code.stabilizers);
    }
}

TEST_CASE("deformed cubic face letters") {
    const auto d = deform(build_surface3d_cubic(3, 3, 3, Boundary::periodic), standard_recipe("surface3d-cubic"));
    CHECK_FALSE(d.css_split().has_value());
    CHECK(d.parent_split().has_value());
    for (std::size_t g = 0; g < d.stabilizers.size(); ++g) {
        for (const auto& t : d.stabilizers[g].terms()) {
            const bool z_edge = d.coords[t.qubit].axis == 2;
            if (d.sectors[g] == "face") CHECK(t.letter == (z_edge ? Pauli::Z : Pauli::X));
            if (d.sectors[g] == "vertex") CHECK(t.letter == (z_edge ? Pauli::X : Pauli::Z));
        }
    }
}

TEST_CASE("compute_logicals returns canonical pairs") {
    const auto c = build_surface3d_cubic(3, 3, 3, Boundary::periodic);
    auto copy = c;
    copy.logicals = compute_logicals(c);
    CHECK(copy.logicals.size() == 3);
    check_logicals(copy);
    auto h = build_haah(6, 6, 4);
    h.logicals = compute_logicals(h);
    CHECK(h.logicals.size() == 6);
    check_logicals(h);
}

TEST_CASE("build_code dispatch and JSON round trip") {
    CHECK(build_code("surface3d-cubic", {3, 3, 3}, Boundary::periodic).k() == 3);
    CHECK(build_code("xcube", {3, 3, 3}, Boundary::periodic).k() == 15);
    CHECK(build_code("haah", {6, 6, 4}, Boundary::periodic).k() == 6);
    CHECK_THROWS_AS(build_code("nope", {3, 3, 3}, Boundary::periodic), std::invalid_argument);
    CHECK_THROWS_AS(build_code("xcube", {3, 3}, Boundary::periodic), std::invalid_argument);

    const auto c = deform(build_surface3d_cubic(2, 2, 2, Boundary::periodic), standard_recipe("surface3d-cubic"));
    const auto back = code_from_json(code_to_json(c));
    CHECK(back.n == c.n);
    CHECK(back.stabilizers == c.stabilizers);
    CHECK(back.sectors == c.sectors);
    CHECK(back.coords == c.coords);
    CHECK(back.frame == c.frame);
    REQUIRE(back.logicals.size() == c.logicals.size());
    for (std::size_t i = 0; i < c.logicals.size(); ++i) {
        CHECK(back.logicals[i].x == c.logicals[i].x);
        CHECK(back.logicals[i].z == c.logicals[i].z);
    }
}
