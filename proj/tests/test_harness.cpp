#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "qec3d/harness.hpp"

using namespace qec3d;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same(const TrialStats& a, const TrialStats& b) {
    CHECK(a.n_trials == b.n_trials);
    CHECK(a.n_fail_total == b.n_fail_total);
    CHECK(a.n_fail_x == b.n_fail_x);
    CHECK(a.n_fail_z == b.n_fail_z);
    CHECK(a.n_nonconverged == b.n_nonconverged);
}

double sigma(const TrialStats& s) {
    const double r = s.failure_rate();
    return std::sqrt(std::max(r * (1 - r), 1e-4) / static_cast<double>(s.n_trials));
}

}  // namespace

TEST_CASE("classify examples") {
    const auto c = build_surface3d_cubic(3, 3, 3, Boundary::periodic);
    const auto id = classify(c, PauliOperator(c.n));
    CHECK_FALSE(id.any());
    CHECK(id.x_flip.size() == 3);
    CHECK_FALSE(classify(c, c.stabilizers[5]).any());
    CHECK_FALSE(classify(c, c.stabilizers[40] * c.stabilizers[3]).any());

    // L_X,0 commutes with every logical except its partner L_Z,0.
    const auto lx = classify(c, c.logicals[0].x);
    CHECK(lx.x_flip == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(lx.z_flip == std::vector<std::uint8_t>{0, 0, 0});
    const auto lz = classify(c, c.logicals[1].z);
    CHECK(lz.z_flip == std::vector<std::uint8_t>{0, 1, 0});
    CHECK(lz.x_flip == std::vector<std::uint8_t>{0, 0, 0});

    CHECK_THROWS_AS(classify(c, PauliOperator::single(c.n, 0, Pauli::Z)), std::runtime_error);
}

TEST_CASE("classify is invariant under stabilizer multiplication") {
    const auto c = build_xcube(3, 3, 3);
    for (std::size_t i = 0; i < c.logicals.size(); ++i) {
        const auto base = c.logicals[i].x * c.logicals[(i + 3) % c.logicals.size()].z;
        const auto ref = classify(c, base);
        for (std::size_t g = 0; g < c.stabilizers.size(); g += 11) {
            const auto other = classify(c, base * c.stabilizers[g]);
            CHECK(other.x_flip == ref.x_flip);
            CHECK(other.z_flip == ref.z_flip);
        }
    }
}

TEST_CASE("no noise, no failures") {
    const auto c = build_surface3d_cubic(4, 4, 4, Boundary::periodic);
    DecoderConfig cfg;
    RunOptions opt;
    opt.n_trials = 100;
    const auto s = run_trials(c, resolve(0.0, 0.5), cfg, opt);
    CHECK(s.n_trials == 100);
    CHECK(s.n_fail_total == 0);
    CHECK(s.n_nonconverged == 0);
}

TEST_CASE("run_trials is deterministic and independent of the worker count") {
    const auto c = deform(build_surface3d_cubic(5, 5, 5, Boundary::periodic), standard_recipe("surface3d-cubic"));
    DecoderConfig cfg;
    cfg.name = "symmetry";
    RunOptions opt;
    opt.n_trials = 300;
    opt.base_seed = 99;
    const auto noise = resolve(1.0, kInf);
    const auto a = run_trials(c, noise, cfg, opt);
    const auto b = run_trials(c, noise, cfg, opt);
    check_same(a, b);
    opt.workers = 3;
    check_same(a, run_trials(c, noise, cfg, opt));
    opt.chunk = 7;
    check_same(a, run_trials(c, noise, cfg, opt));

    DecoderConfig bp;
    RunOptions small;
    small.n_trials = 150;
    small.base_seed = 4;
    const auto cubic = build_surface3d_cubic(4, 4, 4, Boundary::periodic);
    const auto x = run_trials(cubic, resolve(0.08, 0.5), bp, small);
    small.workers = 4;
    check_same(x, run_trials(cubic, resolve(0.08, 0.5), bp, small));
}

TEST_CASE("stats invariants and merge") {
    const auto c = build_surface3d_cubic(4, 4, 4, Boundary::periodic);
    DecoderConfig cfg;
    RunOptions opt;
    opt.n_trials = 200;
    const auto s = run_trials(c, resolve(0.12, 0.5), cfg, opt);
    CHECK(s.n_fail_total <= s.n_trials);
    for (auto v : s.n_fail_x) CHECK(v <= s.n_trials);
    for (auto v : s.n_fail_z) CHECK(v <= s.n_trials);

    opt.n_trials = 128;
    const auto head = run_trials(c, resolve(0.12, 0.5), cfg, opt);
    TrialStats merged;
    merged += head;
    CHECK(merged.n_trials == 128);
    CHECK(merged.n_fail_total == head.n_fail_total);
}

TEST_CASE("early stop halts at a chunk boundary") {
    const auto c = build_surface3d_cubic(4, 4, 4, Boundary::periodic);
    DecoderConfig cfg;
    RunOptions opt;
    opt.n_trials = 2000;
    opt.stop_after_failures = 20;
    const auto s = run_trials(c, resolve(0.3, 0.5), cfg, opt);
    CHECK(s.n_fail_total >= 20);
    CHECK(s.n_trials < 2000);
    CHECK(s.n_trials % opt.chunk == 0);
}

TEST_CASE("incompatible decoder is rejected up front") {
    DecoderConfig cfg;
    cfg.name = "symmetry";
    RunOptions opt;
    CHECK_THROWS_AS(run_trials(build_xcube(3, 3, 3), resolve(0.1, kInf), cfg, opt), std::invalid_argument);
    cfg.name = "unknown";
    CHECK_THROWS_AS(run_trials(build_xcube(3, 3, 3), resolve(0.1, kInf), cfg, opt), std::invalid_argument);
}

TEST_CASE("CSS cubic BP-OSD straddles the threshold") {
    const auto c = build_surface3d_cubic(7, 7, 7, Boundary::periodic);
    DecoderConfig cfg;
    RunOptions opt;
    opt.n_trials = 300;
    opt.base_seed = 5;
    const auto lo = run_trials(c, resolve(0.15, kInf), cfg, opt);
    const auto hi = run_trials(c, resolve(0.28, kInf), cfg, opt);
    CHECK(lo.failure_rate() + 3 * std::hypot(sigma(lo), sigma(hi)) < hi.failure_rate());
}

TEST_CASE("failure rate grows with p") {
    DecoderConfig bp;
    DecoderConfig sym;
    sym.name = "symmetry";
    struct Case {
        StabilizerCode code;
        DecoderConfig cfg;
        double eta;
    };
    std::vector<Case> cases{
        {build_surface3d_cubic(4, 4, 4, Boundary::periodic), bp, 0.5},
        {deform(build_surface3d_cubic(5, 5, 5, Boundary::periodic), standard_recipe("surface3d-cubic")), sym, kInf},
    };
    for (const auto& c : cases) {
        RunOptions opt;
        opt.n_trials = 300;
        for (double p : {0.05, 0.1, 0.2}) {
            const auto a = run_trials(c.code, resolve(p, c.eta), c.cfg, opt);
            const auto b = run_trials(c.code, resolve(2 * p, c.eta), c.cfg, opt);
            CHECK(a.failure_rate() <= b.failure_rate() + 3 * std::hypot(sigma(a), sigma(b)));
        }
    }
}

TEST_CASE("NDJSON records round trip") {
    CellRecord r;
    r.config_hash = hash_hex("abc");
    r.seed = 3;
    r.code = "surface3d-cubic";
    r.dims = {5, 5, 5};
    r.p = 0.21;
    r.eta = kInf;
    r.decoder = "bposd";
    r.stats.n_trials = 10;
    r.stats.n_fail_total = 4;
    r.stats.n_fail_x = {1, 0, 2};
    r.stats.n_fail_z = {0, 3, 0};
    r.stats.n_nonconverged = 1;
    const auto line = to_ndjson(r);
    CHECK(line.find("\"eta\":\"inf\"") != std::string::npos);
    CHECK(line.find("\"version\"") != std::string::npos);
    const auto back = record_from_ndjson(line);
    CHECK(back.config_hash == r.config_hash);
    CHECK(std::isinf(back.eta));
    CHECK(back.dims == r.dims);
    CHECK(back.stats.n_fail_x == r.stats.n_fail_x);
    CHECK(back.stats.n_nonconverged == 1);
    CHECK(to_ndjson(back) == line);
    CHECK(hash_hex("abc") == hash_hex("abc"));
    CHECK(hash_hex("abc") != hash_hex("abd"));
    CHECK_THROWS_AS(record_from_ndjson("{\"p\":1}"), std::invalid_argument);
    CHECK_THROWS_AS(record_from_ndjson("not json"), std::invalid_argument);
}
