#include "qec3d/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qec3d {

TrialStats& TrialStats::operator+=(const TrialStats& other) {
    if (n_fail_x.empty() && n_trials == 0) {
        n_fail_x.assign(other.n_fail_x.size(), 0);
        n_fail_z.assign(other.n_fail_z.size(), 0);
    }
    if (other.n_fail_x.size() != n_fail_x.size() || other.n_fail_z.size() != n_fail_z.size()) {
        throw std::invalid_argument("TrialStats: merging stats of different codes");
    }
    n_trials += other.n_trials;
    n_fail_total += other.n_fail_total;
    n_nonconverged += other.n_nonconverged;
    for (std::size_t i = 0; i < n_fail_x.size(); ++i) n_fail_x[i] += other.n_fail_x[i];
    for (std::size_t i = 0; i < n_fail_z.size(); ++i) n_fail_z[i] += other.n_fail_z[i];
    wall_time_s += other.wall_time_s;
    return *this;
}

double TrialStats::failure_rate() const {
    return n_trials ? static_cast<double>(n_fail_total) / static_cast<double>(n_trials) : 0.0;
}

namespace {

double mean(const std::vector<std::size_t>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (auto x : v) s += static_cast<double>(x);
    return s / static_cast<double>(v.size());
}

}  // namespace

double TrialStats::mean_fail_x() const { return mean(n_fail_x); }
double TrialStats::mean_fail_z() const { return mean(n_fail_z); }

bool Classification::any() const {
    auto set = [](std::uint8_t b) { return b != 0; };
    return std::any_of(x_flip.begin(), x_flip.end(), set) || std::any_of(z_flip.begin(), z_flip.end(), set);
}

Classification classify(const StabilizerCode& code, const PauliOperator& residual) {
    if (residual.n() != code.n) throw std::invalid_argument("classify: residual size mismatch");
    const auto letters = residual.to_dense();
    for (const auto& s : code.stabilizers) {
        if (!commutes_dense(s, letters)) throw std::runtime_error("classify: residual has a nonzero syndrome");
    }
    Classification c;
    for (const auto& l : code.logicals) {
        c.x_flip.push_back(commutes_dense(l.z, letters) ? 0 : 1);
        c.z_flip.push_back(commutes_dense(l.x, letters) ? 0 : 1);
    }
    return c;
}

namespace {

TrialStats run_range(const StabilizerCode& code, const NoiseModel& noise, Decoder& decoder, std::uint64_t seed,
                     std::size_t begin, std::size_t end) {
    TrialStats st;
    st.n_fail_x.assign(code.logicals.size(), 0);
    st.n_fail_z.assign(code.logicals.size(), 0);
    for (std::size_t t = begin; t < end; ++t) {
        const auto e = sample(noise, code.n, seed, t);
        CounterRng rng(seed, t, kDecoderBlock);
        const auto res = decoder.decode(syndrome(code, e), rng);
        const auto residual = e * res.correction;
        ++st.n_trials;
        if (!res.converged || !syndrome(code, residual).is_zero()) {
            ++st.n_nonconverged;
            ++st.n_fail_total;
            continue;
        }
        const auto c = classify(code, residual);
        for (std::size_t i = 0; i < c.x_flip.size(); ++i) {
            st.n_fail_x[i] += c.x_flip[i];
            st.n_fail_z[i] += c.z_flip[i];
        }
        if (c.any()) ++st.n_fail_total;
    }
    return st;
}

}  // namespace

TrialStats run_trials(const StabilizerCode& code, const NoiseModel& noise, const DecoderConfig& decoder,
                      const RunOptions& options) {
    if (options.chunk == 0) throw std::invalid_argument("run_trials: chunk must be positive");
    const auto start = std::chrono::steady_clock::now();
    auto prototype = make_decoder(code, noise, decoder);
    const unsigned workers = std::max(1U, options.workers);
    std::vector<std::unique_ptr<Decoder>> decoders;
    for (unsigned w = 0; w < workers; ++w) decoders.push_back(prototype->clone());

    TrialStats total;
    total.n_fail_x.assign(code.logicals.size(), 0);
    total.n_fail_z.assign(code.logicals.size(), 0);
    const std::size_t n_chunks = (options.n_trials + options.chunk - 1) / options.chunk;
    std::size_t next = 0;
    bool stop = false;
    while (next < n_chunks && !stop) {
        const std::size_t round = std::min<std::size_t>(workers, n_chunks - next);
        std::vector<TrialStats> parts(round);
        auto job = [&](std::size_t w) {
            const std::size_t c = next + w;
            const std::size_t b = c * options.chunk;
            const std::size_t e = std::min(options.n_trials, b + options.chunk);
            parts[w] = run_range(code, noise, *decoders[w], options.base_seed, b, e);
        };
        if (round == 1) {
            job(0);
        } else {
            std::vector<std::thread> threads;
            for (std::size_t w = 0; w < round; ++w) threads.emplace_back(job, w);
            for (auto& t : threads) t.join();
        }
        for (const auto& part : parts) {
            total += part;
            if (options.stop_after_failures && total.n_fail_total >= *options.stop_after_failures) {
                stop = true;
                break;
            }
        }
        next += round;
    }
    total.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return total;
}

std::string hash_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string to_ndjson(const CellRecord& r) {
    nlohmann::ordered_json j;
    j["config_hash"] = r.config_hash;
    j["seed"] = r.seed;
    j["code"] = r.code;
    j["dims"] = r.dims;
    j["boundary"] = r.boundary;
    j["deformation"] = r.deformation;
    j["p"] = r.p;
    j["eta"] = format_eta(r.eta);
    j["decoder"] = r.decoder;
    if (r.stop_after_failures) {
        j["stop_after_failures"] = *r.stop_after_failures;
    } else {
        j["stop_after_failures"] = nullptr;
    }
    j["n_trials"] = r.stats.n_trials;
    j["n_fail_total"] = r.stats.n_fail_total;
    j["n_fail_x"] = r.stats.n_fail_x;
    j["n_fail_z"] = r.stats.n_fail_z;
    j["n_nonconverged"] = r.stats.n_nonconverged;
    j["wall_time_s"] = r.stats.wall_time_s;
    j["version"] = kVersion;
    return j.dump();
}

CellRecord record_from_ndjson(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        CellRecord r;
        r.config_hash = j.at("config_hash").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.code = j.at("code").get<std::string>();
        r.dims = j.at("dims").get<std::array<int, 3>>();
        r.boundary = j.value("boundary", std::string("periodic"));
        r.deformation = j.value("deformation", std::string("none"));
        r.p = j.at("p").get<double>();
        const auto& eta = j.at("eta");
        r.eta = eta.is_string() ? parse_eta(eta.get<std::string>()) : eta.get<double>();
        r.decoder = j.at("decoder").get<std::string>();
        if (j.contains("stop_after_failures") && !j["stop_after_failures"].is_null()) {
            r.stop_after_failures = j["stop_after_failures"].get<std::size_t>();
        }
        r.stats.n_trials = j.at("n_trials").get<std::size_t>();
        r.stats.n_fail_total = j.at("n_fail_total").get<std::size_t>();
        r.stats.n_fail_x = j.at("n_fail_x").get<std::vector<std::size_t>>();
        r.stats.n_fail_z = j.at("n_fail_z").get<std::vector<std::size_t>>();
        r.stats.n_nonconverged = j.value("n_nonconverged", std::size_t{0});
        r.stats.wall_time_s = j.value("wall_time_s", 0.0);
        if (r.stats.n_fail_total > r.stats.n_trials) throw std::invalid_argument("record: more failures than trials");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("record: ") + e.what());
    }
}

}  // namespace qec3d
