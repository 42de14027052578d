#include "qec3d/noise.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qec3d {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block)
    : state_(mix64(mix64(mix64(seed) ^ stream) ^ (block * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t CounterRng::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("CounterRng::below: empty range");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return v % n;
}

double NoiseModel::prob(Pauli letter) const {
    switch (letter) {
        case Pauli::X: return p * r_x;
        case Pauli::Y: return p * r_y;
        case Pauli::Z: return p * r_z;
        case Pauli::I: return 1.0 - p;
    }
    return 0.0;
}

NoiseModel resolve(double p, double eta_z) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise: p must lie in [0, 1]");
    if (!(eta_z > 0.0)) throw std::invalid_argument("noise: eta_z must be positive or inf");
    NoiseModel m;
    m.p = p;
    m.eta_z = eta_z;
    if (std::isinf(eta_z)) {
        m.r_z = 1.0;
    } else {
        m.r_z = eta_z / (1.0 + eta_z);
    }
    m.r_x = (1.0 - m.r_z) / 2.0;
    m.r_y = m.r_x;
    return m;
}

double parse_eta(std::string_view text) {
    if (text == "inf" || text == "Inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0) || std::isinf(v)) {
        throw std::invalid_argument("invalid eta value '" + std::string(text) + "'");
    }
    return v;
}

std::string format_eta(double eta_z) {
    if (std::isinf(eta_z)) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << eta_z;
    return os.str();
}

PauliOperator sample(const NoiseModel& m, std::size_t n, std::uint64_t seed, std::uint64_t trial) {
    std::vector<PauliOperator::Term> terms;
    if (m.p <= 0.0) return PauliOperator(n);
    const double cx = m.p * m.r_x;
    const double cy = cx + m.p * m.r_y;
    const double cz = m.p;
    for (std::size_t block = 0; block * kNoiseBlock < n; ++block) {
        CounterRng rng(seed, trial, block);
        const std::size_t end = std::min(n, (block + 1) * kNoiseBlock);
        for (std::size_t q = block * kNoiseBlock; q < end; ++q) {
            const double u = rng.uniform();
            if (u >= cz) continue;
            Pauli letter = u < cx ? Pauli::X : (u < cy ? Pauli::Y : Pauli::Z);
            terms.push_back({static_cast<std::uint32_t>(q), letter});
        }
    }
    return PauliOperator(n, std::move(terms));
}

}  // namespace qec3d
