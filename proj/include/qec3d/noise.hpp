#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "qec3d/pauli.hpp"

namespace qec3d {

// SplitMix64 stream keyed by (seed, stream, block). Streams with different keys
// are statistically independent, which makes trial sampling order-free.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block = 0);

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next(); }

    std::uint64_t next();
    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

struct NoiseModel {
    double p = 0.0;
    double eta_z = 0.5;
    double r_x = 1.0 / 3;
    double r_y = 1.0 / 3;
    double r_z = 1.0 / 3;

    bool infinite_bias() const { return eta_z == std::numeric_limits<double>::infinity(); }
    // Per-letter probabilities p*r.
    double prob(Pauli letter) const;
};

NoiseModel resolve(double p, double eta_z);

// Parses a bias value; accepts a positive decimal or "inf".
double parse_eta(std::string_view text);
std::string format_eta(double eta_z);

// Samples an i.i.d. error for one trial. Qubits are grouped in blocks of
// kNoiseBlock, each drawn from its own (seed, trial, block) stream.
inline constexpr std::size_t kNoiseBlock = 1024;
PauliOperator sample(const NoiseModel& m, std::size_t n, std::uint64_t seed, std::uint64_t trial);

}  // namespace qec3d
