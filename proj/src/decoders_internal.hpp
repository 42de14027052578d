#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include "qec3d/decoders.hpp"

namespace qec3d::detail {

std::unique_ptr<Decoder> make_symmetry_decoder(const StabilizerCode& code);
std::unique_ptr<Decoder> make_sweep_match_decoder(const StabilizerCode& code, const NoiseModel& noise,
                                                  double tmax_factor);
std::unique_ptr<Decoder> make_mwpm_decoder(const StabilizerCode& code, const NoiseModel& noise);

// Applies parent-frame X/Z flips to a physical correction.
PauliOperator parent_to_physical(const StabilizerCode& code, const std::vector<std::uint8_t>& x_flips,
                                 const std::vector<std::uint8_t>& z_flips);

// Per-qubit list of (generator, letter) incidences.
struct Incidence {
    std::vector<std::vector<std::pair<std::uint32_t, Pauli>>> by_qubit;
    explicit Incidence(const StabilizerCode& code);
    // Toggles the syndrome bits flipped by `letter` on qubit q.
    void apply(std::vector<std::uint8_t>& syndrome, std::size_t q, Pauli letter) const;
};

inline double weight_from_prob(double p) {
    constexpr double kMin = 1e-20;
    p = std::clamp(p, kMin, 1.0 - kMin);
    return std::log((1.0 - p) / p);
}

}  // namespace qec3d::detail
