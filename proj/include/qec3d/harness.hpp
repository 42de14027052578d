#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qec3d/codes.hpp"
#include "qec3d/decoders.hpp"
#include "qec3d/noise.hpp"

namespace qec3d {

inline constexpr const char* kVersion = "0.1.0";

struct TrialStats {
    std::size_t n_trials = 0;
    std::size_t n_fail_total = 0;
    // Per logical qubit: trials whose residual flips the X (resp. Z) logical.
    std::vector<std::size_t> n_fail_x;
    std::vector<std::size_t> n_fail_z;
    // Trials where the decoder reported non-convergence or left a syndrome.
    std::size_t n_nonconverged = 0;
    double wall_time_s = 0.0;

    TrialStats& operator+=(const TrialStats& other);
    double failure_rate() const;
    // Failure counts averaged over logical qubits.
    double mean_fail_x() const;
    double mean_fail_z() const;
};

struct Classification {
    std::vector<std::uint8_t> x_flip;
    std::vector<std::uint8_t> z_flip;
    bool any() const;
};

// x_flip[i] is set when the residual anticommutes with logical Z_i, z_flip[i]
// when it anticommutes with logical X_i. Throws std::runtime_error when the
// residual has a nonzero syndrome.
Classification classify(const StabilizerCode& code, const PauliOperator& residual);

struct RunOptions {
    std::size_t n_trials = 1000;
    std::uint64_t base_seed = 1;
    unsigned workers = 1;
    // When set, stop at the first chunk boundary with at least this many failures.
    std::optional<std::size_t> stop_after_failures;
    std::size_t chunk = 64;
};

// Deterministic for fixed inputs, independent of the worker count.
TrialStats run_trials(const StabilizerCode& code, const NoiseModel& noise, const DecoderConfig& decoder,
                      const RunOptions& options);

// Seed of the decoder RNG stream of trial t.
inline constexpr std::uint64_t kDecoderBlock = std::uint64_t{1} << 40;

struct CellRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string code;
    std::array<int, 3> dims{};
    std::string boundary = "periodic";
    std::string deformation = "none";
    double p = 0.0;
    double eta = 0.5;
    std::string decoder;
    std::optional<std::size_t> stop_after_failures;
    TrialStats stats;
};

std::string to_ndjson(const CellRecord& record);
CellRecord record_from_ndjson(std::string_view line);
// Stable 64-bit FNV-1a hash, printed as 16 hex digits.
std::string hash_hex(std::string_view text);

}  // namespace qec3d
