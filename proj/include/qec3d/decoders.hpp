#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qec3d/codes.hpp"
#include "qec3d/gf2.hpp"
#include "qec3d/noise.hpp"
#include "qec3d/pauli.hpp"

namespace qec3d {

// Raised when a syndrome violates a conservation law the decoder relies on.
class InvalidSyndrome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Syndrome {
public:
    Syndrome() = default;
    explicit Syndrome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& bits() { return bits_; }
    std::size_t size() const { return bits_.size(); }
    bool is_zero() const;
    std::size_t weight() const;
    gf2::BitVector to_bitvector() const { return gf2::BitVector::from_dense(bits_); }
    // Bits of generators whose sector tag starts with `prefix`, in order.
    std::vector<std::uint8_t> sector(const StabilizerCode& code, std::string_view prefix) const;

    friend bool operator==(const Syndrome&, const Syndrome&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

Syndrome syndrome(const StabilizerCode& code, const PauliOperator& e);

struct DecodeResult {
    PauliOperator correction;
    bool converged = true;
    bool invalid_syndrome = false;
    int bp_iterations = 0;
    // Highest OSD order used, or -1 when OSD was not needed.
    int osd_order = -1;
};

// ---------------------------------------------------------------------------
// Belief propagation

enum class BpMode { min_sum, sum_product };

struct BpOptions {
    int max_iters = 32;
    double normalization = 0.625;
    BpMode mode = BpMode::min_sum;
    // Stop as soon as the hard decision reproduces the syndrome.
    bool early_stop = true;
};

struct BpResult {
    // Posterior log-likelihood ratios log(P(e_i=0)/P(e_i=1)).
    std::vector<double> llr;
    std::vector<std::uint8_t> hard;
    bool converged = false;
    int iterations = 0;

    std::vector<double> posteriors() const;
};

// Flooding-schedule BP on a fixed Tanner graph; buffers are reused between runs.
class BeliefPropagation {
public:
    BeliefPropagation(const gf2::BitMatrix& h, BpOptions options = {});
    BpResult run(std::span<const std::uint8_t> s, std::span<const double> priors);
    const BpOptions& options() const { return options_; }

private:
    std::size_t rows_, cols_;
    BpOptions options_;
    std::vector<std::size_t> check_start_;   // CSR over checks
    std::vector<std::uint32_t> check_var_;
    std::vector<std::size_t> var_start_;     // CSR over variables, indexes edges
    std::vector<std::uint32_t> var_edge_;
    std::vector<double> v2c_, c2v_;
};

BpResult bp_marginals(const gf2::BitMatrix& h, const gf2::BitVector& s, std::span<const double> priors,
                      BpOptions options = {});

// ---------------------------------------------------------------------------
// Ordered statistics decoding

enum class OsdMethod { osd0, combination_sweep };

struct OsdOptions {
    int order = 50;
    OsdMethod method = OsdMethod::combination_sweep;
};

class OrderedStatistics {
public:
    OrderedStatistics(const gf2::BitMatrix& h, OsdOptions options = {});
    // `error_prob` orders the columns (most likely errors first); `weights`
    // are per-bit costs log((1-p)/p) used to rank candidates.
    std::vector<std::uint8_t> decode(std::span<const std::uint8_t> s, std::span<const double> error_prob,
                                     std::span<const double> weights);
    int last_order() const { return last_order_; }

private:
    std::size_t rows_, cols_;
    OsdOptions options_;
    std::vector<std::size_t> rows_used_;
    std::vector<std::vector<std::size_t>> col_rows_;
    std::vector<std::uint64_t> mat_;
    int last_order_ = 0;
};

// Returns e with h e = s. `soft` holds per-bit error probabilities; when
// `priors` is empty the same values rank the candidates.
gf2::BitVector osd(const gf2::BitMatrix& h, const gf2::BitVector& s, std::span<const double> soft,
                   OsdOptions options = {}, std::span<const double> priors = {});

// ---------------------------------------------------------------------------
// Matching

struct RingMatch {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    // Qubit j sits between checks j and j+1 (mod m).
    std::vector<std::size_t> flips;
    std::size_t cost = 0;
};

// Optimal pairing of defects on a cycle of m checks. Ties go to the pairing
// whose flip set excludes qubit 0. Throws InvalidSyndrome on odd parity.
RingMatch match_ring(std::vector<std::size_t> defects, std::size_t m);

// Exact minimum-weight perfect matching on the complete graph over `count`
// points. Returns mate indices. Throws InvalidSyndrome on odd count.
std::vector<std::size_t> mwpm(std::size_t count, const std::function<std::int64_t(std::size_t, std::size_t)>& weight);

// Maximum-weight matching (Edmonds' blossom algorithm) on a general graph.
// Returns mate[v] or -1.
std::vector<long> max_weight_matching(std::size_t vertices,
                                      const std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>>& edges,
                                      bool max_cardinality);

// ---------------------------------------------------------------------------
// Decoders

struct DecoderConfig {
    std::string name = "bposd";
    BpOptions bp;
    OsdOptions osd;
    double sweep_tmax_factor = 4.0;
};

class Decoder {
public:
    virtual ~Decoder() = default;
    virtual DecodeResult decode(const Syndrome& s, CounterRng& rng) = 0;
    virtual std::string name() const = 0;
    virtual std::unique_ptr<Decoder> clone() const = 0;
};

// Throws std::invalid_argument when the decoder cannot handle the code.
std::unique_ptr<Decoder> make_decoder(const StabilizerCode& code, const NoiseModel& noise, const DecoderConfig& config);

// Per-qubit priors of parent-frame X and Z components.
struct SectorPriors {
    std::vector<double> x;
    std::vector<double> z;
};
SectorPriors parent_priors(const StabilizerCode& code, const NoiseModel& noise);

DecodeResult bposd_decode(const StabilizerCode& code, const Syndrome& s, const NoiseModel& noise,
                          const DecoderConfig& config = {});

DecodeResult symmetry_decode_cubic(const StabilizerCode& code, const Syndrome& s);
DecodeResult symmetry_decode_checkerboard(const StabilizerCode& code, const Syndrome& s);
DecodeResult symmetry_decode_2d(const StabilizerCode& code, const Syndrome& s);

// Sweep rule on the periodic cubic lattice. Faces are indexed as
// 3*vid + plane (plane 0 = xy, 1 = xz, 2 = yz); edges as 3*vid + axis.
std::vector<std::size_t> sweep_step(const std::array<int, 3>& dims, std::vector<std::uint8_t>& face_syndrome,
                                    const std::array<int, 3>& direction, CounterRng& rng);
struct SweepResult {
    std::vector<std::uint8_t> flips;
    bool converged = false;
    int steps = 0;
};
// Cycles through the eight directions, t_max steps per direction.
SweepResult sweep_decode(const std::array<int, 3>& dims, std::vector<std::uint8_t> face_syndrome, int t_max,
                         CounterRng& rng);

DecodeResult sweep_match_decode(const StabilizerCode& code, const Syndrome& s, const NoiseModel& noise,
                                CounterRng& rng, double tmax_factor = 4.0);

}  // namespace qec3d
