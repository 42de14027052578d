#include "qec3d/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "decoders_internal.hpp"

namespace qec3d {

bool Syndrome::is_zero() const {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b == 0; });
}

std::size_t Syndrome::weight() const {
    return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

std::vector<std::uint8_t> Syndrome::sector(const StabilizerCode& code, std::string_view prefix) const {
    if (code.num_stabilizers() != bits_.size()) throw std::invalid_argument("Syndrome::sector: size mismatch");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (std::string_view(code.sectors[i]).starts_with(prefix)) out.push_back(bits_[i]);
    }
    return out;
}

Syndrome syndrome(const StabilizerCode& code, const PauliOperator& e) {
    if (e.n() != code.n) throw std::invalid_argument("syndrome: error acts on the wrong number of qubits");
    const auto letters = e.to_dense();
    std::vector<std::uint8_t> bits(code.num_stabilizers(), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = commutes_dense(code.stabilizers[i], letters) ? 0 : 1;
    return Syndrome(std::move(bits));
}

namespace detail {

Incidence::Incidence(const StabilizerCode& code) : by_qubit(code.n) {
    for (std::size_t g = 0; g < code.num_stabilizers(); ++g) {
        for (const auto& t : code.stabilizers[g].terms()) by_qubit[t.qubit].emplace_back(g, t.letter);
    }
}

void Incidence::apply(std::vector<std::uint8_t>& syndrome, std::size_t q, Pauli letter) const {
    for (const auto& [g, l] : by_qubit[q]) {
        if (anticommute(l, letter)) syndrome[g] ^= 1U;
    }
}

PauliOperator parent_to_physical(const StabilizerCode& code, const std::vector<std::uint8_t>& x_flips,
                                 const std::vector<std::uint8_t>& z_flips) {
    std::vector<PauliOperator::Term> terms;
    for (std::size_t q = 0; q < code.n; ++q) {
        const bool x = !x_flips.empty() && x_flips[q];
        const bool z = !z_flips.empty() && z_flips[q];
        if (!x && !z) continue;
        terms.push_back({static_cast<std::uint32_t>(q), code.frame[q](pauli_from_bits(x, z))});
    }
    return PauliOperator(code.n, std::move(terms));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Belief propagation

std::vector<double> BpResult::posteriors() const {
    std::vector<double> out(llr.size());
    for (std::size_t i = 0; i < llr.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(llr[i]));
    return out;
}

BeliefPropagation::BeliefPropagation(const gf2::BitMatrix& h, BpOptions options)
    : rows_(h.rows()), cols_(h.cols()), options_(options) {
    if (options_.max_iters < 1) throw std::invalid_argument("bp: max_iters must be positive");
    check_start_.assign(rows_ + 1, 0);
    for (std::size_t r = 0; r < rows_; ++r) {
        check_start_[r + 1] = check_start_[r] + h.row(r).size();
        for (std::size_t c : h.row(r)) check_var_.push_back(static_cast<std::uint32_t>(c));
    }
    std::vector<std::size_t> degree(cols_, 0);
    for (auto v : check_var_) ++degree[v];
    var_start_.assign(cols_ + 1, 0);
    for (std::size_t v = 0; v < cols_; ++v) var_start_[v + 1] = var_start_[v] + degree[v];
    var_edge_.resize(check_var_.size());
    std::vector<std::size_t> fill(var_start_.begin(), var_start_.end() - 1);
    for (std::size_t e = 0; e < check_var_.size(); ++e) var_edge_[fill[check_var_[e]]++] = static_cast<std::uint32_t>(e);
    v2c_.resize(check_var_.size());
    c2v_.resize(check_var_.size());
}

BpResult BeliefPropagation::run(std::span<const std::uint8_t> s, std::span<const double> priors) {
    if (s.size() != rows_ || priors.size() != cols_) throw std::invalid_argument("bp: input size mismatch");
    constexpr double kClamp = 1e-18;
    std::vector<double> prior_llr(cols_);
    for (std::size_t v = 0; v < cols_; ++v) {
        const double p = std::clamp(priors[v], kClamp, 1.0 - kClamp);
        prior_llr[v] = std::log((1.0 - p) / p);
    }
    for (std::size_t e = 0; e < check_var_.size(); ++e) v2c_[e] = prior_llr[check_var_[e]];

    BpResult out;
    out.llr.assign(cols_, 0.0);
    out.hard.assign(cols_, 0);
    std::vector<double> prefix, suffix;
    for (int it = 1; it <= options_.max_iters; ++it) {
        for (std::size_t c = 0; c < rows_; ++c) {
            const std::size_t b = check_start_[c], end = check_start_[c + 1];
            if (b == end) continue;
            const double parity = s[c] ? -1.0 : 1.0;
            if (options_.mode == BpMode::min_sum) {
                double sign = parity, min1 = INFINITY, min2 = INFINITY;
                std::size_t arg = b;
                for (std::size_t e = b; e < end; ++e) {
                    const double m = v2c_[e];
                    if (m < 0) sign = -sign;
                    const double a = std::abs(m);
                    if (a < min1) {
                        min2 = min1;
                        min1 = a;
                        arg = e;
                    } else if (a < min2) {
                        min2 = a;
                    }
                }
                for (std::size_t e = b; e < end; ++e) {
                    const double mag = (e == arg ? min2 : min1);
                    const double sg = v2c_[e] < 0 ? -sign : sign;
                    c2v_[e] = options_.normalization * sg * (std::isinf(mag) ? 0.0 : mag);
                }
            } else {
                const std::size_t deg = end - b;
                prefix.assign(deg + 1, 1.0);
                suffix.assign(deg + 1, 1.0);
                for (std::size_t i = 0; i < deg; ++i) prefix[i + 1] = prefix[i] * std::tanh(v2c_[b + i] / 2.0);
                for (std::size_t i = deg; i-- > 0;) suffix[i] = suffix[i + 1] * std::tanh(v2c_[b + i] / 2.0);
                for (std::size_t i = 0; i < deg; ++i) {
                    const double t = std::clamp(parity * prefix[i] * suffix[i + 1], -1.0 + 1e-15, 1.0 - 1e-15);
                    c2v_[b + i] = 2.0 * std::atanh(t);
                }
            }
        }
        for (std::size_t v = 0; v < cols_; ++v) {
            double total = prior_llr[v];
            for (std::size_t k = var_start_[v]; k < var_start_[v + 1]; ++k) total += c2v_[var_edge_[k]];
            for (std::size_t k = var_start_[v]; k < var_start_[v + 1]; ++k) {
                const auto e = var_edge_[k];
                v2c_[e] = total - c2v_[e];
            }
            out.llr[v] = total;
            out.hard[v] = total < 0 ? 1 : 0;
        }
        out.iterations = it;
        bool ok = true;
        for (std::size_t c = 0; c < rows_ && ok; ++c) {
            std::uint8_t parity = s[c];
            for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) parity ^= out.hard[check_var_[e]];
            ok = parity == 0;
        }
        out.converged = ok;
        if (ok && options_.early_stop) break;
    }
    return out;
}

BpResult bp_marginals(const gf2::BitMatrix& h, const gf2::BitVector& s, std::span<const double> priors,
                      BpOptions options) {
    if (s.len() != h.rows()) throw std::invalid_argument("bp: syndrome length != rows");
    BeliefPropagation bp(h, options);
    const auto dense = s.to_dense();
    return bp.run(dense, priors);
}

// ---------------------------------------------------------------------------
// Ordered statistics decoding

OrderedStatistics::OrderedStatistics(const gf2::BitMatrix& h, OsdOptions options)
    : rows_(h.rows()), cols_(h.cols()), options_(options), col_rows_(h.cols()) {
    if (options_.order < 0) throw std::invalid_argument("osd: order must be non-negative");
    rows_used_ = gf2::independent_rows(h);
    for (std::size_t i = 0; i < rows_used_.size(); ++i) {
        for (std::size_t c : h.row(rows_used_[i])) col_rows_[c].push_back(i);
    }
}

namespace {

bool support_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) { return a < b; }

}  // namespace

std::vector<std::uint8_t> OrderedStatistics::decode(std::span<const std::uint8_t> s,
                                                    std::span<const double> error_prob,
                                                    std::span<const double> weights) {
    if (s.size() != rows_ || error_prob.size() != cols_ || weights.size() != cols_) {
        throw std::invalid_argument("osd: input size mismatch");
    }
    std::vector<std::size_t> order(cols_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return error_prob[a] > error_prob[b]; });

    const std::size_t r = rows_used_.size();
    const std::size_t words = (cols_ + 1 + 63) / 64;
    mat_.assign(r * words, 0);
    auto bit = [&](std::size_t row, std::size_t col) { return (mat_[row * words + (col >> 6)] >> (col & 63)) & 1U; };
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i : col_rows_[order[j]]) mat_[i * words + (j >> 6)] ^= std::uint64_t{1} << (j & 63);
    }
    for (std::size_t i = 0; i < r; ++i) {
        if (s[rows_used_[i]]) mat_[i * words + (cols_ >> 6)] ^= std::uint64_t{1} << (cols_ & 63);
    }

    std::vector<std::size_t> pivot_col;
    std::vector<std::size_t> free_col;
    pivot_col.reserve(r);
    for (std::size_t j = 0; j < cols_; ++j) {
        const std::size_t rank = pivot_col.size();
        if (rank == r) {
            free_col.push_back(j);
            continue;
        }
        std::size_t p = rank;
        while (p < r && !bit(p, j)) ++p;
        if (p == r) {
            free_col.push_back(j);
            continue;
        }
        if (p != rank) {
            std::swap_ranges(mat_.begin() + static_cast<std::ptrdiff_t>(p * words),
                             mat_.begin() + static_cast<std::ptrdiff_t>((p + 1) * words),
                             mat_.begin() + static_cast<std::ptrdiff_t>(rank * words));
        }
        const std::uint64_t* src = mat_.data() + rank * words;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == rank || !bit(i, j)) continue;
            std::uint64_t* dst = mat_.data() + i * words;
            for (std::size_t w = j >> 6; w < words; ++w) dst[w] ^= src[w];
        }
        pivot_col.push_back(j);
    }
    if (pivot_col.size() != r) throw std::logic_error("osd: independent rows lost rank");

    std::vector<std::uint8_t> e_s(r);
    std::vector<double> y(r);
    for (std::size_t i = 0; i < r; ++i) {
        e_s[i] = static_cast<std::uint8_t>(bit(i, cols_));
        const double w = weights[order[pivot_col[i]]];
        y[i] = e_s[i] ? -w : w;
    }

    auto materialize = [&](const std::vector<std::size_t>& flips) {
        std::vector<std::uint8_t> es = e_s;
        std::vector<std::size_t> support;
        for (std::size_t t : flips) {
            for (std::size_t i = 0; i < r; ++i) es[i] ^= static_cast<std::uint8_t>(bit(i, free_col[t]));
            support.push_back(order[free_col[t]]);
        }
        for (std::size_t i = 0; i < r; ++i) {
            if (es[i]) support.push_back(order[pivot_col[i]]);
        }
        std::sort(support.begin(), support.end());
        return support;
    };

    std::vector<std::size_t> best_flips;
    double best = 0.0;
    std::vector<std::size_t> best_support;
    bool have_support = false;
    auto consider = [&](double delta, std::vector<std::size_t> flips) {
        const double eps = 1e-9 * (1.0 + std::abs(best));
        if (delta < best - eps) {
            best = delta;
            best_flips = std::move(flips);
            have_support = false;
        } else if (delta <= best + eps) {
            if (!have_support) {
                best_support = materialize(best_flips);
                have_support = true;
            }
            auto cand = materialize(flips);
            if (support_less(cand, best_support)) {
                best = std::min(best, delta);
                best_flips = std::move(flips);
                best_support = std::move(cand);
            }
        }
    };

    last_order_ = 0;
    if (options_.method == OsdMethod::combination_sweep && !free_col.empty()) {
        last_order_ = options_.order;
        const std::size_t nt = free_col.size();
        const std::size_t k2 = std::min<std::size_t>(static_cast<std::size_t>(options_.order), nt);
        const std::size_t cw = (r + 63) / 64;
        std::vector<std::uint64_t> packed(k2 * cw, 0);
        std::vector<double> delta1(nt);
        for (std::size_t t = 0; t < nt; ++t) {
            double d = weights[order[free_col[t]]];
            for (std::size_t i = 0; i < r; ++i) {
                if (bit(i, free_col[t])) {
                    d += y[i];
                    if (t < k2) packed[t * cw + (i >> 6)] |= std::uint64_t{1} << (i & 63);
                }
            }
            delta1[t] = d;
            consider(d, {t});
        }
        for (std::size_t a = 0; a < k2; ++a) {
            for (std::size_t b = a + 1; b < k2; ++b) {
                double shared = 0.0;
                for (std::size_t w = 0; w < cw; ++w) {
                    std::uint64_t m = packed[a * cw + w] & packed[b * cw + w];
                    while (m) {
                        const int tz = __builtin_ctzll(m);
                        shared += y[w * 64 + static_cast<std::size_t>(tz)];
                        m &= m - 1;
                    }
                }
                consider(delta1[a] + delta1[b] - 2.0 * shared, {a, b});
            }
        }
    }

    std::vector<std::uint8_t> e(cols_, 0);
    for (std::size_t q : (have_support ? best_support : materialize(best_flips))) e[q] = 1;
    return e;
}

gf2::BitVector osd(const gf2::BitMatrix& h, const gf2::BitVector& s, std::span<const double> soft,
                   OsdOptions options, std::span<const double> priors) {
    if (s.len() != h.rows()) throw std::invalid_argument("osd: syndrome length != rows");
    const auto rank_prob = priors.empty() ? soft : priors;
    std::vector<double> weights(h.cols());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = detail::weight_from_prob(rank_prob[i]);
    OrderedStatistics solver(h, options);
    const auto e = solver.decode(s.to_dense(), soft, weights);
    auto out = gf2::BitVector::from_dense(e);
    if (h.multiply(out) != s) throw std::invalid_argument("osd: syndrome outside the column space");
    return out;
}

// ---------------------------------------------------------------------------
// BP-OSD on the parent-frame X/Z split

SectorPriors parent_priors(const StabilizerCode& code, const NoiseModel& noise) {
    SectorPriors out{std::vector<double>(code.n), std::vector<double>(code.n)};
    for (std::size_t q = 0; q < code.n; ++q) {
        const AxisPerm& f = code.frame[q];
        out.x[q] = noise.prob(f(Pauli::X)) + noise.prob(f(Pauli::Y));
        out.z[q] = noise.prob(f(Pauli::Z)) + noise.prob(f(Pauli::Y));
    }
    return out;
}

namespace {

class BposdDecoder : public Decoder {
public:
    BposdDecoder(const StabilizerCode& code, const NoiseModel& noise, const DecoderConfig& config)
        : code_(std::make_shared<const StabilizerCode>(code)) {
        auto split = code.parent_split();
        if (!split) throw std::invalid_argument("bposd: stabilizers do not partition into X and Z type");
        const auto priors = parent_priors(code, noise);
        sectors_.push_back(make_sector(split->hz, split->z_rows, priors.x, config));
        sectors_.push_back(make_sector(split->hx, split->x_rows, priors.z, config));
    }

    DecodeResult decode(const Syndrome& s, CounterRng&) override {
        if (s.size() != code_->num_stabilizers()) throw std::invalid_argument("bposd: syndrome size mismatch");
        DecodeResult res;
        std::vector<std::uint8_t> flips[2];
        for (std::size_t k = 0; k < 2; ++k) {
            Sector& sec = sectors_[k];
            std::vector<std::uint8_t> sub(sec.rows.size());
            bool zero = true;
            for (std::size_t i = 0; i < sub.size(); ++i) {
                sub[i] = s.bits()[sec.rows[i]];
                zero = zero && sub[i] == 0;
            }
            if (zero && sec.sub_half) {
                flips[k].assign(code_->n, 0);
                continue;
            }
            auto bp = sec.bp.run(sub, sec.priors);
            res.bp_iterations = std::max(res.bp_iterations, bp.iterations);
            if (bp.converged) {
                flips[k] = std::move(bp.hard);
            } else {
                flips[k] = sec.osd.decode(sub, bp.posteriors(), sec.weights);
                res.osd_order = std::max(res.osd_order, sec.osd.last_order());
            }
            if (sec.h.multiply_dense(flips[k]) != sub) res.converged = false;
        }
        res.correction = detail::parent_to_physical(*code_, flips[0], flips[1]);
        return res;
    }

    std::string name() const override { return "bposd"; }
    std::unique_ptr<Decoder> clone() const override { return std::make_unique<BposdDecoder>(*this); }

private:
    struct Sector {
        gf2::BitMatrix h;
        std::vector<std::size_t> rows;
        std::vector<double> priors, weights;
        BeliefPropagation bp;
        OrderedStatistics osd;
        bool sub_half;
    };

    static Sector make_sector(const gf2::BitMatrix& h, const std::vector<std::size_t>& rows,
                              const std::vector<double>& priors, const DecoderConfig& config) {
        std::vector<double> w(priors.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = detail::weight_from_prob(priors[i]);
        const bool sub_half = std::all_of(priors.begin(), priors.end(), [](double p) { return p < 0.5; });
        return Sector{h, rows, priors, std::move(w), BeliefPropagation(h, config.bp), OrderedStatistics(h, config.osd),
                      sub_half};
    }

    std::shared_ptr<const StabilizerCode> code_;
    std::vector<Sector> sectors_;
};

}  // namespace

DecodeResult bposd_decode(const StabilizerCode& code, const Syndrome& s, const NoiseModel& noise,
                          const DecoderConfig& config) {
    BposdDecoder dec(code, noise, config);
    CounterRng rng(0, 0);
    return dec.decode(s, rng);
}

std::unique_ptr<Decoder> make_decoder(const StabilizerCode& code, const NoiseModel& noise, const DecoderConfig& config) {
    if (config.name == "bposd") return std::make_unique<BposdDecoder>(code, noise, config);
    if (config.name == "symmetry") return detail::make_symmetry_decoder(code);
    if (config.name == "sweep-match") return detail::make_sweep_match_decoder(code, noise, config.sweep_tmax_factor);
    if (config.name == "mwpm") return detail::make_mwpm_decoder(code, noise);
    throw std::invalid_argument("unknown decoder '" + config.name + "'");
}

}  // namespace qec3d
