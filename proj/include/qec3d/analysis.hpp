#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qec3d/codes.hpp"
#include "qec3d/harness.hpp"
#include "qec3d/noise.hpp"

namespace qec3d {

enum class FitSector { total, x, z };
std::string to_string(FitSector s);
FitSector parse_fit_sector(std::string_view text);

// One (p, L) cell. n_fail may be fractional for per-sector averages.
struct DataCell {
    double p = 0.0;
    int L = 0;
    double n_trials = 0.0;
    double n_fail = 0.0;

    double rate() const { return n_trials > 0 ? n_fail / n_trials : 0.0; }
};

DataCell data_cell(const CellRecord& record, FitSector sector);

struct ThresholdFit {
    double p_th = 0.0;
    double nu = 1.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double low = 0.0;
    double high = 0.0;
    std::size_t n_bootstrap = 0;
    FitSector sector = FitSector::total;
    double residual = 0.0;

    double rescaled(double p, int L) const;
    double curve(double p, int L) const;
};

struct FitWindow {
    double lo = 0.0;
    double hi = 1.0;
};

// Least-squares fit of p_L = A + Bx + Cx^2 with x = (p - p_th) L^(1/nu).
// Throws std::invalid_argument on degenerate input.
ThresholdFit fit_threshold(const std::vector<DataCell>& cells, FitWindow window = {});

ThresholdFit bootstrap_fit(const std::vector<DataCell>& cells, FitWindow window, std::size_t n_bs,
                           std::uint64_t seed);

// Draw from Beta(a, b).
double sample_beta(double a, double b, CounterRng& rng);

// Sector fit with the lowest credible lower bound.
const ThresholdFit& select_min_sector(const std::vector<ThresholdFit>& fits);

struct CollapsePoint {
    double x = 0.0;
    double p_l = 0.0;
    int L = 0;
};
std::vector<CollapsePoint> collapse(const std::vector<DataCell>& cells, const ThresholdFit& fit);

// Apparent crossing of two sizes: smallest rising root, inside the shared p
// range, of a variance-weighted quadratic fit to p_L(large) - p_L(small).
// The bootstrap redraws each rate from its Beta posterior; draws without a
// root are dropped and n_bootstrap counts the rest.
struct Crossing {
    double p = 0.0;
    double sigma = 0.0;
    std::size_t n_bootstrap = 0;
};
std::optional<double> crossing_point(const std::vector<DataCell>& small, const std::vector<DataCell>& large);
Crossing estimate_crossing(const std::vector<DataCell>& small, const std::vector<DataCell>& large,
                           std::size_t n_bs, std::uint64_t seed);

enum class CheckSector { x, z };
CheckSector parse_check_sector(std::string_view text);

// Shortest cycle in the Tanner graph of one sector's generators; 0 if acyclic.
std::size_t girth(const StabilizerCode& code, CheckSector sector);

// Minimum over products of up to `depth` generators of the sector, each
// sharing a qubit with an earlier factor, of weight / 2 over the even-weight
// products. Returns 0 when none is found.
std::size_t split_belief_number(const StabilizerCode& code, CheckSector sector, int depth = 3);

double binary_entropy(double p);
// Root of h(p) = 1/2 in (0, 1/2).
double binary_entropy_threshold();

// Lightest Z-only operator of weight <= cap that commutes with every
// stabilizer and anticommutes with some logical. Exhaustive over the kernel;
// throws std::invalid_argument when the kernel is too large to enumerate.
std::optional<PauliOperator> min_pure_z_logical(const StabilizerCode& code, std::size_t weight_cap);

bool is_logical(const StabilizerCode& code, const PauliOperator& op);

}  // namespace qec3d
