#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qec3d/gf2.hpp"
#include "qec3d/pauli.hpp"

namespace qec3d {

// Integer coordinates, scaled so that every lattice element has an integer
// centre. `axis` is the edge direction for edge qubits and -1 otherwise;
// `sublattice` distinguishes qubits sharing a site.
struct QubitCoord {
    std::array<int, 3> pos{};
    int axis = -1;
    int sublattice = 0;
    bool vertical = false;

    friend bool operator==(const QubitCoord&, const QubitCoord&) = default;
};

struct LogicalPair {
    PauliOperator x;
    PauliOperator z;
};

enum class Boundary { periodic, open, open_rough_pair, periodic_with_seam, open_smooth_top_bottom };
enum class Surface2dKind { css, xzzx, xy };

Boundary parse_boundary(std::string_view text);
std::string to_string(Boundary b);
Surface2dKind parse_surface2d_kind(std::string_view text);
std::string to_string(Surface2dKind k);

// Parity-check matrices of a stabilizer set whose generators are pure X or
// pure Z in some frame. Row i of hx corresponds to generator x_rows[i].
struct CssSplit {
    gf2::BitMatrix hx;
    gf2::BitMatrix hz;
    std::vector<std::size_t> x_rows;
    std::vector<std::size_t> z_rows;
};

struct StabilizerCode {
    std::string family;
    std::array<int, 3> dims{};
    Boundary boundary = Boundary::periodic;
    std::string deformation = "none";
    std::size_t n = 0;
    std::vector<PauliOperator> stabilizers;
    std::vector<std::string> sectors;
    std::vector<LogicalPair> logicals;
    std::vector<QubitCoord> coords;
    // Map from the undeformed (parent) frame to the physical frame, per qubit.
    std::vector<AxisPerm> frame;

    std::size_t num_stabilizers() const { return stabilizers.size(); }
    std::size_t k() const;
    // Symplectic stabilizer matrix [X | Z] with 2n columns.
    gf2::BitMatrix symplectic() const;

    // Present when every generator is pure X or pure Z as written.
    std::optional<CssSplit> css_split() const;
    // Split of the generators in the parent frame, when it exists.
    std::optional<CssSplit> parent_split() const;

    // Throws std::runtime_error describing the first violated invariant.
    void validate() const;
};

// Qubit-selection rule plus the axis permutation to apply.
struct DeformationRecipe {
    std::string name;
    std::function<std::optional<AxisPerm>(const QubitCoord&)> select;
};

DeformationRecipe identity_recipe();
// Named recipes: "none", "hadamard-z-edges", "hadamard-vertical-2d",
// "checkerboard-vertical", "color-diagonal", "sierpinski-even-y",
// "haah-checkerboard", "rotated-checkerboard".
DeformationRecipe recipe_by_name(std::string_view name);
// The deformation used for a family in the literature; throws if none exists.
DeformationRecipe standard_recipe(const std::string& family);

StabilizerCode deform(const StabilizerCode& code, const DeformationRecipe& recipe);

std::vector<LogicalPair> compute_logicals(const StabilizerCode& code);

StabilizerCode build_surface2d(Surface2dKind kind, int lx, int ly, Boundary boundary);
// Rotated-layout XZZX code: qubits on the vertices of an lx x ly torus and
// one XZZX stabilizer per face. Valid for any lx, ly >= 2.
StabilizerCode build_xzzx_rotated2d(int lx, int ly);
StabilizerCode build_surface3d_cubic(int lx, int ly, int lz, Boundary boundary);
StabilizerCode build_surface3d_checkerboard(int lx, int ly, int lz);
StabilizerCode build_color3d(int cells_x, int cells_y, int cells_z);
StabilizerCode build_xcube(int lx, int ly, int lz);
StabilizerCode build_sierpinski(int lx, int ly, int lz);
StabilizerCode build_haah(int lx, int ly, int lz);
// Returns the Clifford-deformed rotated code.
StabilizerCode build_rotated_surface3d(int lx, int ly, int lz, Boundary boundary);

// Family dispatcher used by the CLI. Family names: surface2d-css,
// surface2d-xzzx, surface2d-xy, surface3d-cubic, surface3d-checkerboard,
// color3d, xcube, sierpinski, haah, rotated3d.
StabilizerCode build_code(const std::string& family, const std::vector<int>& dims, Boundary boundary);

// X-cube logical strings. (dir, plane) is the ordered axis pair; the string
// runs along `dir` in the plane {v[plane] = ell}.
PauliOperator xcube_logical_x(const StabilizerCode& code, int dir, int plane, int ell);
PauliOperator xcube_logical_z(const StabilizerCode& code, int dir, int plane, int ell);

std::string code_to_json(const StabilizerCode& code);
StabilizerCode code_from_json(std::string_view text);

}  // namespace qec3d
