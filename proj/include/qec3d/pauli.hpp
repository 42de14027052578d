#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qec3d/gf2.hpp"

namespace qec3d {

// Single-qubit Pauli letter; bit 0 is the X component, bit 1 the Z component.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline bool has_x(Pauli p) { return static_cast<std::uint8_t>(p) & 1U; }
inline bool has_z(Pauli p) { return static_cast<std::uint8_t>(p) & 2U; }
inline Pauli pauli_from_bits(bool x, bool z) {
    return static_cast<Pauli>((x ? 1U : 0U) | (z ? 2U : 0U));
}
inline Pauli operator*(Pauli a, Pauli b) {
    return static_cast<Pauli>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
inline bool anticommute(Pauli a, Pauli b) {
    return ((has_x(a) && has_z(b)) != (has_z(a) && has_x(b)));
}
char to_char(Pauli p);
Pauli pauli_from_char(char c);

// Phase-free Pauli operator on n qubits, stored as a sorted list of
// non-identity terms.
class PauliOperator {
public:
    struct Term {
        std::uint32_t qubit;
        Pauli letter;
        friend bool operator==(const Term&, const Term&) = default;
    };

    PauliOperator() = default;
    explicit PauliOperator(std::size_t n) : n_(n) {}
    PauliOperator(std::size_t n, std::vector<Term> terms);
    PauliOperator(const gf2::BitVector& x_part, const gf2::BitVector& z_part);

    static PauliOperator from_string(std::string_view text);
    static PauliOperator single(std::size_t n, std::size_t qubit, Pauli p);
    static PauliOperator uniform(std::size_t n, const std::vector<std::size_t>& qubits, Pauli p);
    static PauliOperator from_dense(const std::vector<std::uint8_t>& letters);

    std::size_t n() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t weight() const { return terms_.size(); }
    bool is_identity() const { return terms_.empty(); }
    Pauli at(std::size_t qubit) const;

    gf2::BitVector x_part() const;
    gf2::BitVector z_part() const;
    std::vector<std::uint8_t> to_dense() const;
    std::string to_string() const;

    // Product up to phase.
    PauliOperator& operator*=(const PauliOperator& other);
    friend PauliOperator operator*(PauliOperator a, const PauliOperator& b) { return a *= b; }
    friend bool operator==(const PauliOperator&, const PauliOperator&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Term> terms_;
};

bool commutes(const PauliOperator& a, const PauliOperator& b);
// Commutation of a sparse operator with a dense letter array.
bool commutes_dense(const PauliOperator& a, const std::vector<std::uint8_t>& letters);

// Permutation of the Pauli axes {X, Y, Z} induced by a single-qubit Clifford.
class AxisPerm {
public:
    constexpr AxisPerm() : image_{Pauli::I, Pauli::X, Pauli::Z, Pauli::Y} {}
    // Images of X, Y and Z.
    AxisPerm(Pauli x_to, Pauli y_to, Pauli z_to);

    static AxisPerm identity() { return {}; }
    static AxisPerm hadamard() { return {Pauli::Z, Pauli::Y, Pauli::X}; }
    static AxisPerm swap_xy() { return {Pauli::Y, Pauli::X, Pauli::Z}; }
    static AxisPerm swap_yz() { return {Pauli::X, Pauli::Z, Pauli::Y}; }
    static AxisPerm cycle_xyz() { return {Pauli::Y, Pauli::Z, Pauli::X}; }
    static AxisPerm cycle_xzy() { return {Pauli::Z, Pauli::X, Pauli::Y}; }
    static AxisPerm from_name(std::string_view name);

    Pauli operator()(Pauli p) const { return image_[static_cast<std::uint8_t>(p)]; }
    AxisPerm inverse() const;
    // (a.then(b))(p) == b(a(p)).
    AxisPerm then(const AxisPerm& b) const;
    bool is_identity() const { return *this == AxisPerm{}; }
    std::string name() const;

    friend bool operator==(const AxisPerm&, const AxisPerm&) = default;

private:
    std::array<Pauli, 4> image_;
};

// Per-qubit axis permutations; qubits not listed are left unchanged.
class CliffordDeformation {
public:
    CliffordDeformation() = default;
    void set(std::size_t qubit, AxisPerm perm);
    AxisPerm at(std::size_t qubit) const;
    const std::map<std::size_t, AxisPerm>& entries() const { return map_; }
    CliffordDeformation inverse() const;
    bool empty() const { return map_.empty(); }

private:
    std::map<std::size_t, AxisPerm> map_;
};

PauliOperator apply_deformation(const PauliOperator& op, const CliffordDeformation& d);

}  // namespace qec3d
