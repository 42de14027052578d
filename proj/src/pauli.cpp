#include "qec3d/pauli.hpp"

#include <algorithm>
#include <stdexcept>

namespace qec3d {

char to_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Z: return 'Z';
        case Pauli::Y: return 'Y';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': case 'i': case '_': return Pauli::I;
        case 'X': case 'x': return Pauli::X;
        case 'Y': case 'y': return Pauli::Y;
        case 'Z': case 'z': return Pauli::Z;
        default: throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
    }
}

PauliOperator::PauliOperator(std::size_t n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.qubit < b.qubit; });
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].qubit >= n_) throw std::invalid_argument("PauliOperator: qubit out of range");
        if (i > 0 && terms_[i].qubit == terms_[i - 1].qubit) {
            throw std::invalid_argument("PauliOperator: repeated qubit");
        }
    }
    std::erase_if(terms_, [](const Term& t) { return t.letter == Pauli::I; });
}

PauliOperator::PauliOperator(const gf2::BitVector& x_part, const gf2::BitVector& z_part) : n_(x_part.len()) {
    if (z_part.len() != n_) throw std::invalid_argument("PauliOperator: x/z length mismatch");
    const auto& xs = x_part.support();
    const auto& zs = z_part.support();
    std::size_t i = 0, j = 0;
    while (i < xs.size() || j < zs.size()) {
        if (j == zs.size() || (i < xs.size() && xs[i] < zs[j])) {
            terms_.push_back({static_cast<std::uint32_t>(xs[i++]), Pauli::X});
        } else if (i == xs.size() || zs[j] < xs[i]) {
            terms_.push_back({static_cast<std::uint32_t>(zs[j++]), Pauli::Z});
        } else {
            terms_.push_back({static_cast<std::uint32_t>(xs[i]), Pauli::Y});
            ++i;
            ++j;
        }
    }
}

PauliOperator PauliOperator::from_string(std::string_view text) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < text.size(); ++i) {
        Pauli p = pauli_from_char(text[i]);
        if (p != Pauli::I) terms.push_back({static_cast<std::uint32_t>(i), p});
    }
    return PauliOperator(text.size(), std::move(terms));
}

PauliOperator PauliOperator::single(std::size_t n, std::size_t qubit, Pauli p) {
    return PauliOperator(n, {{static_cast<std::uint32_t>(qubit), p}});
}

PauliOperator PauliOperator::uniform(std::size_t n, const std::vector<std::size_t>& qubits, Pauli p) {
    std::vector<Term> terms;
    terms.reserve(qubits.size());
    for (std::size_t q : qubits) terms.push_back({static_cast<std::uint32_t>(q), p});
    return PauliOperator(n, std::move(terms));
}

PauliOperator PauliOperator::from_dense(const std::vector<std::uint8_t>& letters) {
    PauliOperator op(letters.size());
    for (std::size_t q = 0; q < letters.size(); ++q) {
        const auto p = static_cast<Pauli>(letters[q] & 3U);
        if (p != Pauli::I) op.terms_.push_back({static_cast<std::uint32_t>(q), p});
    }
    return op;
}

Pauli PauliOperator::at(std::size_t qubit) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), qubit,
                               [](const Term& t, std::size_t q) { return t.qubit < q; });
    if (it != terms_.end() && it->qubit == qubit) return it->letter;
    return Pauli::I;
}

gf2::BitVector PauliOperator::x_part() const {
    std::vector<std::size_t> s;
    for (const auto& t : terms_) {
        if (has_x(t.letter)) s.push_back(t.qubit);
    }
    return gf2::BitVector(n_, std::move(s));
}

gf2::BitVector PauliOperator::z_part() const {
    std::vector<std::size_t> s;
    for (const auto& t : terms_) {
        if (has_z(t.letter)) s.push_back(t.qubit);
    }
    return gf2::BitVector(n_, std::move(s));
}

std::vector<std::uint8_t> PauliOperator::to_dense() const {
    std::vector<std::uint8_t> out(n_, 0);
    for (const auto& t : terms_) out[t.qubit] = static_cast<std::uint8_t>(t.letter);
    return out;
}

std::string PauliOperator::to_string() const {
    std::string s(n_, 'I');
    for (const auto& t : terms_) s[t.qubit] = to_char(t.letter);
    return s;
}

PauliOperator& PauliOperator::operator*=(const PauliOperator& other) {
    if (other.n_ != n_) throw std::invalid_argument("PauliOperator: size mismatch in product");
    std::vector<Term> out;
    out.reserve(terms_.size() + other.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < other.terms_.size()) {
        if (j == other.terms_.size() || (i < terms_.size() && terms_[i].qubit < other.terms_[j].qubit)) {
            out.push_back(terms_[i++]);
        } else if (i == terms_.size() || other.terms_[j].qubit < terms_[i].qubit) {
            out.push_back(other.terms_[j++]);
        } else {
            Pauli p = terms_[i].letter * other.terms_[j].letter;
            if (p != Pauli::I) out.push_back({terms_[i].qubit, p});
            ++i;
            ++j;
        }
    }
    terms_ = std::move(out);
    return *this;
}

bool commutes(const PauliOperator& a, const PauliOperator& b) {
    if (a.n() != b.n()) throw std::invalid_argument("commutes: size mismatch");
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t i = 0, j = 0;
    bool odd = false;
    while (i < ta.size() && j < tb.size()) {
        if (ta[i].qubit < tb[j].qubit) {
            ++i;
        } else if (tb[j].qubit < ta[i].qubit) {
            ++j;
        } else {
            odd ^= anticommute(ta[i].letter, tb[j].letter);
            ++i;
            ++j;
        }
    }
    return !odd;
}

bool commutes_dense(const PauliOperator& a, const std::vector<std::uint8_t>& letters) {
    if (a.n() != letters.size()) throw std::invalid_argument("commutes: size mismatch");
    bool odd = false;
    for (const auto& t : a.terms()) odd ^= anticommute(t.letter, static_cast<Pauli>(letters[t.qubit] & 3U));
    return !odd;
}

AxisPerm::AxisPerm(Pauli x_to, Pauli y_to, Pauli z_to) : image_{Pauli::I, x_to, z_to, y_to} {
    std::array<bool, 4> seen{};
    for (Pauli p : {x_to, y_to, z_to}) {
        if (p == Pauli::I || seen[static_cast<std::uint8_t>(p)]) {
            throw std::invalid_argument("AxisPerm: not a permutation of {X,Y,Z}");
        }
        seen[static_cast<std::uint8_t>(p)] = true;
    }
}

AxisPerm AxisPerm::from_name(std::string_view name) {
    if (name == "I" || name == "identity") return identity();
    if (name == "H" || name == "xz") return hadamard();
    if (name == "S" || name == "xy") return swap_xy();
    if (name == "yz") return swap_yz();
    if (name == "xyz") return cycle_xyz();
    if (name == "xzy") return cycle_xzy();
    throw std::invalid_argument("unknown axis permutation '" + std::string(name) + "'");
}

AxisPerm AxisPerm::inverse() const {
    AxisPerm inv;
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) inv.image_[static_cast<std::uint8_t>((*this)(p))] = p;
    return inv;
}

AxisPerm AxisPerm::then(const AxisPerm& b) const {
    return {b((*this)(Pauli::X)), b((*this)(Pauli::Y)), b((*this)(Pauli::Z))};
}

std::string AxisPerm::name() const {
    if (*this == identity()) return "identity";
    if (*this == hadamard()) return "xz";
    if (*this == swap_xy()) return "xy";
    if (*this == swap_yz()) return "yz";
    if (*this == cycle_xyz()) return "xyz";
    return "xzy";
}

void CliffordDeformation::set(std::size_t qubit, AxisPerm perm) {
    if (perm.is_identity()) {
        map_.erase(qubit);
    } else {
        map_[qubit] = perm;
    }
}

AxisPerm CliffordDeformation::at(std::size_t qubit) const {
    auto it = map_.find(qubit);
    return it == map_.end() ? AxisPerm::identity() : it->second;
}

CliffordDeformation CliffordDeformation::inverse() const {
    CliffordDeformation inv;
    for (const auto& [q, p] : map_) inv.set(q, p.inverse());
    return inv;
}

PauliOperator apply_deformation(const PauliOperator& op, const CliffordDeformation& d) {
    if (!d.empty() && d.entries().rbegin()->first >= op.n()) {
        throw std::invalid_argument("apply_deformation: deformation references qubit beyond operator size");
    }
    std::vector<PauliOperator::Term> terms = op.terms();
    for (auto& t : terms) t.letter = d.at(t.qubit)(t.letter);
    return PauliOperator(op.n(), std::move(terms));
}

}  // namespace qec3d
