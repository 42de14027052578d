#include "qec3d/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace qec3d::gf2 {

namespace {

constexpr std::size_t kSmall = 64;

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

void check_sorted_unique(std::size_t len, std::vector<std::size_t>& s) {
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw std::invalid_argument("gf2: duplicate position in support");
    }
    if (!s.empty() && s.back() >= len) {
        throw std::invalid_argument("gf2: position out of range");
    }
}

// Plain byte-per-entry Gauss-Jordan used for tiny matrices.
Echelon rref_small(const DenseMatrix& in) {
    const std::size_t rows = in.rows();
    const std::size_t cols = in.cols();
    std::vector<std::vector<std::uint8_t>> a(rows, std::vector<std::uint8_t>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) a[r][c] = in.get(r, c) ? 1 : 0;
    }
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != rank && a[r][c]) {
                for (std::size_t j = 0; j < cols; ++j) a[r][j] ^= a[rank][j];
            }
        }
        pivots.push_back(c);
        ++rank;
    }
    DenseMatrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (a[r][c]) out.set(r, c, true);
        }
    }
    return {std::move(out), std::move(pivots)};
}

Echelon rref_packed(DenseMatrix m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const std::size_t words = m.words();
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        const std::size_t w = c >> 6;
        const std::uint64_t bit = std::uint64_t{1} << (c & 63);
        std::size_t p = rank;
        while (p < rows && !(m.row(p)[w] & bit)) ++p;
        if (p == rows) continue;
        m.swap_rows(p, rank);
        const std::uint64_t* prow = m.row(rank);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            std::uint64_t* dst = m.row(r);
            if (dst[w] & bit) {
                for (std::size_t j = w; j < words; ++j) dst[j] ^= prow[j];
            }
        }
        pivots.push_back(c);
        ++rank;
    }
    return {std::move(m), std::move(pivots)};
}

// Incremental row basis keyed by lowest set bit; rows keep an active word range
// so that banded lattice matrices stay cheap.
class RowBasis {
public:
    explicit RowBasis(std::size_t cols) : words_(word_count(cols)) {}

    // Returns true if the row was independent and has been added.
    bool insert(const std::vector<std::size_t>& support) {
        if (support.empty()) return false;
        std::vector<std::uint64_t> row(words_, 0);
        for (std::size_t c : support) row[c >> 6] ^= std::uint64_t{1} << (c & 63);
        std::size_t lo = support.front() >> 6;
        std::size_t hi = (support.back() >> 6) + 1;
        while (true) {
            while (lo < hi && row[lo] == 0) ++lo;
            if (lo == hi) return false;
            const std::size_t lead = lo * 64 + static_cast<std::size_t>(std::countr_zero(row[lo]));
            auto it = pivot_.find(lead);
            if (it == pivot_.end()) {
                while (hi > lo && row[hi - 1] == 0) --hi;
                pivot_.emplace(lead, rows_.size());
                rows_.push_back({std::move(row), lo, hi});
                return true;
            }
            const Entry& b = rows_[it->second];
            for (std::size_t j = b.lo; j < b.hi; ++j) row[j] ^= b.bits[j];
            hi = std::max(hi, b.hi);
        }
    }

    std::size_t size() const { return rows_.size(); }

private:
    struct Entry {
        std::vector<std::uint64_t> bits;
        std::size_t lo;
        std::size_t hi;
    };
    std::size_t words_;
    std::vector<Entry> rows_;
    std::unordered_map<std::size_t, std::size_t> pivot_;
};

}  // namespace

BitVector::BitVector(std::size_t len, std::vector<std::size_t> support)
    : len_(len), support_(std::move(support)) {
    check_sorted_unique(len_, support_);
}

BitVector BitVector::from_string(std::string_view bits) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            s.push_back(i);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("gf2: bit string must contain only 0 and 1");
        }
    }
    return BitVector(bits.size(), std::move(s));
}

BitVector BitVector::from_dense(std::span<const std::uint8_t> bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] & 1U) v.support_.push_back(i);
    }
    return v;
}

bool BitVector::test(std::size_t i) const {
    return std::binary_search(support_.begin(), support_.end(), i);
}

std::vector<std::uint8_t> BitVector::to_dense() const {
    std::vector<std::uint8_t> out(len_, 0);
    for (std::size_t i : support_) out[i] = 1;
    return out;
}

std::string BitVector::to_string() const {
    std::string out(len_, '0');
    for (std::size_t i : support_) out[i] = '1';
    return out;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.len_ != len_) throw std::invalid_argument("gf2: length mismatch in xor");
    std::vector<std::size_t> out;
    out.reserve(support_.size() + other.support_.size());
    std::set_symmetric_difference(support_.begin(), support_.end(), other.support_.begin(),
                                  other.support_.end(), std::back_inserter(out));
    support_ = std::move(out);
    return *this;
}

bool operator<(const BitVector& a, const BitVector& b) {
    if (a.len_ != b.len_) return a.len_ < b.len_;
    return a.support_ < b.support_;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows) {}

BitMatrix::BitMatrix(std::size_t cols, std::vector<std::vector<std::size_t>> row_supports)
    : rows_(row_supports.size()), cols_(cols), data_(std::move(row_supports)) {
    for (auto& r : data_) check_sorted_unique(cols_, r);
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i] = {i};
    return m;
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    std::vector<std::vector<std::size_t>> data;
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("gf2: ragged matrix rows");
        data.push_back(BitVector::from_string(r).support());
    }
    return BitMatrix(cols, std::move(data));
}

std::size_t BitMatrix::nnz() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.size();
    return n;
}

bool BitMatrix::test(std::size_t r, std::size_t c) const {
    const auto& row = data_.at(r);
    return std::binary_search(row.begin(), row.end(), c);
}

void BitMatrix::flip(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("gf2: flip out of range");
    auto& row = data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c);
    if (it != row.end() && *it == c) {
        row.erase(it);
    } else {
        row.insert(it, c);
    }
}

void BitMatrix::append_row(std::vector<std::size_t> support) {
    check_sorted_unique(cols_, support);
    data_.push_back(std::move(support));
    ++rows_;
}

BitMatrix BitMatrix::transpose() const {
    return BitMatrix(rows_, column_supports());
}

std::vector<std::vector<std::size_t>> BitMatrix::column_supports() const {
    std::vector<std::vector<std::size_t>> cols(cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : data_[r]) cols[c].push_back(r);
    }
    return cols;
}

BitVector BitMatrix::multiply(const BitVector& v) const {
    if (v.len() != cols_) throw std::invalid_argument("gf2: dimension mismatch in multiply");
    const auto dense = v.to_dense();
    return BitVector::from_dense(multiply_dense(dense));
}

std::vector<std::uint8_t> BitMatrix::multiply_dense(std::span<const std::uint8_t> v) const {
    if (v.size() != cols_) throw std::invalid_argument("gf2: dimension mismatch in multiply");
    std::vector<std::uint8_t> out(rows_, 0);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint8_t acc = 0;
        for (std::size_t c : data_[r]) acc ^= v[c];
        out[r] = acc & 1U;
    }
    return out;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_(word_count(cols)), data_(rows * word_count(cols), 0) {}

DenseMatrix::DenseMatrix(const BitMatrix& m) : DenseMatrix(m.rows(), m.cols()) {
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : m.row(r)) flip(r, c);
    }
}

void DenseMatrix::set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t& w = data_[r * words_ + (c >> 6)];
    const std::uint64_t bit = std::uint64_t{1} << (c & 63);
    w = v ? (w | bit) : (w & ~bit);
}

void DenseMatrix::xor_row(std::size_t dst, std::size_t src) {
    std::uint64_t* d = row(dst);
    const std::uint64_t* s = row(src);
    for (std::size_t j = 0; j < words_; ++j) d[j] ^= s[j];
}

void DenseMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(row(a), row(a) + words_, row(b));
}

Echelon rref(DenseMatrix m) {
    if (m.rows() < kSmall && m.cols() < kSmall) return rref_small(m);
    return rref_packed(std::move(m));
}

std::size_t rank(const BitMatrix& m) {
    if (m.rows() < kSmall && m.cols() < kSmall) return rref_small(DenseMatrix(m)).pivot_cols.size();
    RowBasis basis(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) basis.insert(m.row(r));
    return basis.size();
}

std::vector<std::size_t> independent_rows(const BitMatrix& m) {
    RowBasis basis(m.cols());
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (basis.insert(m.row(r))) out.push_back(r);
    }
    return out;
}

std::optional<BitVector> solve(const BitMatrix& h, const BitVector& s) {
    if (s.len() != h.rows()) throw std::invalid_argument("gf2::solve: syndrome length != rows");
    const std::size_t n = h.cols();
    DenseMatrix aug(h.rows(), n + 1);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (std::size_t c : h.row(r)) aug.flip(r, c);
    }
    for (std::size_t r : s.support()) aug.flip(r, n);
    Echelon e = rref(std::move(aug));
    std::vector<std::size_t> sol;
    for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
        if (e.pivot_cols[i] == n) return std::nullopt;
        if (e.matrix.get(i, n)) sol.push_back(e.pivot_cols[i]);
    }
    BitVector x(n, std::move(sol));
    if (h.multiply(x) != s) throw std::runtime_error("gf2::solve: verification failed");
    return x;
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    const std::size_t n = m.cols();
    Echelon e = rref(DenseMatrix(m));
    std::vector<char> is_pivot(n, 0);
    for (std::size_t c : e.pivot_cols) is_pivot[c] = 1;
    std::vector<BitVector> out;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<std::size_t> s{f};
        for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
            if (e.matrix.get(i, f)) s.push_back(e.pivot_cols[i]);
        }
        out.emplace_back(n, std::move(s));
    }
    return out;
}

}  // namespace qec3d::gf2
