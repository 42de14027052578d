#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qec3d::gf2 {

// Sparse binary vector stored as a sorted set of positions.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len) {}
    BitVector(std::size_t len, std::vector<std::size_t> support);

    static BitVector from_string(std::string_view bits);
    static BitVector from_dense(std::span<const std::uint8_t> bits);

    std::size_t len() const { return len_; }
    const std::vector<std::size_t>& support() const { return support_; }
    std::size_t weight() const { return support_.size(); }
    bool empty() const { return support_.empty(); }
    bool test(std::size_t i) const;

    std::vector<std::uint8_t> to_dense() const;
    std::string to_string() const;

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend bool operator==(const BitVector&, const BitVector&) = default;
    friend bool operator<(const BitVector& a, const BitVector& b);

private:
    std::size_t len_ = 0;
    std::vector<std::size_t> support_;
};

// Sparse binary matrix stored row-wise.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);
    BitMatrix(std::size_t cols, std::vector<std::vector<std::size_t>> row_supports);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_strings(const std::vector<std::string>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const;
    const std::vector<std::size_t>& row(std::size_t r) const { return data_.at(r); }
    bool test(std::size_t r, std::size_t c) const;

    // Toggle entry (r, c).
    void flip(std::size_t r, std::size_t c);
    void append_row(std::vector<std::size_t> support);

    BitMatrix transpose() const;
    std::vector<std::vector<std::size_t>> column_supports() const;
    BitVector multiply(const BitVector& v) const;
    std::vector<std::uint8_t> multiply_dense(std::span<const std::uint8_t> v) const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::vector<std::size_t>> data_;
};

// Bit-packed dense matrix used by the elimination kernels.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);
    explicit DenseMatrix(const BitMatrix& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words() const { return words_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * words_ + (c >> 6)] >> (c & 63)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool v);
    void flip(std::size_t r, std::size_t c) { data_[r * words_ + (c >> 6)] ^= std::uint64_t{1} << (c & 63); }

    std::uint64_t* row(std::size_t r) { return data_.data() + r * words_; }
    const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }
    void xor_row(std::size_t dst, std::size_t src);
    void swap_rows(std::size_t a, std::size_t b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

// Reduced row echelon form: `matrix` holds the reduced rows, the first
// pivot_cols.size() rows are the nonzero ones.
struct Echelon {
    DenseMatrix matrix;
    std::vector<std::size_t> pivot_cols;
};

Echelon rref(DenseMatrix m);

std::size_t rank(const BitMatrix& m);
std::optional<BitVector> solve(const BitMatrix& h, const BitVector& s);
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// Row indices forming a basis of the row space, greedily in input order.
std::vector<std::size_t> independent_rows(const BitMatrix& m);

}  // namespace qec3d::gf2
