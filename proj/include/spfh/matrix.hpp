#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spfh/field.hpp"

namespace spfh {

// Dense vector over a finite field. Entries are bitpacked over GF(2).
class Vec {
public:
    Vec() = default;
    Vec(FieldPtr f, int n);

    const FieldPtr& field() const { return f_; }
    int size() const { return n_; }

    Elem get(int i) const {
        if (packed()) return Elem((bits_[std::size_t(i) >> 6] >> (i & 63)) & 1u);
        return ent_[i];
    }
    void set(int i, Elem v) {
        if (packed()) {
            std::uint64_t m = std::uint64_t(1) << (i & 63);
            if (v & 1)
                bits_[std::size_t(i) >> 6] |= m;
            else
                bits_[std::size_t(i) >> 6] &= ~m;
        } else {
            ent_[i] = v;
        }
    }

    bool is_zero() const;
    int first_nonzero(int from = 0) const;
    int weight() const;
    void axpy(Elem c, const Vec& x);  // *this += c * x
    void scale(Elem c);
    Vec concat(const Vec& other) const;
    Vec slice(int start, int len) const;
    bool operator==(const Vec& o) const;

    bool packed() const { return packed_; }
    std::span<std::uint64_t> words() { return bits_; }
    std::span<const std::uint64_t> words() const { return bits_; }
    std::span<Elem> entries() { return ent_; }
    std::span<const Elem> entries() const { return ent_; }

private:
    FieldPtr f_;
    int n_ = 0;
    bool packed_ = false;
    std::vector<std::uint64_t> bits_;
    std::vector<Elem> ent_;
};

class Mat;

struct RowEchelon {
    int rank = 0;
    std::vector<int> pivots;  // pivot column of each nonzero row
};

// Dense row-major matrix over a finite field, bitpacked over GF(2).
class Mat {
public:
    Mat() = default;
    Mat(FieldPtr f, int rows, int cols);

    static Mat identity(FieldPtr f, int n);
    static Mat random(FieldPtr f, int rows, int cols, std::mt19937_64& rng);
    static Mat from_columns(FieldPtr f, int rows, const std::vector<Vec>& cols);
    static Mat from_rows(FieldPtr f, int cols, const std::vector<Vec>& rows);
    static Mat from_ints(FieldPtr f, int rows, int cols, std::span<const long long> entries);

    const FieldPtr& field() const { return f_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Elem get(int i, int j) const {
        if (packed_) return Elem((bits_[std::size_t(i) * wpr_ + (std::size_t(j) >> 6)] >> (j & 63)) & 1u);
        return ent_[std::size_t(i) * cols_ + j];
    }
    void set(int i, int j, Elem v) {
        if (packed_) {
            std::uint64_t& w = bits_[std::size_t(i) * wpr_ + (std::size_t(j) >> 6)];
            std::uint64_t m = std::uint64_t(1) << (j & 63);
            w = (v & 1) ? (w | m) : (w & ~m);
        } else {
            ent_[std::size_t(i) * cols_ + j] = v;
        }
    }
    void add_to(int i, int j, Elem v) { set(i, j, f_->add(get(i, j), v)); }

    Vec row(int i) const;
    Vec col(int j) const;
    void set_row(int i, const Vec& v);
    void set_col(int j, const Vec& v);
    void row_axpy(int dst, Elem c, int src);  // row dst += c * row src
    void swap_rows(int a, int b);
    void scale_row(int i, Elem c);

    Mat transpose() const;
    Mat block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const Mat& m);
    void add_block(int r0, int c0, const Mat& m);
    Mat select_rows(std::span<const int> idx) const;
    Mat select_cols(std::span<const int> idx) const;
    Mat hstack(const Mat& o) const;
    Mat vstack(const Mat& o) const;

    Mat operator*(const Mat& o) const;
    Vec operator*(const Vec& v) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat& operator+=(const Mat& o);
    Mat scaled(Elem c) const;
    void axpy(Elem c, const Mat& o);  // *this += c * o
    bool operator==(const Mat& o) const;
    bool is_zero() const;
    bool is_identity() const;
    std::size_t nonzeros() const;

    // Entrywise x -> x^(p^steps).
    Mat frobenius(int steps) const;

    // In-place reduced row echelon form.
    RowEchelon rref_inplace();
    int rank() const;
    // Columns span the right kernel.
    Mat kernel() const;
    // Some X with (*this) X = b, if one exists.
    std::optional<Mat> solve(const Mat& b) const;
    std::optional<Mat> inverse() const;

    std::string to_string() const;

    bool packed() const { return packed_; }
    int words_per_row() const { return wpr_; }
    std::uint64_t* row_words(int i) { return bits_.data() + std::size_t(i) * wpr_; }
    const std::uint64_t* row_words(int i) const { return bits_.data() + std::size_t(i) * wpr_; }
    Elem* row_entries(int i) { return ent_.data() + std::size_t(i) * cols_; }
    const Elem* row_entries(int i) const { return ent_.data() + std::size_t(i) * cols_; }

private:
    FieldPtr f_;
    int rows_ = 0, cols_ = 0, wpr_ = 0;
    bool packed_ = false;
    std::vector<std::uint64_t> bits_;
    std::vector<Elem> ent_;
};

// Incremental semi-echelon basis of a subspace; rows have pairwise distinct
// pivots and each row vanishes at the pivots of earlier rows.
class Echelon {
public:
    Echelon() = default;
    Echelon(FieldPtr f, int n) : f_(std::move(f)), n_(n) {}

    int dim() const { return static_cast<int>(rows_.size()); }
    int ambient() const { return n_; }
    // Reduces v modulo the span; true when v ends up zero.
    bool reduce(Vec& v) const;
    bool contains(Vec v) const { return reduce(v); }
    // Adds v; returns the reduced (normalized) row when v was independent.
    std::optional<Vec> insert(Vec v);
    const std::vector<Vec>& rows() const { return rows_; }
    Mat basis_columns() const;

private:
    FieldPtr f_;
    int n_ = 0;
    std::vector<Vec> rows_;
    std::vector<int> pivots_;
};

// Column basis for the span of the columns of m.
Mat column_space(const Mat& m);
// Coordinates of the columns of y in the full-column-rank basis b.
// Throws if some column is outside the span.
Mat coordinates(const Mat& b, const Mat& y);
// dim(span(a) + span(b)) for column spans.
int joint_rank(const Mat& a, const Mat& b);
Mat kron(const Mat& a, const Mat& b);
Mat direct_sum(const Mat& a, const Mat& b);

}  // namespace spfh
