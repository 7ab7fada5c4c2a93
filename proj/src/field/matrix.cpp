#include "spfh/matrix.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace spfh {

namespace {

int words_for(int n) { return (n + 63) >> 6; }

void xor_words(std::uint64_t* dst, const std::uint64_t* src, int from, int to) {
    for (int w = from; w < to; ++w) dst[w] ^= src[w];
}

void clear_tail(std::uint64_t* row, int cols, int wpr) {
    if (wpr == 0) return;
    int rem = cols & 63;
    if (rem) row[wpr - 1] &= (std::uint64_t(1) << rem) - 1;
}

// dst[j] += c * src[j] for a span of entries.
void axpy_entries(const Field& f, Elem* dst, Elem c, const Elem* src, int from, int to) {
    if (c == 0) return;
    if (f.char2()) {
        if (c == 1) {
            for (int j = from; j < to; ++j) dst[j] ^= src[j];
        } else {
            for (int j = from; j < to; ++j)
                if (src[j]) dst[j] ^= f.mul(c, src[j]);
        }
        return;
    }
    if (f.prime_field()) {
        const unsigned p = unsigned(f.p());
        for (int j = from; j < to; ++j) {
            if (!src[j]) continue;
            unsigned v = (unsigned(dst[j]) + unsigned(c) * src[j]) % p;
            dst[j] = Elem(v);
        }
        return;
    }
    for (int j = from; j < to; ++j)
        if (src[j]) dst[j] = f.add(dst[j], f.mul(c, src[j]));
}

}  // namespace

// ---------------------------------------------------------------- Vec

Vec::Vec(FieldPtr f, int n) : f_(std::move(f)), n_(n), packed_(f_->q() == 2) {
    if (packed_)
        bits_.assign(words_for(n), 0);
    else
        ent_.assign(n, 0);
}

bool Vec::is_zero() const {
    if (packed_) return std::all_of(bits_.begin(), bits_.end(), [](auto w) { return w == 0; });
    return std::all_of(ent_.begin(), ent_.end(), [](auto e) { return e == 0; });
}

int Vec::first_nonzero(int from) const {
    if (packed_) {
        for (int w = from >> 6; w < int(bits_.size()); ++w) {
            std::uint64_t word = bits_[w];
            if (w == (from >> 6)) word &= ~std::uint64_t(0) << (from & 63);
            if (word) return w * 64 + std::countr_zero(word);
        }
        return -1;
    }
    for (int i = from; i < n_; ++i)
        if (ent_[i]) return i;
    return -1;
}

int Vec::weight() const {
    int c = 0;
    if (packed_) {
        for (auto w : bits_) c += std::popcount(w);
        return c;
    }
    for (auto e : ent_) c += e != 0;
    return c;
}

void Vec::axpy(Elem c, const Vec& x) {
    if (c == 0) return;
    if (packed_) {
        xor_words(bits_.data(), x.bits_.data(), 0, int(bits_.size()));
        return;
    }
    axpy_entries(*f_, ent_.data(), c, x.ent_.data(), 0, n_);
}

void Vec::scale(Elem c) {
    if (packed_) {
        if (c == 0) std::fill(bits_.begin(), bits_.end(), 0);
        return;
    }
    for (auto& e : ent_) e = f_->mul(e, c);
}

Vec Vec::concat(const Vec& other) const {
    Vec out(f_, n_ + other.n_);
    for (int i = 0; i < n_; ++i)
        if (Elem e = get(i)) out.set(i, e);
    for (int i = 0; i < other.n_; ++i)
        if (Elem e = other.get(i)) out.set(n_ + i, e);
    return out;
}

Vec Vec::slice(int start, int len) const {
    Vec out(f_, len);
    for (int i = 0; i < len; ++i)
        if (Elem e = get(start + i)) out.set(i, e);
    return out;
}

bool Vec::operator==(const Vec& o) const {
    return n_ == o.n_ && bits_ == o.bits_ && ent_ == o.ent_;
}

// ---------------------------------------------------------------- Mat

Mat::Mat(FieldPtr f, int rows, int cols)
    : f_(std::move(f)), rows_(rows), cols_(cols), packed_(f_->q() == 2) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix size");
    if (packed_) {
        wpr_ = words_for(cols);
        bits_.assign(std::size_t(rows) * wpr_, 0);
    } else {
        ent_.assign(std::size_t(rows) * cols, 0);
    }
}

Mat Mat::identity(FieldPtr f, int n) {
    Mat m(std::move(f), n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

Mat Mat::random(FieldPtr f, int rows, int cols, std::mt19937_64& rng) {
    Mat m(f, rows, cols);
    std::uniform_int_distribution<int> dist(0, f->q() - 1);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.set(i, j, Elem(dist(rng)));
    return m;
}

Mat Mat::from_columns(FieldPtr f, int rows, const std::vector<Vec>& cols) {
    Mat m(f, rows, int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j) m.set_col(j, cols[j]);
    return m;
}

Mat Mat::from_rows(FieldPtr f, int cols, const std::vector<Vec>& rows) {
    Mat m(f, int(rows.size()), cols);
    for (int i = 0; i < int(rows.size()); ++i) m.set_row(i, rows[i]);
    return m;
}

Mat Mat::from_ints(FieldPtr f, int rows, int cols, std::span<const long long> entries) {
    Mat m(f, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.set(i, j, f->from_int(entries[std::size_t(i) * cols + j]));
    return m;
}

Vec Mat::row(int i) const {
    Vec v(f_, cols_);
    if (packed_) {
        std::copy_n(row_words(i), wpr_, v.words().begin());
    } else {
        std::copy_n(row_entries(i), cols_, v.entries().begin());
    }
    return v;
}

Vec Mat::col(int j) const {
    Vec v(f_, rows_);
    for (int i = 0; i < rows_; ++i)
        if (Elem e = get(i, j)) v.set(i, e);
    return v;
}

void Mat::set_row(int i, const Vec& v) {
    if (packed_) {
        std::copy_n(v.words().begin(), wpr_, row_words(i));
    } else {
        std::copy_n(v.entries().begin(), cols_, row_entries(i));
    }
}

void Mat::set_col(int j, const Vec& v) {
    for (int i = 0; i < rows_; ++i) set(i, j, v.get(i));
}

void Mat::row_axpy(int dst, Elem c, int src) {
    if (c == 0) return;
    if (packed_) {
        xor_words(row_words(dst), row_words(src), 0, wpr_);
    } else {
        axpy_entries(*f_, row_entries(dst), c, row_entries(src), 0, cols_);
    }
}

void Mat::swap_rows(int a, int b) {
    if (a == b) return;
    if (packed_) {
        std::swap_ranges(row_words(a), row_words(a) + wpr_, row_words(b));
    } else {
        std::swap_ranges(row_entries(a), row_entries(a) + cols_, row_entries(b));
    }
}

void Mat::scale_row(int i, Elem c) {
    if (packed_) {
        if (c == 0) std::fill_n(row_words(i), wpr_, 0);
        return;
    }
    Elem* r = row_entries(i);
    for (int j = 0; j < cols_; ++j) r[j] = f_->mul(r[j], c);
}

Mat Mat::transpose() const {
    Mat t(f_, cols_, rows_);
    if (packed_) {
        for (int i = 0; i < rows_; ++i) {
            const std::uint64_t* r = row_words(i);
            for (int w = 0; w < wpr_; ++w) {
                std::uint64_t word = r[w];
                while (word) {
                    int b = std::countr_zero(word);
                    word &= word - 1;
                    int j = w * 64 + b;
                    t.bits_[std::size_t(j) * t.wpr_ + (i >> 6)] |= std::uint64_t(1) << (i & 63);
                }
            }
        }
        return t;
    }
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.ent_[std::size_t(j) * rows_ + i] = ent_[std::size_t(i) * cols_ + j];
    return t;
}

Mat Mat::block(int r0, int c0, int nr, int nc) const {
    Mat b(f_, nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            if (Elem e = get(r0 + i, c0 + j)) b.set(i, j, e);
    return b;
}

void Mat::set_block(int r0, int c0, const Mat& m) {
    for (int i = 0; i < m.rows_; ++i)
        for (int j = 0; j < m.cols_; ++j) set(r0 + i, c0 + j, m.get(i, j));
}

void Mat::add_block(int r0, int c0, const Mat& m) {
    for (int i = 0; i < m.rows_; ++i)
        for (int j = 0; j < m.cols_; ++j)
            if (Elem e = m.get(i, j)) add_to(r0 + i, c0 + j, e);
}

Mat Mat::select_rows(std::span<const int> idx) const {
    Mat m(f_, int(idx.size()), cols_);
    for (int i = 0; i < int(idx.size()); ++i) {
        if (packed_)
            std::copy_n(row_words(idx[i]), wpr_, m.row_words(i));
        else
            std::copy_n(row_entries(idx[i]), cols_, m.row_entries(i));
    }
    return m;
}

Mat Mat::select_cols(std::span<const int> idx) const {
    Mat m(f_, rows_, int(idx.size()));
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < int(idx.size()); ++j)
            if (Elem e = get(i, idx[j])) m.set(i, j, e);
    return m;
}

Mat Mat::hstack(const Mat& o) const {
    if (o.rows_ != rows_) throw std::invalid_argument("hstack: row mismatch");
    Mat m(f_, rows_, cols_ + o.cols_);
    m.set_block(0, 0, *this);
    m.set_block(0, cols_, o);
    return m;
}

Mat Mat::vstack(const Mat& o) const {
    if (o.cols_ != cols_) throw std::invalid_argument("vstack: column mismatch");
    Mat m(f_, rows_ + o.rows_, cols_);
    if (packed_) {
        std::copy(bits_.begin(), bits_.end(), m.bits_.begin());
        std::copy(o.bits_.begin(), o.bits_.end(), m.bits_.begin() + bits_.size());
    } else {
        std::copy(ent_.begin(), ent_.end(), m.ent_.begin());
        std::copy(o.ent_.begin(), o.ent_.end(), m.ent_.begin() + ent_.size());
    }
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Mat c(f_, rows_, o.cols_);
    if (packed_) {
        for (int i = 0; i < rows_; ++i) {
            const std::uint64_t* a = row_words(i);
            std::uint64_t* dst = c.row_words(i);
            for (int w = 0; w < wpr_; ++w) {
                std::uint64_t word = a[w];
                while (word) {
                    int k = w * 64 + std::countr_zero(word);
                    word &= word - 1;
                    xor_words(dst, o.row_words(k), 0, c.wpr_);
                }
            }
        }
        return c;
    }
    if (f_->prime_field() && !f_->char2()) {
        const unsigned long long p = unsigned(f_->p());
        std::vector<unsigned long long> acc(o.cols_);
        for (int i = 0; i < rows_; ++i) {
            std::fill(acc.begin(), acc.end(), 0);
            const Elem* a = row_entries(i);
            for (int k = 0; k < cols_; ++k) {
                if (!a[k]) continue;
                const Elem* b = o.row_entries(k);
                unsigned long long ak = a[k];
                for (int j = 0; j < o.cols_; ++j) acc[j] += ak * b[j];
                if ((k & 1023) == 1023)
                    for (auto& x : acc) x %= p;
            }
            Elem* dst = c.row_entries(i);
            for (int j = 0; j < o.cols_; ++j) dst[j] = Elem(acc[j] % p);
        }
        return c;
    }
    for (int i = 0; i < rows_; ++i) {
        const Elem* a = row_entries(i);
        Elem* dst = c.row_entries(i);
        for (int k = 0; k < cols_; ++k)
            if (a[k]) axpy_entries(*f_, dst, a[k], o.row_entries(k), 0, o.cols_);
    }
    return c;
}

Vec Mat::operator*(const Vec& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector product: shape mismatch");
    Vec out(f_, rows_);
    if (packed_) {
        auto vw = v.words();
        for (int i = 0; i < rows_; ++i) {
            const std::uint64_t* r = row_words(i);
            std::uint64_t acc = 0;
            for (int w = 0; w < wpr_; ++w) acc ^= r[w] & vw[w];
            if (std::popcount(acc) & 1) out.set(i, 1);
        }
        return out;
    }
    auto ve = v.entries();
    for (int i = 0; i < rows_; ++i) {
        const Elem* r = row_entries(i);
        Elem acc = 0;
        for (int j = 0; j < cols_; ++j)
            if (r[j] && ve[j]) acc = f_->add(acc, f_->mul(r[j], ve[j]));
        out.set(i, acc);
    }
    return out;
}

Mat Mat::operator+(const Mat& o) const {
    Mat m = *this;
    m += o;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    axpy(1, o);
    return *this;
}

Mat Mat::operator-(const Mat& o) const {
    Mat m = *this;
    m.axpy(f_->neg(1), o);
    return m;
}

Mat Mat::scaled(Elem c) const {
    Mat m(f_, rows_, cols_);
    m.axpy(c, *this);
    return m;
}

void Mat::axpy(Elem c, const Mat& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("axpy: shape mismatch");
    if (c == 0) return;
    if (packed_) {
        for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] ^= o.bits_[k];
        return;
    }
    axpy_entries(*f_, ent_.data(), c, o.ent_.data(), 0, int(ent_.size()));
}

bool Mat::operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && bits_ == o.bits_ && ent_ == o.ent_;
}

bool Mat::is_zero() const {
    if (packed_) return std::all_of(bits_.begin(), bits_.end(), [](auto w) { return w == 0; });
    return std::all_of(ent_.begin(), ent_.end(), [](auto e) { return e == 0; });
}

bool Mat::is_identity() const {
    return rows_ == cols_ && *this == identity(f_, rows_);
}

std::size_t Mat::nonzeros() const {
    std::size_t c = 0;
    if (packed_) {
        for (auto w : bits_) c += std::popcount(w);
        return c;
    }
    for (auto e : ent_) c += e != 0;
    return c;
}

Mat Mat::frobenius(int steps) const {
    Mat m = *this;
    if (f_->prime_field()) return m;
    for (auto& e : m.ent_) e = f_->frobenius(e, steps);
    return m;
}

RowEchelon Mat::rref_inplace() {
    RowEchelon re;
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
        int piv = -1;
        for (int i = r; i < rows_; ++i)
            if (get(i, c)) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        swap_rows(r, piv);
        if (packed_) {
            const int w0 = c >> 6;
            const std::uint64_t mask = std::uint64_t(1) << (c & 63);
            const std::uint64_t* pr = row_words(r);
            for (int i = 0; i < rows_; ++i) {
                if (i == r) continue;
                std::uint64_t* ri = row_words(i);
                if (ri[w0] & mask) xor_words(ri, pr, w0, wpr_);
            }
        } else {
            Elem inv = f_->inv(get(r, c));
            if (inv != 1) scale_row(r, inv);
            const Elem* pr = row_entries(r);
            for (int i = 0; i < rows_; ++i) {
                if (i == r) continue;
                Elem* ri = row_entries(i);
                if (ri[c]) axpy_entries(*f_, ri, f_->neg(ri[c]), pr, c, cols_);
            }
        }
        re.pivots.push_back(c);
        ++r;
    }
    re.rank = r;
    return re;
}

int Mat::rank() const {
    if (empty()) return 0;
    Mat m = rows_ <= cols_ ? *this : transpose();
    return m.rref_inplace().rank;
}

Mat Mat::kernel() const {
    Mat m = *this;
    RowEchelon re = m.rref_inplace();
    std::vector<char> is_piv(cols_, 0);
    for (int c : re.pivots) is_piv[c] = 1;
    std::vector<int> free_cols;
    for (int c = 0; c < cols_; ++c)
        if (!is_piv[c]) free_cols.push_back(c);
    Mat k(f_, cols_, int(free_cols.size()));
    for (int t = 0; t < int(free_cols.size()); ++t) {
        int fc = free_cols[t];
        k.set(fc, t, 1);
        for (int i = 0; i < re.rank; ++i)
            if (Elem e = m.get(i, fc)) k.set(re.pivots[i], t, f_->neg(e));
    }
    return k;
}

std::optional<Mat> Mat::solve(const Mat& b) const {
    if (b.rows_ != rows_) throw std::invalid_argument("solve: row mismatch");
    Mat aug = hstack(b);
    RowEchelon re = aug.rref_inplace();
    Mat x(f_, cols_, b.cols_);
    for (int i = 0; i < re.rank; ++i) {
        int pc = re.pivots[i];
        if (pc >= cols_) return std::nullopt;
        for (int j = 0; j < b.cols_; ++j)
            if (Elem e = aug.get(i, cols_ + j)) x.set(pc, j, e);
    }
    return x;
}

std::optional<Mat> Mat::inverse() const {
    if (rows_ != cols_) return std::nullopt;
    Mat aug = hstack(identity(f_, rows_));
    RowEchelon re = aug.rref_inplace();
    if (re.rank < rows_ || (rows_ > 0 && re.pivots[rows_ - 1] >= cols_)) return std::nullopt;
    return aug.block(0, cols_, rows_, cols_);
}

std::string Mat::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << get(i, j);
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------- Echelon

bool Echelon::reduce(Vec& v) const {
    const int k = int(rows_.size());
    if (v.packed()) {
        auto vw = v.words();
        for (int i = 0; i < k; ++i) {
            int pc = pivots_[i];
            if ((vw[pc >> 6] >> (pc & 63)) & 1u) {
                auto rw = rows_[i].words();
                for (int w = pc >> 6; w < int(vw.size()); ++w) vw[w] ^= rw[w];
            }
        }
        return v.is_zero();
    }
    for (int i = 0; i < k; ++i) {
        Elem e = v.get(pivots_[i]);
        if (e) {
            auto dst = v.entries();
            axpy_entries(*f_, dst.data(), f_->neg(e), rows_[i].entries().data(), pivots_[i], n_);
        }
    }
    return v.is_zero();
}

std::optional<Vec> Echelon::insert(Vec v) {
    if (reduce(v)) return std::nullopt;
    int pc = v.first_nonzero();
    Elem e = v.get(pc);
    if (e != 1) v.scale(f_->inv(e));
    rows_.push_back(v);
    pivots_.push_back(pc);
    return v;
}

Mat Echelon::basis_columns() const { return Mat::from_columns(f_, n_, rows_); }

// ---------------------------------------------------------------- helpers

Mat column_space(const Mat& m) {
    Mat t = m.transpose();
    RowEchelon re = t.rref_inplace();
    return t.block(0, 0, re.rank, t.cols()).transpose();
}

Mat coordinates(const Mat& b, const Mat& y) {
    auto x = b.solve(y);
    if (!x) throw std::runtime_error("coordinates: vector outside span");
    return *x;
}

int joint_rank(const Mat& a, const Mat& b) { return a.hstack(b).rank(); }

Mat kron(const Mat& a, const Mat& b) {
    const FieldPtr& f = a.field();
    Mat k(f, a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            Elem e = a.get(i, j);
            if (!e) continue;
            for (int s = 0; s < b.rows(); ++s)
                for (int t = 0; t < b.cols(); ++t)
                    if (Elem g = b.get(s, t)) k.set(i * b.rows() + s, j * b.cols() + t, f->mul(e, g));
        }
    return k;
}

Mat direct_sum(const Mat& a, const Mat& b) {
    Mat m(a.field(), a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    return m;
}

}  // namespace spfh
