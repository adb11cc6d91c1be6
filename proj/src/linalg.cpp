#include "jointlab/linalg.hpp"

#include <stdexcept>
#include <utility>

#include "jointlab/errors.hpp"

namespace jointlab {

std::size_t QVectorHash::operator()(const QVector& v) const {
    std::size_t h = v.size();
    for (const auto& x : v) h ^= x.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

QVector operator+(const QVector& a, const QVector& b) {
    if (a.size() != b.size()) throw PreconditionError("vector size mismatch");
    QVector r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

QVector operator-(const QVector& a, const QVector& b) {
    if (a.size() != b.size()) throw PreconditionError("vector size mismatch");
    QVector r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

QVector operator*(const Rational& s, const QVector& v) {
    QVector r(v);
    for (auto& x : r) x *= s;
    return r;
}

Rational dot(const QVector& a, const QVector& b) {
    if (a.size() != b.size()) throw PreconditionError("vector size mismatch");
    mpq_class acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i].value() * b[i].value();
    return Rational(std::move(acc));
}

bool is_zero(const QVector& v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

std::string to_string(const QVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += v[i].str();
    }
    return s + ")";
}

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVector>& rows, std::size_t cols) {
    QMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw PreconditionError("QMatrix::from_rows: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

QMatrix QMatrix::from_columns(const std::vector<QVector>& cols, std::size_t rows) {
    QMatrix m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].size() != rows) throw PreconditionError("QMatrix::from_columns: ragged columns");
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
    }
    return m;
}

QVector QMatrix::row(std::size_t r) const {
    return QVector(a_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

QVector QMatrix::column(std::size_t c) const {
    QVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

QMatrix QMatrix::transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

QMatrix QMatrix::hcat(const QMatrix& other) const {
    if (other.rows_ != rows_) throw PreconditionError("hcat: row count mismatch");
    QMatrix m(rows_, cols_ + other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c);
        for (std::size_t c = 0; c < other.cols_; ++c) m(r, cols_ + c) = other(r, c);
    }
    return m;
}

QMatrix QMatrix::vcat(const QMatrix& other) const {
    if (other.cols_ != cols_) throw PreconditionError("vcat: column count mismatch");
    QMatrix m(rows_ + other.rows_, cols_);
    std::copy(a_.begin(), a_.end(), m.a_.begin());
    std::copy(other.a_.begin(), other.a_.end(), m.a_.begin() + static_cast<std::ptrdiff_t>(a_.size()));
    return m;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.rows_) throw PreconditionError("matrix product: shape mismatch");
    QMatrix m(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r)
        for (std::size_t c = 0; c < b.cols_; ++c) {
            mpq_class acc;
            for (std::size_t k = 0; k < a.cols_; ++k) acc += a(r, k).value() * b(k, c).value();
            m(r, c) = Rational(std::move(acc));
        }
    return m;
}

QVector operator*(const QMatrix& a, const QVector& x) {
    if (a.cols_ != x.size()) throw PreconditionError("matrix-vector product: shape mismatch");
    QVector y(a.rows_);
    for (std::size_t r = 0; r < a.rows_; ++r) {
        mpq_class acc;
        for (std::size_t k = 0; k < a.cols_; ++k) acc += a(r, k).value() * x[k].value();
        y[r] = Rational(std::move(acc));
    }
    return y;
}

namespace {

using IntRow = std::vector<mpz_class>;

// Scales each row by the lcm of its denominators; row space and the
// solution set of an augmented system are unchanged.
std::vector<IntRow> integer_rows(const QMatrix& m) {
    std::vector<IntRow> rows(m.rows(), IntRow(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        mpz_class l = 1;
        for (std::size_t c = 0; c < m.cols(); ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).den().get_mpz_t());
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c).num() * (l / m(r, c).den());
    }
    return rows;
}

// Bareiss fraction-free forward elimination. Returns pivot columns; rows
// [0, pivots.size()) hold the echelon form, the rest are zero.
std::vector<std::size_t> bareiss(std::vector<IntRow>& a, std::size_t ncols) {
    std::vector<std::size_t> pivots;
    mpz_class prev = 1;
    std::size_t r = 0;
    const std::size_t nrows = a.size();
    mpz_class t;
    for (std::size_t c = 0; c < ncols && r < nrows; ++c) {
        std::size_t p = r;
        while (p < nrows && a[p][c] == 0) ++p;
        if (p == nrows) continue;
        std::swap(a[r], a[p]);
        for (std::size_t i = r + 1; i < nrows; ++i) {
            for (std::size_t j = c + 1; j < ncols; ++j) {
                t = a[r][c] * a[i][j];
                t -= a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

// Back-substitutes an integer echelon form into reduced row echelon form over Q.
QMatrix reduce_echelon(const std::vector<IntRow>& a, const std::vector<std::size_t>& pivots, std::size_t ncols) {
    const std::size_t rk = pivots.size();
    std::vector<std::vector<mpq_class>> q(rk, std::vector<mpq_class>(ncols));
    for (std::size_t i = 0; i < rk; ++i) {
        const mpz_class& lead = a[i][pivots[i]];
        for (std::size_t j = 0; j < ncols; ++j) {
            q[i][j] = mpq_class(a[i][j], lead);
            q[i][j].canonicalize();
        }
    }
    for (std::size_t i = rk; i-- > 0;) {
        const std::size_t pc = pivots[i];
        for (std::size_t k = 0; k < i; ++k) {
            if (sgn(q[k][pc]) == 0) continue;
            mpq_class f = q[k][pc];
            for (std::size_t j = pc; j < ncols; ++j) q[k][j] -= f * q[i][j];
        }
    }
    QMatrix out(rk, ncols);
    for (std::size_t i = 0; i < rk; ++i)
        for (std::size_t j = 0; j < ncols; ++j) out(i, j) = Rational(std::move(q[i][j]));
    return out;
}

}  // namespace

std::size_t rank(const QMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    auto a = integer_rows(m);
    return bareiss(a, m.cols()).size();
}

RowEchelon reduced_row_echelon(const QMatrix& m) {
    auto a = integer_rows(m);
    auto pivots = bareiss(a, m.cols());
    return {reduce_echelon(a, pivots, m.cols()), pivots};
}

SolutionSet solve_affine(const QMatrix& a, const QVector& b) {
    if (a.rows() != b.size()) throw PreconditionError("solve_affine: A has " + std::to_string(a.rows()) +
                                                      " rows but b has " + std::to_string(b.size()) + " entries");
    const std::size_t n = a.cols();
    QMatrix aug(a.rows(), n + 1);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < n; ++c) aug(r, c) = a(r, c);
        aug(r, n) = b[r];
    }
    RowEchelon e = reduced_row_echelon(aug);
    SolutionSet out;
    if (!e.pivots.empty() && e.pivots.back() == n) return out;  // 0 = nonzero row

    std::vector<bool> is_pivot(n, false);
    for (auto p : e.pivots) is_pivot[p] = true;

    out.base.assign(n, Rational());
    for (std::size_t i = 0; i < e.pivots.size(); ++i) out.base[e.pivots[i]] = e.rows(i, n);

    std::vector<QVector> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        QVector v(n);
        v[f] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rows(i, f);
        basis.push_back(std::move(v));
    }
    out.kernel = QMatrix::from_columns(basis, n);
    out.kind = basis.empty() ? SolutionSet::Kind::point : SolutionSet::Kind::flat;
    return out;
}

QMatrix nullspace(const QMatrix& a) {
    return solve_affine(a, QVector(a.rows())).kernel;
}

}  // namespace jointlab
