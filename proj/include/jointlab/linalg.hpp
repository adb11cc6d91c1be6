#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jointlab/rational.hpp"

namespace jointlab {

/// A point or vector in Q^n. Ordered lexicographically through std::vector.
using QVector = std::vector<Rational>;

struct QVectorHash {
    std::size_t operator()(const QVector& v) const;
};

QVector operator+(const QVector& a, const QVector& b);
QVector operator-(const QVector& a, const QVector& b);
QVector operator*(const Rational& s, const QVector& v);
Rational dot(const QVector& a, const QVector& b);
bool is_zero(const QVector& v);
std::string to_string(const QVector& v);

/// Dense row-major matrix over Q.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static QMatrix identity(std::size_t n);
    static QMatrix from_rows(const std::vector<QVector>& rows, std::size_t cols);
    static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    QVector row(std::size_t r) const;
    QVector column(std::size_t c) const;
    QMatrix transpose() const;

    /// Horizontal concatenation [*this | other].
    QMatrix hcat(const QMatrix& other) const;
    /// Vertical concatenation.
    QMatrix vcat(const QMatrix& other) const;

    friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
    friend QVector operator*(const QMatrix& a, const QVector& x);
    friend bool operator==(const QMatrix&, const QMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> a_;
};

/// Exact rank over Q (fraction-free elimination).
std::size_t rank(const QMatrix& m);

/// Solution set of A x = b.
struct SolutionSet {
    enum class Kind { empty, point, flat };
    Kind kind = Kind::empty;
    QVector base;    ///< particular solution (free variables zero); empty when kind == empty
    QMatrix kernel;  ///< n x dim, columns form a basis of ker(A); dim == 0 for a point
    std::size_t dimension() const { return kernel.cols(); }
};

/// Exact description of {x : A x = b}. Requires A.rows() == b.size().
SolutionSet solve_affine(const QMatrix& a, const QVector& b);

/// Basis of ker(A) as the columns of an n x k matrix.
QMatrix nullspace(const QMatrix& a);

/// Reduced row echelon form (nonzero rows only) and its pivot columns.
struct RowEchelon {
    QMatrix rows;
    std::vector<std::size_t> pivots;
};
RowEchelon reduced_row_echelon(const QMatrix& m);

}  // namespace jointlab
