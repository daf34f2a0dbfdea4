#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qfa {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

/// Comparison tolerances used throughout the library. All of them are
/// overridable (the CLI exposes them as flags).
struct Tolerances {
    double unitary = 1e-8;  // max-entry deviation of M'M from I
    double span = 1e-9;     // relative residual for span membership
    double prob = 1e-9;     // absolute probability comparisons
};

/// Dense row-major complex matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

    static Matrix identity(int n);
    static Matrix zero(int rows, int cols);
    /// 0/1 diagonal projector onto the given state indices.
    static Matrix projector(int n, const std::vector<int>& states);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Complex& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const Complex& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<Complex>& data() const { return data_; }

    Matrix adjoint() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix operator*(Complex scalar) const;

    /// Largest entry magnitude of this - rhs.
    double max_abs_diff(const Matrix& rhs) const;
    bool all_finite() const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

CVec mat_vec(const Matrix& m, const CVec& v);
Complex inner(const CVec& a, const CVec& b);  // conjugate-linear in the first argument
double norm(const CVec& v);
double norm_sq(const CVec& v);

/// <u|M|v> without forming intermediate matrices.
Complex sandwich(const CVec& u, const Matrix& m, const CVec& v);

/// True iff M is square and max-entry deviation of M'M from the identity is
/// at most eps. Throws std::invalid_argument on non-square input.
bool check_unitary(const Matrix& m, double eps);

/// Block-diagonal sum: A top-left, B bottom-right. Inputs must be square.
Matrix diagonal_sum(const Matrix& a, const Matrix& b);

/// Row-major flattening of a square matrix into a length-n^2 vector.
CVec vectorize(const Matrix& m);

/// Deterministic seeded Gaussian stream. Box-Muller over raw mt19937_64
/// bits so the output does not depend on the standard library's
/// distribution implementations.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }
    double uniform();   // [0, 1)
    double gaussian();  // standard normal

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Haar-like random unitary: complex Gaussian matrix with orthonormalized
/// columns. Deterministic for a fixed seed.
Matrix random_unitary(int n, std::uint64_t seed);
Matrix random_unitary(int n, GaussianRng& rng);

/// Random unit vector of the given dimension.
CVec random_state(int dim, GaussianRng& rng);

struct SpanMembership {
    bool contained = false;
    std::vector<Complex> coefficients;  // expansion in the stored orthonormal basis
    double residual = 0.0;
};

/// Incrementally maintained orthonormal basis of vectorized n x n matrices.
/// Each basis vector remembers the word whose matrix contributed it, which
/// is what turns a nonzero linear functional on a basis vector back into a
/// concrete witness word.
class SpanBasis {
  public:
    explicit SpanBasis(int order) : order_(order) {}

    int order() const { return order_; }
    int size() const { return static_cast<int>(vectors_.size()); }

    /// Orthogonalizes vectorize(m) against the basis (modified Gram-Schmidt,
    /// applied twice). Appends the normalized residual when its norm exceeds
    /// eps * max(1, ||vectorize(m)||); returns whether the basis grew.
    bool add(const Matrix& m, const std::string& provenance_word, double eps);

    SpanMembership contains(const Matrix& m, double eps) const;

    const CVec& vector(int i) const { return vectors_[static_cast<std::size_t>(i)]; }
    const std::string& provenance(int i) const { return provenance_[static_cast<std::size_t>(i)]; }

    /// Basis vector i folded back into matrix form.
    Matrix matrix(int i) const;

  private:
    int order_;
    std::vector<CVec> vectors_;
    std::vector<std::string> provenance_;
};

}  // namespace qfa
