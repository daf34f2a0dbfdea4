#include "qfa/complex_linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfa {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::zero(int rows, int cols) { return Matrix(rows, cols); }

Matrix Matrix::projector(int n, const std::vector<int>& states) {
    Matrix m(n, n);
    for (int s : states) {
        if (s < 0 || s >= n) throw std::invalid_argument("projector: state index out of range");
        m(s, s) = 1.0;
    }
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int l = 0; l < cols_; ++l) {
            const Complex a = (*this)(i, l);
            if (a == Complex{}) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(l, j);
        }
    }
    return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("matrix sum: shape mismatch");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("matrix difference: shape mismatch");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
    return out;
}

Matrix Matrix::operator*(Complex scalar) const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * scalar;
    return out;
}

double Matrix::max_abs_diff(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
        worst = std::max(worst, std::abs(data_[i] - rhs.data_[i]));
    return worst;
}

bool Matrix::all_finite() const {
    for (const Complex& c : data_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

CVec mat_vec(const Matrix& m, const CVec& v) {
    if (static_cast<std::size_t>(m.cols()) != v.size())
        throw std::invalid_argument("apply: dimension mismatch");
    CVec out(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
        Complex acc{};
        for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

Complex inner(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: dimension mismatch");
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm_sq(const CVec& v) {
    double acc = 0.0;
    for (const Complex& c : v) acc += std::norm(c);
    return acc;
}

double norm(const CVec& v) { return std::sqrt(norm_sq(v)); }

Complex sandwich(const CVec& u, const Matrix& m, const CVec& v) { return inner(u, mat_vec(m, v)); }

bool check_unitary(const Matrix& m, double eps) {
    if (!m.square()) throw std::invalid_argument("check_unitary: matrix is not square");
    Matrix gram = m.adjoint() * m;
    return gram.max_abs_diff(Matrix::identity(m.rows())) <= eps;
}

Matrix diagonal_sum(const Matrix& a, const Matrix& b) {
    if (!a.square() || !b.square())
        throw std::invalid_argument("diagonal_sum: inputs must be square");
    const int na = a.rows(), nb = b.rows();
    Matrix out(na + nb, na + nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) out(i, j) = a(i, j);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) out(na + i, na + j) = b(i, j);
    return out;
}

CVec vectorize(const Matrix& m) {
    if (!m.square()) throw std::invalid_argument("vectorize: matrix is not square");
    return m.data();
}

double GaussianRng::uniform() {
    // 53 high bits -> [0, 1)
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
}

double GaussianRng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 shifted into (0, 1] to keep the log finite.
    const double u1 = (static_cast<double>(bits() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

namespace {

// Modified Gram-Schmidt sweep over earlier columns, run twice by callers.
void orthogonalize_column(Matrix& m, int col, int against_cols) {
    const int n = m.rows();
    for (int c = 0; c < against_cols; ++c) {
        Complex proj{};
        for (int i = 0; i < n; ++i) proj += std::conj(m(i, c)) * m(i, col);
        for (int i = 0; i < n; ++i) m(i, col) -= proj * m(i, c);
    }
}

double column_norm(const Matrix& m, int col) {
    double acc = 0.0;
    for (int i = 0; i < m.rows(); ++i) acc += std::norm(m(i, col));
    return std::sqrt(acc);
}

}  // namespace

Matrix random_unitary(int n, GaussianRng& rng) {
    if (n < 1) throw std::invalid_argument("random_unitary: order must be positive");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    for (int col = 0; col < n; ++col) {
        orthogonalize_column(m, col, col);
        orthogonalize_column(m, col, col);
        double len = column_norm(m, col);
        while (len < 1e-10) {  // essentially impossible, but keeps the stream deterministic
            for (int i = 0; i < n; ++i) m(i, col) = Complex(rng.gaussian(), rng.gaussian());
            orthogonalize_column(m, col, col);
            orthogonalize_column(m, col, col);
            len = column_norm(m, col);
        }
        for (int i = 0; i < n; ++i) m(i, col) /= len;
    }
    return m;
}

Matrix random_unitary(int n, std::uint64_t seed) {
    GaussianRng rng(seed);
    return random_unitary(n, rng);
}

CVec random_state(int dim, GaussianRng& rng) {
    if (dim < 1) throw std::invalid_argument("random_state: dimension must be positive");
    CVec v(static_cast<std::size_t>(dim));
    double len = 0.0;
    do {
        for (Complex& c : v) c = Complex(rng.gaussian(), rng.gaussian());
        len = norm(v);
    } while (len < 1e-10);
    for (Complex& c : v) c /= len;
    return v;
}

bool SpanBasis::add(const Matrix& m, const std::string& provenance_word, double eps) {
    if (m.rows() != order_ || m.cols() != order_)
        throw std::invalid_argument("SpanBasis::add: order mismatch");
    CVec v = vectorize(m);
    const double vnorm = norm(v);
    for (int pass = 0; pass < 2; ++pass) {
        for (const CVec& b : vectors_) {
            const Complex c = inner(b, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
    }
    const double rnorm = norm(v);
    if (rnorm <= eps * std::max(1.0, vnorm)) return false;
    for (Complex& c : v) c /= rnorm;
    vectors_.push_back(std::move(v));
    provenance_.push_back(provenance_word);
    return true;
}

SpanMembership SpanBasis::contains(const Matrix& m, double eps) const {
    if (m.rows() != order_ || m.cols() != order_)
        throw std::invalid_argument("SpanBasis::contains: order mismatch");
    CVec v = vectorize(m);
    const double vnorm = norm(v);
    SpanMembership result;
    result.coefficients.assign(vectors_.size(), Complex{});
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t bi = 0; bi < vectors_.size(); ++bi) {
            const Complex c = inner(vectors_[bi], v);
            result.coefficients[bi] += c;
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * vectors_[bi][i];
        }
    }
    result.residual = norm(v);
    result.contained = result.residual <= eps * std::max(1.0, vnorm);
    return result;
}

Matrix SpanBasis::matrix(int i) const {
    const CVec& v = vectors_[static_cast<std::size_t>(i)];
    Matrix out(order_, order_);
    for (int r = 0; r < order_; ++r)
        for (int c = 0; c < order_; ++c) out(r, c) = v[static_cast<std::size_t>(r) * order_ + c];
    return out;
}

}  // namespace qfa
