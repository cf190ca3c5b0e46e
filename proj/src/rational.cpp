#include "fluidnet/rational.hpp"

#include "fluidnet/error.hpp"

#include <cctype>
#include <limits>

namespace fluidnet {

namespace {

bool is_integer_text(const std::string& s)
{
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+'))
        ++i;
    if (i == s.size())
        return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text)
{
    auto slash = text.find('/');
    std::string num = text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!is_integer_text(num) || !is_integer_text(den) || den.find_first_of("+-") != std::string::npos)
        throw Error("BAD_RATIONAL", "not a rational: '" + text + "'");
    if (num[0] == '+')
        num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0)
        throw Error("BAD_RATIONAL", "zero denominator: '" + text + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r)
{
    return r.get_str();
}

double to_double(const Rational& r)
{
    return r.get_d();
}

std::string to_string(const ExtRational& r)
{
    return r ? to_string(*r) : "inf";
}

double to_double(const ExtRational& r)
{
    return r ? r->get_d() : std::numeric_limits<double>::infinity();
}

std::vector<double> to_double(const RationalVector& v)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v)
        out.push_back(x.get_d());
    return out;
}

RatMatrix::RatMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0))
{
}

RatMatrix RatMatrix::identity(std::size_t n)
{
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::diagonal(const RationalVector& d)
{
    RatMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

RatMatrix RatMatrix::transpose() const
{
    RatMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

RationalVector RatMatrix::row(std::size_t i) const
{
    return RationalVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
}

bool operator==(const RatMatrix& a, const RatMatrix& b)
{
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b)
{
    if (a.cols() != b.rows())
        throw Error("DIMENSION_MISMATCH", "matrix product dimensions differ");
    RatMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("DIMENSION_MISMATCH", "matrix difference dimensions differ");
    RatMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            c(i, j) = a(i, j) - b(i, j);
    return c;
}

RationalVector operator*(const RationalVector& v, const RatMatrix& m)
{
    if (v.size() != m.rows())
        throw Error("DIMENSION_MISMATCH", "vector-matrix product dimensions differ");
    RationalVector out(m.cols(), Rational(0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (v[i] == 0)
            continue;
        for (std::size_t j = 0; j < m.cols(); ++j)
            out[j] += v[i] * m(i, j);
    }
    return out;
}

std::optional<RationalVector> solve_exact(RatMatrix a, RationalVector b)
{
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a(pivot, col) == 0)
            ++pivot;
        if (pivot == n)
            return std::nullopt;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(pivot, j), a(col, j));
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a(r, col) == 0)
                continue;
            Rational factor = a(r, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j)
                a(r, j) -= factor * a(col, j);
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        b[i] /= a(i, i);
    return b;
}

}  // namespace fluidnet
