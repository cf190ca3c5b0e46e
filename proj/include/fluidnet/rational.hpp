#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace fluidnet {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

// Parses INT or INT "/" INT; throws Error(BAD_RATIONAL) otherwise.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

// Average sojourn times may be infinite for terminal markings; nullopt stands for +inf.
using ExtRational = std::optional<Rational>;
std::string to_string(const ExtRational& r);
double to_double(const ExtRational& r);

// Dense row-major matrix of exact rationals.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(std::size_t rows, std::size_t cols);

    static RatMatrix identity(std::size_t n);
    static RatMatrix diagonal(const RationalVector& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RatMatrix transpose() const;
    RationalVector row(std::size_t i) const;

    friend bool operator==(const RatMatrix& a, const RatMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
// Row vector times matrix.
RationalVector operator*(const RationalVector& v, const RatMatrix& m);

// Solves A x = b exactly by Gaussian elimination; nullopt when A is singular.
std::optional<RationalVector> solve_exact(RatMatrix a, RationalVector b);

std::vector<double> to_double(const RationalVector& v);

}  // namespace fluidnet
