#pragma once

#include <vector>

#include "fpa/rational.hpp"

namespace fpa {

// Dense univariate polynomial with rational coefficients, lowest degree first.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs);
    static Polynomial constant(const Rational& c);
    // x - a
    static Polynomial linear_shift(const Rational& a);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    Rational operator()(const Rational& x) const;
    Polynomial derivative() const;
    Polynomial antiderivative() const;  // zero constant term
    Rational integral(const Rational& a, const Rational& b) const;

    Polynomial& operator+=(const Polynomial& o);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& s);
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim();
    std::vector<Rational> c_;
};

// Polynomial pieces on consecutive intervals [a_k, a_{k+1}] of an ordered
// breakpoint list; piece k is expressed in the global variable.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces);

    const std::vector<Rational>& breakpoints() const { return a_; }
    const std::vector<Polynomial>& pieces() const { return p_; }
    int piece_of(const Rational& x) const;  // right-continuous, last piece closed

    Rational operator()(const Rational& x) const;
    Rational derivative(const Rational& x) const;  // right derivative inside the domain
    Rational integral(const Rational& lo, const Rational& hi) const;
    PiecewisePoly scaled(const Rational& s) const;

private:
    std::vector<Rational> a_;
    std::vector<Polynomial> p_;
};

}  // namespace fpa
