#include "fpa/polynomial.hpp"

#include <algorithm>

#include "fpa/error.hpp"

namespace fpa {

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }

Polynomial Polynomial::linear_shift(const Rational& a) { return Polynomial({-a, Rational{1}}); }

void Polynomial::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational Polynomial::operator()(const Rational& x) const {
    Rational acc{0};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * Rational(static_cast<long>(k)));
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    if (c_.empty()) return {};
    std::vector<Rational> a{Rational{0}};
    for (std::size_t k = 0; k < c_.size(); ++k) a.push_back(c_[k] / Rational(static_cast<long>(k + 1)));
    return Polynomial(std::move(a));
}

Rational Polynomial::integral(const Rational& a, const Rational& b) const {
    Polynomial F = antiderivative();
    return F(b) - F(a);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational{0});
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] = c_[k] + o.c_[k];
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational{0});
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(r));
}

Polynomial operator*(Polynomial a, const Rational& s) {
    for (auto& c : a.c_) c = c * s;
    a.trim();
    return a;
}

PiecewisePoly::PiecewisePoly(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces)
    : a_(std::move(breakpoints)), p_(std::move(pieces)) {
    if (a_.size() < 2 || p_.size() + 1 != a_.size()) {
        fail(ErrorKind::Domain, "piecewise polynomial needs one piece per interval");
    }
    for (std::size_t k = 1; k < a_.size(); ++k) {
        if (!(a_[k - 1] < a_[k])) fail(ErrorKind::Domain, "piecewise polynomial breakpoints must increase");
    }
}

int PiecewisePoly::piece_of(const Rational& x) const {
    if (x < a_.front() || x > a_.back()) {
        fail(ErrorKind::Domain, "piecewise polynomial evaluated outside [" + a_.front().str() + ", " +
                                    a_.back().str() + "] at " + x.str());
    }
    auto it = std::upper_bound(a_.begin(), a_.end(), x);
    int k = static_cast<int>(it - a_.begin()) - 1;
    return std::min(k, static_cast<int>(p_.size()) - 1);
}

Rational PiecewisePoly::operator()(const Rational& x) const { return p_[static_cast<std::size_t>(piece_of(x))](x); }

Rational PiecewisePoly::derivative(const Rational& x) const {
    return p_[static_cast<std::size_t>(piece_of(x))].derivative()(x);
}

Rational PiecewisePoly::integral(const Rational& lo, const Rational& hi) const {
    if (hi < lo) return -integral(hi, lo);
    Rational total{0};
    for (std::size_t k = 0; k < p_.size(); ++k) {
        Rational a = std::max(lo, a_[k]);
        Rational b = std::min(hi, a_[k + 1]);
        if (a < b) total = total + p_[k].integral(a, b);
    }
    return total;
}

PiecewisePoly PiecewisePoly::scaled(const Rational& s) const {
    std::vector<Polynomial> q;
    for (const auto& p : p_) q.push_back(p * s);
    return PiecewisePoly(a_, std::move(q));
}

}  // namespace fpa
