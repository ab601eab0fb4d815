#include "fpa/rational.hpp"

#include <cctype>
#include <ostream>

#include "fpa/error.hpp"

namespace fpa {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Io: return "io";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Budget: return "budget";
        case ErrorKind::Unsupported: return "unsupported";
    }
    return "unknown";
}

Rational::Rational(long num, long den) {
    if (den == 0) fail(ErrorKind::Domain, "zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) fail(ErrorKind::Domain, "division by zero");
    q_ /= o.q_;
    return *this;
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
        negative = true;
        body.remove_prefix(1);
    }
    auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
        fail(ErrorKind::Parse, "not an exact rational literal: '" + std::string(text) + "' (expected p/q)");
    }
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) fail(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
    if (negative) n = -n;
    Rational r;
    r.q_ = mpq_class(n, d);
    r.q_.canonicalize();
    return r;
}

std::string Rational::str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::size_t Rational::hash() const {
    std::size_t h1 = mpz_get_ui(q_.get_num_mpz_t());
    std::size_t h2 = mpz_get_ui(q_.get_den_mpz_t());
    std::size_t s = static_cast<std::size_t>(sign() + 1);
    return h1 * 0x9e3779b97f4a7c15ULL ^ (h2 + 0x632be59bd9b4e019ULL + (s << 7));
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational pow(const Rational& base, unsigned exponent) {
    Rational result(1);
    Rational b = base;
    while (exponent > 0) {
        if (exponent & 1U) result *= b;
        b *= b;
        exponent >>= 1U;
    }
    return result;
}

Rational factorial(unsigned k) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), k);
    return Rational(mpq_class(f));
}

unsigned ceil_log2(const Rational& r) {
    unsigned k = 0;
    Rational p(1);
    while (p < r) {
        p *= Rational(2);
        ++k;
    }
    return k;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace fpa
