#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <sstream>
#include <string>

namespace cmckit {

// Gaussian rational a + b*i with exact arithmetic. mpq_class keeps every
// value in canonical reduced form (coprime, positive denominator).
struct GaussQ {
    mpq_class re;
    mpq_class im;

    GaussQ() : re(0), im(0) {}
    GaussQ(long n) : re(n), im(0) {}
    GaussQ(long num, long den) : re(mpq_class(num, den)), im(0) { re.canonicalize(); }
    GaussQ(const mpq_class& r) : re(r), im(0) { re.canonicalize(); }
    GaussQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    static GaussQ i() { return GaussQ(mpq_class(0), mpq_class(1)); }
    static GaussQ fromRatio(long rn, long rd, long in_, long id) {
        mpq_class r(rn, rd), i(in_, id);
        r.canonicalize();
        i.canonicalize();
        return GaussQ(r, i);
    }

    bool isZero() const { return re == 0 && im == 0; }
    bool isOne() const { return re == 1 && im == 0; }
    bool isReal() const { return im == 0; }

    GaussQ conj() const { return GaussQ(re, -im); }
    mpq_class normSq() const { return re * re + im * im; }

    GaussQ operator-() const { return GaussQ(-re, -im); }
    GaussQ& operator+=(const GaussQ& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussQ& operator-=(const GaussQ& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussQ& operator*=(const GaussQ& o) {
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussQ& operator/=(const GaussQ& o) {
        mpq_class n = o.normSq();
        if (n == 0) throw std::domain_error("GaussQ: division by zero");
        mpq_class r = (re * o.re + im * o.im) / n;
        mpq_class i = (im * o.re - re * o.im) / n;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
    friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
    friend GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
    friend GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
    friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }
    // Total order for use as map key; not a numeric order.
    friend bool operator<(const GaussQ& a, const GaussQ& b) {
        int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }

    GaussQ inverse() const {
        mpq_class n = normSq();
        if (n == 0) throw std::domain_error("GaussQ: inverse of zero");
        return GaussQ(re / n, -im / n);
    }

    // |a+bi| is a unit Gaussian rational, i.e. one of 1, -1, i, -i.
    bool isUnit() const { return normSq() == 1 && (re == 0 || im == 0); }

    double toDouble() const { return re.get_d(); }

    std::string str() const {
        std::ostringstream os;
        if (im == 0) {
            os << re;
        } else if (re == 0) {
            os << im << "*i";
        } else {
            os << re << (im > 0 ? "+" : "") << im << "*i";
        }
        return os.str();
    }
};

inline GaussQ gq(long num, long den = 1) { return GaussQ(num, den); }

inline std::ostream& operator<<(std::ostream& os, const GaussQ& x) { return os << x.str(); }

} // namespace cmckit
