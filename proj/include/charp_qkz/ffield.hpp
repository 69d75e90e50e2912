#pragma once

// Exact arithmetic in F_p and F_{p^2} = F_p[g]/(g^2 - r), r a quadratic nonresidue.
//
// Contexts are interned: make_field() returns a reference that stays valid for
// the lifetime of the process, so elements and polynomials may hold a raw
// pointer to their context.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace charp_qkz {

class FieldError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DivisionByZero : public std::domain_error {
public:
    DivisionByZero() : std::domain_error("division by zero in finite field") {}
};

/// Raw coordinates (a0, a1) of a0 + a1*g. Used inside containers where the
/// context is stored once per container.
struct Coef {
    std::uint32_t a0 = 0;
    std::uint32_t a1 = 0;

    friend bool operator==(const Coef&, const Coef&) = default;
    [[nodiscard]] bool is_zero() const { return a0 == 0 && a1 == 0; }
};

namespace detail {

inline bool is_prime(std::uint32_t p) {
    if (p < 2) return false;
    for (std::uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline std::uint32_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint32_t p) {
    std::uint64_t r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

}  // namespace detail

class FieldCtx {
public:
    /// Largest supported characteristic. Keeps every intermediate product in 32 bits.
    static constexpr std::uint32_t kMaxPrime = 101;

    FieldCtx(std::uint32_t p, int ext_degree) : p_(p), ext_(ext_degree) {
        if (p == 2) throw FieldError("p = 2 is not supported");
        if (!detail::is_prime(p)) throw FieldError("p = " + std::to_string(p) + " is not prime");
        if (p > kMaxPrime) throw FieldError("p = " + std::to_string(p) + " exceeds the supported maximum 101");
        if (ext_degree != 1 && ext_degree != 2) throw FieldError("ext_degree must be 1 or 2");
        if (ext_ == 2) {
            // smallest r with r^((p-1)/2) = -1
            for (std::uint32_t r = 2; r < p; ++r) {
                if (detail::pow_mod(r, (p - 1) / 2, p) == p - 1) {
                    nonresidue_ = r;
                    break;
                }
            }
        }
    }

    [[nodiscard]] std::uint32_t p() const { return p_; }
    [[nodiscard]] int ext_degree() const { return ext_; }
    [[nodiscard]] std::uint32_t nonresidue() const { return nonresidue_; }
    [[nodiscard]] std::uint64_t order() const {
        return ext_ == 1 ? p_ : static_cast<std::uint64_t>(p_) * p_;
    }

    // ---- raw coefficient arithmetic -------------------------------------

    [[nodiscard]] Coef reduce(std::int64_t a0, std::int64_t a1 = 0) const {
        const auto pp = static_cast<std::int64_t>(p_);
        a0 %= pp;
        a1 %= pp;
        if (a0 < 0) a0 += pp;
        if (a1 < 0) a1 += pp;
        return {static_cast<std::uint32_t>(a0), static_cast<std::uint32_t>(a1)};
    }

    [[nodiscard]] Coef add(Coef x, Coef y) const {
        std::uint32_t s0 = x.a0 + y.a0;
        std::uint32_t s1 = x.a1 + y.a1;
        if (s0 >= p_) s0 -= p_;
        if (s1 >= p_) s1 -= p_;
        return {s0, s1};
    }
    [[nodiscard]] Coef neg(Coef x) const {
        return {x.a0 ? p_ - x.a0 : 0u, x.a1 ? p_ - x.a1 : 0u};
    }
    [[nodiscard]] Coef sub(Coef x, Coef y) const { return add(x, neg(y)); }
    [[nodiscard]] Coef mul(Coef x, Coef y) const {
        if (x.a1 == 0 && y.a1 == 0) return {x.a0 * y.a0 % p_, 0};
        const std::uint32_t c0 = (x.a0 * y.a0 + (x.a1 * y.a1 % p_) * nonresidue_) % p_;
        const std::uint32_t c1 = (x.a0 * y.a1 + x.a1 * y.a0) % p_;
        return {c0, c1};
    }
    [[nodiscard]] Coef inv(Coef x) const {
        if (x.is_zero()) throw DivisionByZero();
        if (x.a1 == 0) return {detail::pow_mod(x.a0, p_ - 2, p_), 0};
        // (a0 + a1 g)^{-1} = (a0 - a1 g) / (a0^2 - r a1^2)
        const std::uint32_t norm =
            (x.a0 * x.a0 % p_ + p_ - (x.a1 * x.a1 % p_) * nonresidue_ % p_) % p_;
        const std::uint32_t ninv = detail::pow_mod(norm, p_ - 2, p_);
        return {x.a0 * ninv % p_, (p_ - x.a1) % p_ * ninv % p_};
    }
    [[nodiscard]] Coef pow(Coef x, std::uint64_t e) const {
        Coef r{1, 0};
        while (e) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

private:
    std::uint32_t p_;
    int ext_;
    std::uint32_t nonresidue_ = 0;
};

/// Interned field context; the same (p, ext_degree) always yields the same object.
inline const FieldCtx& make_field(std::uint32_t p, int ext_degree = 1) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, int>, std::unique_ptr<FieldCtx>> registry;
    std::lock_guard lock(mu);
    auto& slot = registry[{p, ext_degree}];
    if (!slot) {
        try {
            slot = std::make_unique<FieldCtx>(p, ext_degree);
        } catch (...) {
            registry.erase({p, ext_degree});
            throw;
        }
    }
    return *slot;
}

/// Common context of two operands: same characteristic, the larger field wins.
inline const FieldCtx* join_ctx(const FieldCtx* a, const FieldCtx* b) {
    if (a == b) return a;
    if (a->p() != b->p())
        throw FieldError("field characteristic mismatch: " + std::to_string(a->p()) + " vs " +
                         std::to_string(b->p()));
    return a->ext_degree() >= b->ext_degree() ? a : b;
}

class FieldElement {
public:
    FieldElement(const FieldCtx& ctx, Coef c) : ctx_(&ctx), c_(c) {}
    FieldElement(const FieldCtx& ctx, std::int64_t a0, std::int64_t a1 = 0)
        : ctx_(&ctx), c_(ctx.reduce(a0, a1)) {
        if (a1 % static_cast<std::int64_t>(ctx.p()) != 0 && ctx.ext_degree() == 1)
            throw FieldError("g-component given for an element of the prime field");
    }

    static FieldElement zero(const FieldCtx& ctx) { return {ctx, Coef{0, 0}}; }
    static FieldElement one(const FieldCtx& ctx) { return {ctx, Coef{1, 0}}; }
    /// The generator g with g^2 = nonresidue; only in F_{p^2}.
    static FieldElement gen(const FieldCtx& ctx) {
        if (ctx.ext_degree() != 2) throw FieldError("g exists only in the quadratic extension");
        return {ctx, Coef{0, 1}};
    }

    [[nodiscard]] const FieldCtx& ctx() const { return *ctx_; }
    [[nodiscard]] Coef coef() const { return c_; }
    [[nodiscard]] std::uint32_t a0() const { return c_.a0; }
    [[nodiscard]] std::uint32_t a1() const { return c_.a1; }
    [[nodiscard]] bool is_zero() const { return c_.is_zero(); }
    [[nodiscard]] bool is_one() const { return c_.a0 == 1 && c_.a1 == 0; }
    [[nodiscard]] bool in_prime_field() const { return c_.a1 == 0; }

    /// Re-home this element in another context of the same characteristic.
    [[nodiscard]] FieldElement in(const FieldCtx& other) const {
        if (other.p() != ctx_->p()) throw FieldError("cannot move element across characteristics");
        if (other.ext_degree() == 1 && c_.a1 != 0)
            throw FieldError("element does not lie in the prime field");
        return {other, c_};
    }

    /// Representative in (-p/2, p/2] of an element of F_p.
    [[nodiscard]] std::int64_t symmetric() const {
        if (!in_prime_field()) throw FieldError("symmetric(): element not in the prime field");
        const auto p = static_cast<std::int64_t>(ctx_->p());
        const auto v = static_cast<std::int64_t>(c_.a0);
        return v > p / 2 ? v - p : v;
    }

    friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
        const FieldCtx* c = join_ctx(x.ctx_, y.ctx_);
        return {*c, c->add(x.c_, y.c_)};
    }
    friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
        const FieldCtx* c = join_ctx(x.ctx_, y.ctx_);
        return {*c, c->sub(x.c_, y.c_)};
    }
    friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
        const FieldCtx* c = join_ctx(x.ctx_, y.ctx_);
        return {*c, c->mul(x.c_, y.c_)};
    }
    friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
        const FieldCtx* c = join_ctx(x.ctx_, y.ctx_);
        return {*c, c->mul(x.c_, c->inv(y.c_))};
    }
    FieldElement operator-() const { return {*ctx_, ctx_->neg(c_)}; }
    FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
    FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
    FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }

    friend FieldElement operator*(const FieldElement& x, std::int64_t s) {
        return x * FieldElement(*x.ctx_, s);
    }
    friend FieldElement operator*(std::int64_t s, const FieldElement& x) { return x * s; }
    friend FieldElement operator+(const FieldElement& x, std::int64_t s) {
        return x + FieldElement(*x.ctx_, s);
    }
    friend FieldElement operator-(const FieldElement& x, std::int64_t s) {
        return x - FieldElement(*x.ctx_, s);
    }

    /// Equality of values; elements of F_p and F_{p^2} with equal coordinates compare equal.
    friend bool operator==(const FieldElement& x, const FieldElement& y) {
        return x.ctx_->p() == y.ctx_->p() && x.c_ == y.c_;
    }
    friend bool operator==(const FieldElement& x, std::int64_t s) {
        return x == FieldElement(*x.ctx_, s);
    }

    [[nodiscard]] std::string to_string() const {
        if (c_.a1 == 0) return std::to_string(symmetric());
        std::string s;
        if (c_.a0 != 0) s = std::to_string(c_.a0) + "+";
        s += (c_.a1 == 1 ? std::string{} : std::to_string(c_.a1) + "*") + "g";
        return s;
    }

private:
    const FieldCtx* ctx_;
    Coef c_;
};

inline std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.to_string(); }

inline FieldElement inv(const FieldElement& x) {
    return {x.ctx(), x.ctx().inv(x.coef())};
}

inline FieldElement pow(const FieldElement& x, std::uint64_t e) {
    return {x.ctx(), x.ctx().pow(x.coef(), e)};
}

/// Uniform element of the context (the RNG's raw output reduced mod p, so runs
/// are reproducible across standard libraries).
inline FieldElement random_element(const FieldCtx& ctx, std::mt19937_64& rng) {
    const std::uint64_t a0 = rng() % ctx.p();
    const std::uint64_t a1 = ctx.ext_degree() == 2 ? rng() % ctx.p() : 0;
    return {ctx, Coef{static_cast<std::uint32_t>(a0), static_cast<std::uint32_t>(a1)}};
}

inline FieldElement random_nonzero(const FieldCtx& ctx, std::mt19937_64& rng) {
    for (;;) {
        auto x = random_element(ctx, rng);
        if (!x.is_zero()) return x;
    }
}

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point of F_{p^2}^n off every hyperplane z_i - z_j = m, m in F_p, i.e. with
/// pairwise distinct g-components. Deterministic in the seed.
inline std::vector<FieldElement> sample_point(const FieldCtx& ctx, std::size_t n, std::uint64_t seed,
                                              int max_tries = 1000) {
    if (ctx.ext_degree() != 2)
        throw FieldError("sample_point needs the quadratic extension: over F_p every point is singular");
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<FieldElement> z;
        z.reserve(n);
        for (std::size_t i = 0; i < n; ++i) z.push_back(random_element(ctx, rng));
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = i + 1; j < n && ok; ++j)
                if ((z[i] - z[j]).in_prime_field()) ok = false;
        if (ok) return z;
    }
    throw SamplingError("no nonsingular point found within the retry cap");
}

/// Parses "c", "a+b*g", "b*g", "g", "a-b*g" into an element of ctx.
inline FieldElement parse_element(const FieldCtx& ctx, const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ') s += ch;
    if (s.empty()) throw FieldError("empty field element");
    std::int64_t a0 = 0;
    std::int64_t a1 = 0;
    std::size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        }
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        std::int64_t val = 1;
        const bool has_num = pos > start;
        if (has_num) val = std::stoll(s.substr(start, pos - start));
        bool is_g = false;
        if (pos < s.size() && s[pos] == '*') {
            ++pos;
            if (pos >= s.size() || s[pos] != 'g') throw FieldError("bad field element: " + text);
        }
        if (pos < s.size() && s[pos] == 'g') {
            is_g = true;
            ++pos;
        } else if (!has_num) {
            throw FieldError("bad field element: " + text);
        }
        (is_g ? a1 : a0) += sign * val;
    }
    if (a1 % static_cast<std::int64_t>(ctx.p()) != 0 && ctx.ext_degree() == 1)
        return FieldElement(make_field(ctx.p(), 2), a0, a1);
    return FieldElement(ctx, a0, a1);
}

}  // namespace charp_qkz
