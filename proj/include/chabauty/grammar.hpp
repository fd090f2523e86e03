#pragma once

// Symbolic language for locally compact abelian groups.
//
//   expr    := term ( "x" term )*
//   term    := atom ( "^" nat )?
//   atom    := "R" | "T" | "Z" | "Q" | "Z(" nat ")" | "Prufer(" prime ")"
//            | "Zp(" prime ")" | "Qp(" prime ")" | "QSub{" heights "}"
//            | "Sol{" heights "}" | "BohrZ" | "BohrR" | "LP[" lpentries "]"
//            | "0" | "BohrZ0" | "Zhat"
//   heights := (prime ":" (nat|"inf")) ("," prime ":" (nat|"inf"))*
//              ("; default" ("0"|"inf"))?
//            | "default" ("0"|"inf")
//   lpentries := (prime ":" atom) ("," prime ":" atom)*
//
// Whitespace is insignificant. "0" is the trivial group, "BohrZ0" the
// identity component of BohrZ and "Zhat" the product of Zp(p) over all
// primes; the last two only appear as computed invariants.

#include "chabauty/errors.hpp"
#include "chabauty/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chabauty {

enum class Kind : std::uint8_t {
    R,
    T,
    Z,
    Q,
    Cyclic,
    Prufer,
    PadicInt,
    PadicRat,
    QSub,
    Solenoid,
    BohrZ,
    BohrR,
    BohrZ0,
    AllPrimesProfinite,
    Prod,
    LocalProd,
};

/// A p-height: a natural number or infinity.
struct Height {
    bool infinite = false;
    std::uint32_t value = 0;

    static constexpr Height inf() { return {true, 0}; }
    static constexpr Height finite(std::uint32_t v) { return {false, v}; }

    friend constexpr bool operator==(const Height &, const Height &) = default;
    friend constexpr std::strong_ordering operator<=>(const Height &a, const Height &b) {
        if (a.infinite != b.infinite)
            return a.infinite ? std::strong_ordering::greater : std::strong_ordering::less;
        return a.value <=> b.value;
    }
};

/// Height function on the primes: finitely many overrides plus a fallback
/// (0 or infinity) for every other prime.
struct HeightType {
    std::map<std::uint64_t, Height> overrides;
    Height fallback{};

    Height at(std::uint64_t p) const {
        auto it = overrides.find(p);
        return it == overrides.end() ? fallback : it->second;
    }

    void minimize() {
        std::erase_if(overrides, [&](const auto &kv) { return kv.second == fallback; });
    }

    bool all_zero() const { return overrides.empty() && fallback == Height::finite(0); }
    bool all_infinite() const { return overrides.empty() && fallback.infinite; }

    friend bool operator==(const HeightType &, const HeightType &) = default;
};

struct GroupExpr {
    Kind kind = Kind::Prod;
    // Modulus for Cyclic, prime for Prufer/PadicInt/PadicRat.
    std::uint64_t param = 0;
    HeightType heights;
    // Prod factors, or LocalProd components (keyed by their own prime).
    std::vector<GroupExpr> factors;

    bool is_trivial() const { return kind == Kind::Prod && factors.empty(); }

    /// Prime of a p-local atom (Cyclic of prime-power order included).
    std::uint64_t prime() const {
        switch (kind) {
        case Kind::Cyclic:
            return smallest_prime_factor(param);
        case Kind::Prufer:
        case Kind::PadicInt:
        case Kind::PadicRat:
            return param;
        default:
            return 0;
        }
    }

    friend bool operator==(const GroupExpr &, const GroupExpr &) = default;
};

namespace atoms {
inline GroupExpr trivial() { return GroupExpr{}; }
inline GroupExpr R() { return {Kind::R}; }
inline GroupExpr T() { return {Kind::T}; }
inline GroupExpr Z() { return {Kind::Z}; }
inline GroupExpr Q() { return {Kind::Q}; }
inline GroupExpr cyclic(std::uint64_t n) { return {Kind::Cyclic, n}; }
inline GroupExpr prufer(std::uint64_t p) { return {Kind::Prufer, p}; }
inline GroupExpr padic_int(std::uint64_t p) { return {Kind::PadicInt, p}; }
inline GroupExpr padic_rat(std::uint64_t p) { return {Kind::PadicRat, p}; }
inline GroupExpr qsub(HeightType h) { return {Kind::QSub, 0, std::move(h)}; }
inline GroupExpr solenoid(HeightType h) { return {Kind::Solenoid, 0, std::move(h)}; }
inline GroupExpr bohr_z() { return {Kind::BohrZ}; }
inline GroupExpr bohr_r() { return {Kind::BohrR}; }
inline GroupExpr bohr_z0() { return {Kind::BohrZ0}; }
inline GroupExpr zhat() { return {Kind::AllPrimesProfinite}; }
inline GroupExpr prod(std::vector<GroupExpr> fs) { return {Kind::Prod, 0, {}, std::move(fs)}; }
inline GroupExpr local_prod(std::vector<GroupExpr> fs) {
    return {Kind::LocalProd, 0, {}, std::move(fs)};
}
inline GroupExpr power(const GroupExpr &g, std::size_t n) {
    return prod(std::vector<GroupExpr>(n, g));
}
} // namespace atoms

// ---------------------------------------------------------------- ordering

namespace detail {

inline std::strong_ordering compare_heights(const HeightType &a, const HeightType &b) {
    if (auto c = a.fallback <=> b.fallback; c != 0)
        return c;
    auto ia = a.overrides.begin(), ib = b.overrides.begin();
    for (; ia != a.overrides.end() && ib != b.overrides.end(); ++ia, ++ib) {
        if (auto c = ia->first <=> ib->first; c != 0)
            return c;
        if (auto c = ia->second <=> ib->second; c != 0)
            return c;
    }
    return a.overrides.size() <=> b.overrides.size();
}

} // namespace detail

/// Total order used by normalize: tag, then prime, then exponent.
inline std::strong_ordering compare(const GroupExpr &a, const GroupExpr &b) {
    if (auto c = a.kind <=> b.kind; c != 0)
        return c;
    if (auto c = a.prime() <=> b.prime(); c != 0)
        return c;
    if (auto c = a.param <=> b.param; c != 0)
        return c;
    if (auto c = detail::compare_heights(a.heights, b.heights); c != 0)
        return c;
    for (std::size_t i = 0; i < std::min(a.factors.size(), b.factors.size()); ++i)
        if (auto c = compare(a.factors[i], b.factors[i]); c != 0)
            return c;
    return a.factors.size() <=> b.factors.size();
}

// ---------------------------------------------------------------- render

namespace detail {

inline std::string render_height(const Height &h) {
    return h.infinite ? std::string("inf") : std::to_string(h.value);
}

inline std::string render_heights(const HeightType &h) {
    std::string out;
    for (const auto &[p, v] : h.overrides) {
        if (!out.empty())
            out += ", ";
        out += std::to_string(p) + ":" + render_height(v);
    }
    if (!out.empty())
        out += "; ";
    out += "default " + render_height(h.fallback);
    return out;
}

inline void render_into(const GroupExpr &g, std::string &out);

inline void render_factors(const GroupExpr &g, std::string &out) {
    bool first = true;
    for (const auto &f : g.factors) {
        if (f.is_trivial() && g.factors.size() > 1)
            continue;
        if (!first)
            out += " x ";
        first = false;
        render_into(f, out);
    }
    if (first)
        out += "0";
}

inline void render_into(const GroupExpr &g, std::string &out) {
    switch (g.kind) {
    case Kind::R: out += "R"; break;
    case Kind::T: out += "T"; break;
    case Kind::Z: out += "Z"; break;
    case Kind::Q: out += "Q"; break;
    case Kind::Cyclic: out += "Z(" + std::to_string(g.param) + ")"; break;
    case Kind::Prufer: out += "Prufer(" + std::to_string(g.param) + ")"; break;
    case Kind::PadicInt: out += "Zp(" + std::to_string(g.param) + ")"; break;
    case Kind::PadicRat: out += "Qp(" + std::to_string(g.param) + ")"; break;
    case Kind::QSub: out += "QSub{" + render_heights(g.heights) + "}"; break;
    case Kind::Solenoid: out += "Sol{" + render_heights(g.heights) + "}"; break;
    case Kind::BohrZ: out += "BohrZ"; break;
    case Kind::BohrR: out += "BohrR"; break;
    case Kind::BohrZ0: out += "BohrZ0"; break;
    case Kind::AllPrimesProfinite: out += "Zhat"; break;
    case Kind::Prod: render_factors(g, out); break;
    case Kind::LocalProd: {
        out += "LP[";
        bool first = true;
        for (const auto &c : g.factors) {
            if (!first)
                out += ", ";
            first = false;
            out += std::to_string(c.prime()) + ":";
            render_into(c, out);
        }
        out += "]";
        break;
    }
    }
}

} // namespace detail

inline std::string render(const GroupExpr &g) {
    std::string out;
    detail::render_into(g, out);
    return out;
}

inline std::ostream &operator<<(std::ostream &os, const GroupExpr &g) { return os << render(g); }

// ---------------------------------------------------------------- parse

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) {
        for (std::size_t i = 0; i < text.size(); ++i) {
            unsigned char c = static_cast<unsigned char>(text[i]);
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                continue;
            buf_.push_back(text[i]);
            offsets_.push_back(i);
        }
        end_offset_ = text.size();
    }

    GroupExpr parse_expr() {
        std::vector<GroupExpr> terms;
        append_term(terms);
        while (accept("x"))
            append_term(terms);
        if (pos_ != buf_.size())
            fail("unexpected trailing input");
        if (terms.size() == 1)
            return std::move(terms.front());
        return atoms::prod(std::move(terms));
    }

private:
    std::string buf_;
    std::vector<std::size_t> offsets_;
    std::size_t end_offset_ = 0;
    std::size_t pos_ = 0;

    std::size_t offset() const { return pos_ < offsets_.size() ? offsets_[pos_] : end_offset_; }

    [[noreturn]] void fail(const std::string &what) const { throw SyntaxError(offset(), what); }

    bool accept(std::string_view tok) {
        if (std::string_view(buf_).substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok) {
        if (!accept(tok))
            fail("expected '" + std::string(tok) + "'");
    }

    std::uint64_t nat() {
        std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < buf_.size() && buf_[pos_] >= '0' && buf_[pos_] <= '9') {
            auto digit = static_cast<std::uint64_t>(buf_[pos_] - '0');
            if (v > (UINT64_MAX - digit) / 10) {
                pos_ = start;
                fail("number too large");
            }
            v = v * 10 + digit;
            ++pos_;
        }
        if (pos_ == start)
            fail("expected a natural number");
        return v;
    }

    std::uint64_t prime() {
        std::size_t at = offset();
        std::uint64_t p = nat();
        if (!is_prime(p))
            throw PrimeError(at, p);
        return p;
    }

    void append_term(std::vector<GroupExpr> &terms) {
        GroupExpr a = atom();
        if (accept("^")) {
            std::size_t at = offset();
            std::uint64_t n = nat();
            if (n == 0)
                throw SyntaxError(at, "exponent must be at least 1");
            if (n > 64)
                throw SyntaxError(at, "exponent too large");
            for (std::uint64_t i = 0; i < n; ++i)
                terms.push_back(a);
            return;
        }
        terms.push_back(std::move(a));
    }

    Height height() {
        if (accept("inf"))
            return Height::inf();
        std::size_t at = offset();
        std::uint64_t v = nat();
        if (v > UINT32_MAX)
            throw SyntaxError(at, "height too large");
        return Height::finite(static_cast<std::uint32_t>(v));
    }

    Height default_height() {
        if (accept("inf"))
            return Height::inf();
        if (accept("0"))
            return Height::finite(0);
        fail("default height must be 0 or inf");
    }

    HeightType heights() {
        HeightType h;
        if (accept("default")) {
            h.fallback = default_height();
            return h;
        }
        do {
            std::size_t at = offset();
            std::uint64_t p = prime();
            expect(":");
            if (!h.overrides.emplace(p, height()).second)
                throw SyntaxError(at, "prime listed twice");
        } while (accept(","));
        if (accept(";")) {
            expect("default");
            h.fallback = default_height();
        }
        h.minimize();
        return h;
    }

    GroupExpr local_entries() {
        std::vector<GroupExpr> comps;
        do {
            std::size_t at = offset();
            std::uint64_t p = prime();
            expect(":");
            std::size_t atomAt = offset();
            GroupExpr c = atom();
            bool local = c.kind == Kind::Cyclic || c.kind == Kind::Prufer ||
                         c.kind == Kind::PadicInt || c.kind == Kind::PadicRat;
            if (!local)
                throw SyntaxError(atomAt, "local product components must be Z(p^k), Prufer, Zp or Qp");
            if (c.kind == Kind::Cyclic && factorize(c.param).size() != 1)
                throw SyntaxError(atomAt, "cyclic component must have prime-power order");
            if (c.prime() != p)
                throw SyntaxError(atomAt, "component prime does not match its key");
            for (const auto &prev : comps)
                if (prev.prime() == p)
                    throw SyntaxError(at, "prime listed twice");
            comps.push_back(std::move(c));
        } while (accept(","));
        return atoms::local_prod(std::move(comps));
    }

    GroupExpr atom() {
        if (accept("BohrZ0"))
            return atoms::bohr_z0();
        if (accept("BohrZ"))
            return atoms::bohr_z();
        if (accept("BohrR"))
            return atoms::bohr_r();
        if (accept("Prufer(")) {
            auto p = prime();
            expect(")");
            return atoms::prufer(p);
        }
        if (accept("Zp(")) {
            auto p = prime();
            expect(")");
            return atoms::padic_int(p);
        }
        if (accept("Qp(")) {
            auto p = prime();
            expect(")");
            return atoms::padic_rat(p);
        }
        if (accept("QSub{")) {
            auto h = heights();
            expect("}");
            return atoms::qsub(std::move(h));
        }
        if (accept("Sol{")) {
            auto h = heights();
            expect("}");
            return atoms::solenoid(std::move(h));
        }
        if (accept("LP[")) {
            auto lp = local_entries();
            expect("]");
            return lp;
        }
        if (accept("Zhat"))
            return atoms::zhat();
        if (accept("Z(")) {
            std::size_t at = offset();
            auto n = nat();
            if (n < 2)
                throw SyntaxError(at, "cyclic modulus must be at least 2");
            expect(")");
            return atoms::cyclic(n);
        }
        if (accept("R"))
            return atoms::R();
        if (accept("T"))
            return atoms::T();
        if (accept("Z"))
            return atoms::Z();
        if (accept("Q"))
            return atoms::Q();
        if (accept("0"))
            return atoms::trivial();
        fail("expected a group atom");
    }
};

} // namespace detail

/// Parses the textual group language; throws SyntaxError / PrimeError.
inline GroupExpr parse(std::string_view text) { return detail::Parser(text).parse_expr(); }

// ---------------------------------------------------------------- normalize

namespace detail {

inline void normalize_into(const GroupExpr &g, std::vector<GroupExpr> &out) {
    switch (g.kind) {
    case Kind::Cyclic:
        for (const auto &[p, k] : factorize(g.param))
            out.push_back(atoms::cyclic(ipow(p, k)));
        return;
    case Kind::QSub: {
        HeightType h = g.heights;
        h.minimize();
        if (h.all_zero())
            out.push_back(atoms::Z());
        else if (h.all_infinite())
            out.push_back(atoms::Q());
        else
            out.push_back(atoms::qsub(std::move(h)));
        return;
    }
    case Kind::Solenoid: {
        HeightType h = g.heights;
        h.minimize();
        if (h.all_zero())
            out.push_back(atoms::T());
        else
            out.push_back(atoms::solenoid(std::move(h)));
        return;
    }
    case Kind::Prod:
    case Kind::LocalProd:
        // A local product over finitely many primes is the plain product.
        for (const auto &f : g.factors)
            normalize_into(f, out);
        return;
    default:
        out.push_back(GroupExpr{g.kind, g.param});
        return;
    }
}

} // namespace detail

/// Canonical form: flattened, CRT-split, sorted; isomorphic expressions
/// within the grammar have equal normal forms.
inline GroupExpr normalize(const GroupExpr &g) {
    std::vector<GroupExpr> fs;
    detail::normalize_into(g, fs);
    std::sort(fs.begin(), fs.end(), [](const GroupExpr &a, const GroupExpr &b) { return compare(a, b) < 0; });
    if (fs.size() == 1)
        return std::move(fs.front());
    return atoms::prod(std::move(fs));
}

/// Factors of a normalized expression (a lone atom is its own factor list).
inline std::vector<GroupExpr> factors_of(const GroupExpr &normalized) {
    if (normalized.kind == Kind::Prod)
        return normalized.factors;
    return {normalized};
}

inline bool isomorphic(const GroupExpr &a, const GroupExpr &b) { return normalize(a) == normalize(b); }

} // namespace chabauty
