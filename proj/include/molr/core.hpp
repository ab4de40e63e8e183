#pragma once

// Core value types for tuples of mutually orthogonal Latin rectangles:
// permutations, rectangles, tuples, isotopisms, and the orderings and
// validity predicates everything else is built on.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace molr {

// Symbols are 0..n-1; single-character serialization caps n at 35.
inline constexpr int kMaxSymbols = 35;

using Symbol = std::uint8_t;
using Perm = std::vector<Symbol>;  // images indexed by position

inline Perm identity_perm(int n) {
    Perm p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Symbol{0});
    return p;
}

inline bool is_permutation_of(const Perm& p, int n) {
    if (static_cast<int>(p.size()) != n) return false;
    std::uint64_t seen = 0;
    for (Symbol s : p) {
        if (s >= n) return false;
        if (seen & (std::uint64_t{1} << s)) return false;
        seen |= std::uint64_t{1} << s;
    }
    return true;
}

inline Perm inverse(const Perm& p) {
    Perm inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<Symbol>(i);
    return inv;
}

// (f o g)[i] = f[g[i]]
inline Perm compose(const Perm& f, const Perm& g) {
    Perm r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
    return r;
}

// Allocation-free compose for hot loops; out may not alias f or g.
inline void compose_into(Perm& out, const Perm& f, const Perm& g) {
    out.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f[g[i]];
}

// Lexicographic comparison by first differing position.
inline std::strong_ordering perm_lex_cmp(const Perm& a, const Perm& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("perm_lex_cmp: length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] <=> b[i];
    }
    return std::strong_ordering::equal;
}

struct Rectangle {
    int n = 0;
    std::vector<Perm> rows;

    int k() const { return static_cast<int>(rows.size()); }
};

// Rows are permutations and every column is duplicate-free.
inline bool is_latin(const Rectangle& r) {
    if (r.n < 1 || r.n > kMaxSymbols) return false;
    if (r.k() < 1 || r.k() > r.n) return false;
    for (const Perm& row : r.rows)
        if (!is_permutation_of(row, r.n)) return false;
    for (int c = 0; c < r.n; ++c) {
        std::uint64_t seen = 0;
        for (const Perm& row : r.rows) {
            std::uint64_t bit = std::uint64_t{1} << row[c];
            if (seen & bit) return false;
            seen |= bit;
        }
    }
    return true;
}

// All k*n ordered symbol pairs distinct.
inline bool are_orthogonal(const Rectangle& a, const Rectangle& b) {
    if (a.n != b.n || a.k() != b.k())
        throw std::invalid_argument("are_orthogonal: shape mismatch");
    std::vector<std::uint64_t> used(static_cast<std::size_t>(a.n), 0);
    for (int r = 0; r < a.k(); ++r) {
        for (int c = 0; c < a.n; ++c) {
            std::uint64_t bit = std::uint64_t{1} << b.rows[r][c];
            if (used[a.rows[r][c]] & bit) return false;
            used[a.rows[r][c]] |= bit;
        }
    }
    return true;
}

struct Tuple {
    std::vector<Rectangle> members;

    int t() const { return static_cast<int>(members.size()); }
    int k() const { return members.empty() ? 0 : members.front().k(); }
    int n() const { return members.empty() ? 0 : members.front().n; }

    const Perm& row(int member, int r) const { return members[member].rows[r]; }

    // The unique 1 x n tuple of identity rows, the root of every census run.
    static Tuple seed(int n, int t = 3) {
        Tuple s;
        s.members.resize(static_cast<std::size_t>(t));
        for (auto& m : s.members) {
            m.n = n;
            m.rows.push_back(identity_perm(n));
        }
        return s;
    }

    static Tuple checked(std::vector<Rectangle> members);
};

inline bool is_valid_tuple(const Tuple& tp, std::string* why = nullptr) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    if (tp.t() < 1) return fail("tuple has no members");
    const int n = tp.n(), k = tp.k();
    for (int s = 0; s < tp.t(); ++s) {
        const Rectangle& m = tp.members[s];
        if (m.n != n || m.k() != k)
            return fail("member " + std::to_string(s + 1) + " shape mismatch");
        if (!is_latin(m))
            return fail("member " + std::to_string(s + 1) + " violates the Latin condition");
    }
    for (int s1 = 0; s1 < tp.t(); ++s1)
        for (int s2 = s1 + 1; s2 < tp.t(); ++s2)
            if (!are_orthogonal(tp.members[s1], tp.members[s2]))
                return fail("members " + std::to_string(s1 + 1) + " and " +
                            std::to_string(s2 + 1) + " are not orthogonal");
    return true;
}

inline Tuple Tuple::checked(std::vector<Rectangle> members) {
    Tuple tp{std::move(members)};
    std::string why;
    if (!is_valid_tuple(tp, &why)) throw std::invalid_argument("invalid tuple: " + why);
    return tp;
}

// Row-major comparison: row 1 of every member, then row 2 of every member, ...
inline std::strong_ordering triple_lex_cmp(const Tuple& a, const Tuple& b) {
    if (a.t() != b.t() || a.k() != b.k() || a.n() != b.n())
        throw std::invalid_argument("triple_lex_cmp: shape mismatch");
    for (int r = 0; r < a.k(); ++r)
        for (int s = 0; s < a.t(); ++s)
            if (auto c = perm_lex_cmp(a.row(s, r), b.row(s, r)); c != 0) return c;
    return std::strong_ordering::equal;
}

// Normalization: (S1) identity first rows, (S2) second rows strictly
// decreasing across members, (S3) rows of member 1 strictly decreasing.
inline bool is_normalized(const Tuple& tp) {
    const int n = tp.n(), k = tp.k();
    for (int s = 0; s < tp.t(); ++s)
        for (int c = 0; c < n; ++c)
            if (tp.row(s, 0)[c] != c) return false;
    if (k >= 2) {
        for (int s = 0; s + 1 < tp.t(); ++s)
            if (perm_lex_cmp(tp.row(s, 1), tp.row(s + 1, 1)) <= 0) return false;
        for (int r = 1; r + 1 < k; ++r)
            if (perm_lex_cmp(tp.row(0, r), tp.row(0, r + 1)) <= 0) return false;
    }
    return true;
}

struct Isotopism {
    Perm rect_perm;                 // on member indices
    Perm row_perm;                  // on k rows
    Perm col_perm;                  // on n columns
    std::vector<Perm> symbol_perms; // one per member (indexed by output member)
};

// Output cell (s, r, c) = symbol_perms[s]( T[rect_perm[s]][row_perm[r]][col_perm[c]] ).
inline Tuple apply_isotopism(const Isotopism& g, const Tuple& tp) {
    const int t = tp.t(), k = tp.k(), n = tp.n();
    if (static_cast<int>(g.rect_perm.size()) != t ||
        static_cast<int>(g.row_perm.size()) != k ||
        static_cast<int>(g.col_perm.size()) != n ||
        static_cast<int>(g.symbol_perms.size()) != t)
        throw std::invalid_argument("apply_isotopism: incompatible shapes");
    Tuple out;
    out.members.resize(static_cast<std::size_t>(t));
    for (int s = 0; s < t; ++s) {
        Rectangle& m = out.members[s];
        m.n = n;
        m.rows.resize(static_cast<std::size_t>(k));
        const Rectangle& src = tp.members[g.rect_perm[s]];
        for (int r = 0; r < k; ++r) {
            m.rows[r].resize(static_cast<std::size_t>(n));
            const Perm& srow = src.rows[g.row_perm[r]];
            for (int c = 0; c < n; ++c)
                m.rows[r][c] = g.symbol_perms[s][srow[g.col_perm[c]]];
        }
    }
    return out;
}

// apply(composed(g2, g1), T) == apply(g2, apply(g1, T)).
inline Isotopism composed(const Isotopism& g2, const Isotopism& g1) {
    Isotopism g;
    g.rect_perm = compose(g1.rect_perm, g2.rect_perm);
    g.row_perm = compose(g1.row_perm, g2.row_perm);
    g.col_perm = compose(g1.col_perm, g2.col_perm);
    g.symbol_perms.resize(g2.symbol_perms.size());
    for (std::size_t s = 0; s < g.symbol_perms.size(); ++s)
        g.symbol_perms[s] = compose(g2.symbol_perms[s], g1.symbol_perms[g2.rect_perm[s]]);
    return g;
}

template <class Rng>
Perm random_perm(int n, Rng& rng) {
    Perm p = identity_perm(n);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

template <class Rng>
Isotopism random_isotopism(int t, int k, int n, Rng& rng) {
    Isotopism g;
    g.rect_perm = random_perm(t, rng);
    g.row_perm = random_perm(k, rng);
    g.col_perm = random_perm(n, rng);
    g.symbol_perms.resize(static_cast<std::size_t>(t));
    for (auto& sp : g.symbol_perms) sp = random_perm(n, rng);
    return g;
}

// Ordered-symbol-pair usage tables, one n x n bit table per unordered
// member pair. Supports O(1) checks and incremental row updates during
// backtracking.
class PairUsage {
public:
    PairUsage() = default;

    explicit PairUsage(const Tuple& tp) : t_(tp.t()), n_(tp.n()) {
        bits_.assign(static_cast<std::size_t>(pair_count()) * n_, 0);
        for (int r = 0; r < tp.k(); ++r) {
            std::vector<const Perm*> rows;
            rows.reserve(static_cast<std::size_t>(t_));
            for (int s = 0; s < t_; ++s) rows.push_back(&tp.row(s, r));
            add_row(rows);
        }
    }

    int pair_count() const { return t_ * (t_ - 1) / 2; }

    // Index of the unordered pair (s1, s2), s1 < s2.
    int pair_index(int s1, int s2) const {
        return s1 * t_ - s1 * (s1 + 1) / 2 + (s2 - s1 - 1);
    }

    bool used(int s1, int s2, Symbol x, Symbol y) const {
        return (table(s1, s2)[x] >> y) & 1;
    }

    // Bitmask over y of used pairs (x, y) for the pair (s1, s2).
    const std::uint64_t* table(int s1, int s2) const {
        return bits_.data() + static_cast<std::size_t>(pair_index(s1, s2)) * n_;
    }

    template <class Rows>  // Rows: indexable by member, row[c] -> Symbol
    void add_row(const Rows& rows) {
        for (int s1 = 0; s1 < t_; ++s1)
            for (int s2 = s1 + 1; s2 < t_; ++s2) {
                std::uint64_t* tab = mutable_table(s1, s2);
                for (int c = 0; c < n_; ++c)
                    tab[(*rows[s1])[c]] |= std::uint64_t{1} << (*rows[s2])[c];
            }
    }

    template <class Rows>
    void remove_row(const Rows& rows) {
        for (int s1 = 0; s1 < t_; ++s1)
            for (int s2 = s1 + 1; s2 < t_; ++s2) {
                std::uint64_t* tab = mutable_table(s1, s2);
                for (int c = 0; c < n_; ++c)
                    tab[(*rows[s1])[c]] &= ~(std::uint64_t{1} << (*rows[s2])[c]);
            }
    }

    bool operator==(const PairUsage&) const = default;

private:
    std::uint64_t* mutable_table(int s1, int s2) {
        return bits_.data() + static_cast<std::size_t>(pair_index(s1, s2)) * n_;
    }

    int t_ = 0;
    int n_ = 0;
    std::vector<std::uint64_t> bits_;
};

}  // namespace molr
