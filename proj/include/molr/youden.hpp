#pragma once

// Balance classification of Latin rectangles (Youden and partially
// balanced variants), juxtaposition, and searches for orthogonal mates
// beyond the triple case.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "molr/core.hpp"
#include "molr/extension.hpp"

namespace molr {

// Symbol-set intersection size for each of the n(n-1)/2 unordered column
// pairs, in (c1, c2) row-major order.
inline std::vector<int> column_intersections(const Rectangle& r) {
    std::vector<std::uint64_t> col_syms(static_cast<std::size_t>(r.n), 0);
    for (const Perm& row : r.rows)
        for (int c = 0; c < r.n; ++c) col_syms[c] |= std::uint64_t{1} << row[c];
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(r.n) * (r.n - 1) / 2);
    for (int c1 = 0; c1 < r.n; ++c1)
        for (int c2 = c1 + 1; c2 < r.n; ++c2)
            out.push_back(std::popcount(col_syms[c1] & col_syms[c2]));
    return out;
}

struct BalanceReport {
    bool applicable = true;               // false for complete squares (k = n)
    std::optional<int> lambda_cc;         // constant intersection, = k(k-1)/(n-1)
    std::optional<int> lambda_cc_p;       // minimum intersection when positive
    int min_intersection = 0;
    int max_intersection = 0;
};

inline BalanceReport balance_report(const Rectangle& r) {
    BalanceReport rep;
    const int k = r.k(), n = r.n;
    const auto inter = column_intersections(r);
    long long sum = 0;
    rep.min_intersection = rep.max_intersection = inter.empty() ? 0 : inter.front();
    for (int v : inter) {
        sum += v;
        rep.min_intersection = std::min(rep.min_intersection, v);
        rep.max_intersection = std::max(rep.max_intersection, v);
    }
    // Each symbol lies in k columns, so the intersections sum to n * k(k-1)/2.
    if (sum * 2 != static_cast<long long>(n) * k * (k - 1))
        throw std::logic_error("balance_report: intersection sum identity failed");
    if (k == n) {
        rep.applicable = false;
        return rep;
    }
    if (rep.min_intersection > 0) rep.lambda_cc_p = rep.min_intersection;
    if (rep.min_intersection == rep.max_intersection) {
        // A constant intersection forces the Youden value by the sum identity.
        if (rep.min_intersection * (n - 1) != k * (k - 1))
            throw std::logic_error("balance_report: constant intersection != k(k-1)/(n-1)");
        if (rep.min_intersection > 0) rep.lambda_cc = rep.min_intersection;
    }
    return rep;
}

struct TupleBalance {
    bool applicable = true;
    std::vector<int> lambdas;  // per-member lambda_cc_p (0 when absent), ascending
    bool all_youden = false;
};

inline TupleBalance classify_tuple(const Tuple& tp) {
    TupleBalance out;
    out.all_youden = true;
    for (const Rectangle& m : tp.members) {
        BalanceReport rep = balance_report(m);
        if (!rep.applicable) return TupleBalance{false, {}, false};
        out.lambdas.push_back(rep.lambda_cc_p.value_or(0));
        out.all_youden = out.all_youden && rep.lambda_cc.has_value();
    }
    std::sort(out.lambdas.begin(), out.lambdas.end());
    return out;
}

// Side-by-side combination: member s = [a_s | b_s with symbols shifted by
// a's n]. Orthogonality and the Latin condition carry over per half.
inline Tuple juxtapose(const Tuple& a, const Tuple& b) {
    if (a.t() != b.t() || a.k() != b.k())
        throw std::invalid_argument("juxtapose: member count or row count mismatch");
    const int n1 = a.n(), n2 = b.n();
    if (n1 + n2 > kMaxSymbols)
        throw std::invalid_argument("juxtapose: combined width exceeds the symbol limit");
    Tuple out;
    out.members.resize(static_cast<std::size_t>(a.t()));
    for (int s = 0; s < a.t(); ++s) {
        out.members[s].n = n1 + n2;
        for (int r = 0; r < a.k(); ++r) {
            Perm row = a.row(s, r);
            row.reserve(static_cast<std::size_t>(n1 + n2));
            for (Symbol v : b.row(s, r)) row.push_back(static_cast<Symbol>(v + n1));
            out.members[s].rows.push_back(std::move(row));
        }
    }
    return out;
}

namespace detail {

// Row-by-row backtracking for full k x n rectangles orthogonal to every
// member of tp. fn(rect) returning true aborts. Rows are enumerated in
// descending lex order, nested by row index, so output order is the
// descending row-major order of the rectangles.
template <class F>
bool for_each_complement(const Tuple& tp, F&& fn) {
    const int t = tp.t(), k = tp.k(), n = tp.n();
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    // pair_used[s][x]: bitmask over new-rectangle symbols y already paired
    // with symbol x of member s.
    std::vector<std::vector<std::uint64_t>> pair_used(
        static_cast<std::size_t>(t),
        std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));
    std::vector<std::uint64_t> col_free(static_cast<std::size_t>(n), full);
    Rectangle acc;
    acc.n = n;
    Perm row(static_cast<std::size_t>(n));

    auto recurse = [&](auto&& self, int r) -> bool {
        if (r == k) return fn(static_cast<const Rectangle&>(acc));
        std::vector<const std::uint64_t*> tables;
        std::vector<const Perm*> earlier;
        tables.reserve(static_cast<std::size_t>(t));
        earlier.reserve(static_cast<std::size_t>(t));
        for (int s = 0; s < t; ++s) {
            tables.push_back(pair_used[s].data());
            earlier.push_back(&tp.row(s, r));
        }
        return enumerate_rows(n, col_free, row, 0, 0, tables, earlier, [&] {
            for (int c = 0; c < n; ++c) {
                col_free[c] &= ~(std::uint64_t{1} << row[c]);
                for (int s = 0; s < t; ++s)
                    pair_used[s][tp.row(s, r)[c]] |= std::uint64_t{1} << row[c];
            }
            acc.rows.push_back(row);
            Perm saved = row;  // deeper rows reuse the scratch buffer
            bool stop = self(self, r + 1);
            row = saved;
            acc.rows.pop_back();
            for (int c = 0; c < n; ++c) {
                col_free[c] |= std::uint64_t{1} << row[c];
                for (int s = 0; s < t; ++s)
                    pair_used[s][tp.row(s, r)[c]] &= ~(std::uint64_t{1} << row[c]);
            }
            return stop;
        });
    };
    return recurse(recurse, 0);
}

}  // namespace detail

// All k x n Latin rectangles orthogonal to every member, descending lex.
// Empty result = the tuple is maximal as a set of rectangles.
inline std::vector<Rectangle> orthogonal_complements(const Tuple& tp) {
    std::vector<Rectangle> out;
    detail::for_each_complement(tp, [&](const Rectangle& r) {
        out.push_back(r);
        return false;
    });
    return out;
}

inline std::strong_ordering rect_lex_cmp(const Rectangle& a, const Rectangle& b) {
    for (int r = 0; r < a.k(); ++r)
        if (auto c = perm_lex_cmp(a.rows[r], b.rows[r]); c != 0) return c;
    return std::strong_ordering::equal;
}

struct MaxTupleResult {
    Tuple best;
    bool certified = false;      // search exhausted within budget
    std::uint64_t nodes = 0;     // complement rectangles examined
};

// Depth-first search for a maximum-cardinality orthogonal extension of the
// seed, adding one rectangle at a time, optionally restricted to Youden
// members. Added rectangles are taken in strictly decreasing lex order so
// each set is visited once. Certifies maximality when exhaustive within
// the node budget.
inline MaxTupleResult max_youden_tuple(const Tuple& seed, bool require_youden,
                                       std::uint64_t node_budget = 10'000'000) {
    std::string why;
    if (!is_valid_tuple(seed, &why))
        throw std::invalid_argument("max_youden_tuple: " + why);
    MaxTupleResult res;
    res.best = seed;
    res.certified = true;
    // Aggarwal bound: no tuple of k x n MOLR has more than n - 1 members.
    if (seed.t() > seed.n() - 1)
        throw std::logic_error("max_youden_tuple: member count exceeds n - 1");

    auto grow = [&](auto&& self, Tuple& cur, const Rectangle* floor) -> void {
        if (cur.t() > cur.n() - 1)
            throw std::logic_error("max_youden_tuple: bound n - 1 exceeded");
        detail::for_each_complement(cur, [&](const Rectangle& cand) {
            if (++res.nodes > node_budget) {
                res.certified = false;
                return true;
            }
            if (floor && rect_lex_cmp(cand, *floor) >= 0) return false;  // keep sets sorted
            if (require_youden && !balance_report(cand).lambda_cc.has_value())
                return false;
            cur.members.push_back(cand);
            if (cur.t() > res.best.t()) res.best = cur;
            self(self, cur, &cur.members.back());
            cur.members.pop_back();
            return !res.certified;
        });
    };
    Tuple cur = seed;
    cur.members.reserve(static_cast<std::size_t>(cur.n()));  // keep floor pointers stable
    grow(grow, cur, nullptr);
    return res;
}

}  // namespace molr
