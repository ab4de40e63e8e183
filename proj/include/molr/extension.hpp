#pragma once

// One-row extension of a tuple (Algorithm-1 style backtracking) plus the
// maximality and open-position tests built on it.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "molr/core.hpp"

namespace molr {

using RowTriple = std::vector<Perm>;  // one new row per member

namespace detail {

// Wraps a visitor so that void-returning callbacks mean "keep going" while
// bool-returning ones can abort the enumeration by returning true.
template <class F>
auto as_abortable(F& fn) {
    return [&fn](const RowTriple& rt) -> bool {
        if constexpr (std::is_void_v<std::invoke_result_t<F&, const RowTriple&>>) {
            fn(rt);
            return false;
        } else {
            return fn(rt);
        }
    };
}

// Bitmask of symbols still free in each column of a member.
inline std::vector<std::uint64_t> column_free_masks(const Rectangle& r) {
    const std::uint64_t full = (r.n == 64) ? ~std::uint64_t{0}
                                           : ((std::uint64_t{1} << r.n) - 1);
    std::vector<std::uint64_t> free_mask(static_cast<std::size_t>(r.n), full);
    for (const Perm& row : r.rows)
        for (int c = 0; c < r.n; ++c)
            free_mask[c] &= ~(std::uint64_t{1} << row[c]);
    return free_mask;
}

// Enumerates valid next rows for one member, constrained by column masks and
// (for members after the first) by unused-pair masks against the rows chosen
// for earlier members. Symbols are tried in descending order so complete rows
// come out in descending lexicographic order. emit() returning true aborts
// the whole enumeration.
template <class Emit>
bool enumerate_rows(int n, const std::vector<std::uint64_t>& col_free, Perm& row,
                    int col, std::uint64_t row_used,
                    const std::vector<const std::uint64_t*>& pair_tables,
                    const std::vector<const Perm*>& earlier_rows, Emit&& emit) {
    if (col == n) return emit();
    std::uint64_t allowed = col_free[col] & ~row_used;
    for (std::size_t i = 0; i < pair_tables.size(); ++i) {
        Symbol x = (*earlier_rows[i])[col];
        allowed &= ~pair_tables[i][x];
    }
    while (allowed) {
        const int y = 63 - std::countl_zero(allowed);
        allowed &= ~(std::uint64_t{1} << y);
        row[col] = static_cast<Symbol>(y);
        if (enumerate_rows(n, col_free, row, col + 1,
                           row_used | (std::uint64_t{1} << y), pair_tables,
                           earlier_rows, emit))
            return true;
    }
    return false;
}

struct ExtensionContext {
    int t = 0, k = 0, n = 0;
    std::vector<std::vector<std::uint64_t>> col_free;  // per member
    PairUsage usage;

    explicit ExtensionContext(const Tuple& tp)
        : t(tp.t()), k(tp.k()), n(tp.n()), usage(tp) {
        if (k >= n)
            throw std::invalid_argument("extend: tuple already has n rows");
        col_free.reserve(static_cast<std::size_t>(t));
        for (const Rectangle& m : tp.members) col_free.push_back(column_free_masks(m));
    }
};

// Depth-first over members s..t-1; earlier members' new rows are fixed.
// fn returning true aborts the enumeration.
template <class F>
bool extend_members(const ExtensionContext& ctx, std::vector<Perm>& rows, int s,
                    F&& fn) {
    if (s == ctx.t) return fn(static_cast<const RowTriple&>(rows));
    std::vector<const std::uint64_t*> pair_tables;
    std::vector<const Perm*> earlier;
    pair_tables.reserve(static_cast<std::size_t>(s));
    earlier.reserve(static_cast<std::size_t>(s));
    for (int s0 = 0; s0 < s; ++s0) {
        pair_tables.push_back(ctx.usage.table(s0, s));
        earlier.push_back(&rows[s0]);
    }
    return enumerate_rows(ctx.n, ctx.col_free[s], rows[s], 0, 0, pair_tables, earlier,
                          [&] { return extend_members(ctx, rows, s + 1, fn); });
}

}  // namespace detail

// All permutations usable as the next row of a Latin rectangle, in
// descending lexicographic order.
inline std::vector<Perm> candidate_rows(const Rectangle& r) {
    if (r.k() >= r.n)
        throw std::invalid_argument("candidate_rows: rectangle already has n rows");
    auto col_free = detail::column_free_masks(r);
    std::vector<Perm> out;
    Perm row(static_cast<std::size_t>(r.n));
    detail::enumerate_rows(r.n, col_free, row, 0, 0, {}, {}, [&] {
        out.push_back(row);
        return false;
    });
    return out;
}

// Calls fn(rows) for every valid one-row extension. Order is deterministic:
// descending lex for member 1's row, then member 2's, and so on (nested).
// A bool-returning fn aborts by returning true; the return value says
// whether the enumeration was aborted.
template <class F>
bool for_each_extension(const Tuple& tp, F&& fn) {
    detail::ExtensionContext ctx(tp);
    std::vector<Perm> rows(static_cast<std::size_t>(ctx.t),
                           Perm(static_cast<std::size_t>(ctx.n)));
    return detail::extend_members(ctx, rows, 0, detail::as_abortable(fn));
}

// Same, but with member 1's new row fixed. Used to split one tuple's
// extension work into independent chunks.
template <class F>
bool for_each_extension_with_first(const Tuple& tp, const Perm& first_row, F&& fn) {
    detail::ExtensionContext ctx(tp);
    std::vector<Perm> rows(static_cast<std::size_t>(ctx.t),
                           Perm(static_cast<std::size_t>(ctx.n)));
    rows[0] = first_row;
    return detail::extend_members(ctx, rows, 1, detail::as_abortable(fn));
}

inline std::vector<RowTriple> extend_tuple(const Tuple& tp) {
    std::vector<RowTriple> out;
    for_each_extension(tp, [&](const RowTriple& rt) { out.push_back(rt); });
    return out;
}

inline bool has_extension(const Tuple& tp) {
    detail::ExtensionContext ctx(tp);
    std::vector<Perm> rows(static_cast<std::size_t>(ctx.t),
                           Perm(static_cast<std::size_t>(ctx.n)));
    return detail::extend_members(ctx, rows, 0, [&](const RowTriple&) { return true; });
}

inline Tuple with_row(const Tuple& tp, const RowTriple& rows) {
    Tuple out = tp;
    for (int s = 0; s < tp.t(); ++s) out.members[s].rows.push_back(rows[s]);
    return out;
}

// k = n is the complete (square) case; the extension question is vacuous there.
inline bool is_complete(const Tuple& tp) { return tp.k() == tp.n(); }

inline bool is_maximal(const Tuple& tp) {
    if (is_complete(tp))
        throw std::invalid_argument("is_maximal: tuple is complete, use is_complete");
    return !has_extension(tp);
}

// Columns where the next row could be given at least one consistent cell
// across all members (Latin in each column, no reused ordered pair).
inline std::vector<int> open_positions(const Tuple& tp) {
    detail::ExtensionContext ctx(tp);
    std::vector<int> open;
    std::vector<Symbol> chosen(static_cast<std::size_t>(ctx.t));
    for (int c = 0; c < ctx.n; ++c) {
        // Backtrack over members for this single column.
        auto fillable = [&](auto&& self, int s) -> bool {
            if (s == ctx.t) return true;
            std::uint64_t allowed = ctx.col_free[s][c];
            for (int s0 = 0; s0 < s; ++s0)
                allowed &= ~ctx.usage.table(s0, s)[chosen[s0]];
            while (allowed) {
                const int y = 63 - std::countl_zero(allowed);
                allowed &= ~(std::uint64_t{1} << y);
                chosen[s] = static_cast<Symbol>(y);
                if (self(self, s + 1)) return true;
            }
            return false;
        };
        if (fillable(fillable, 0)) open.push_back(c);
    }
    return open;
}

}  // namespace molr
