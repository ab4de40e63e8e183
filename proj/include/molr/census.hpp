#pragma once

// Breadth-first census over k for fixed n: extend every representative,
// reject non-canonical extensions, aggregate per-(k,n) statistics, and
// track lineage to the top level.
//
// The rejection hot path uses the cycle-type bound: every transformed
// non-first row is a conjugate of a row quotient, and the lex-max conjugate
// depends only on the cycle type. Extensions whose bound exceeds the
// inherited second row are rejected outright; ties are settled by the
// bounded exact test (see canonical.hpp). Equivalence with the unpruned
// scan is enforced by tests for n <= 5.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "molr/canonical.hpp"
#include "molr/core.hpp"
#include "molr/extension.hpp"
#include "molr/io.hpp"

namespace molr {

struct CensusOptions {
    bool stepwise = false;  // drop trivial-autotopism classes at every level
    int jobs = 1;           // 0 = hardware concurrency
    std::uint64_t budget = 0;            // cap on generated extensions, 0 = unlimited
    std::size_t spill_lines = 1u << 22;  // in-memory dedup buffer, in lines
    std::string spill_dir;               // empty: $MOLR_TMPDIR or system temp dir
};

struct CensusRow {
    int n = 0, k = 0;
    std::uint64_t normalized_total = 0;      // sum of class sizes (orbit counting)
    std::uint64_t normalized_generated = 0;  // raw extensions passing is_normalized
    std::uint64_t classes = 0;
    std::uint64_t maximal = 0;
    bool maximal_applicable = true;  // false for k = n
    std::uint64_t trivial_aut = 0;
    std::map<std::uint64_t, std::uint64_t> aut_histogram;
    std::vector<std::size_t> extends_to_top;  // record indices; filled by lineage()
};

struct CensusResult {
    int n = 0;
    bool complete = true;  // false when the generation budget was exhausted
    std::vector<CensusRow> rows;                       // k = 2, 3, ...
    std::vector<std::vector<CanonicalRecord>> levels;  // representatives, desc lex
    std::vector<std::vector<bool>> maximal_flags;      // parallel to levels

    const std::vector<CanonicalRecord>& level(int k) const { return levels.at(k - 2); }
};

namespace detail {

// Deterministic parallel loop: fn(i) for i in [0, count), each i handled
// exactly once; callers write results into slot i only.
template <class F>
void parallel_for(std::size_t count, int jobs, F&& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (count < static_cast<std::size_t>(jobs)) jobs = static_cast<int>(count);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto work = [&] {
        try {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Streaming dedup of same-shape lines with external spill: when the buffer
// exceeds the limit it is sorted and written as a run; finish() merges all
// runs into one descending duplicate-free list. Byte equality is tuple
// equality; the byte order is only a merge order, not the output order.
class LineDedup {
  public:
    LineDedup(std::size_t max_lines, std::string dir)
        : max_lines_(std::max<std::size_t>(max_lines, 1)), dir_(std::move(dir)) {
        if (dir_.empty()) {
            if (const char* env = std::getenv("MOLR_TMPDIR"))
                dir_ = env;
            else
                dir_ = std::filesystem::temp_directory_path().string();
        }
    }
    LineDedup(const LineDedup&) = delete;
    ~LineDedup() {
        for (const auto& f : runs_) std::remove(f.c_str());
    }

    void add(std::string line) {
        buf_.push_back(std::move(line));
        if (buf_.size() >= max_lines_) spill();
    }

    std::size_t run_count() const { return runs_.size(); }

    std::vector<std::string> finish() {
        sort_buf();
        if (runs_.empty()) return std::move(buf_);
        spill();
        std::vector<std::ifstream> in;
        std::vector<std::string> head(runs_.size());
        std::vector<bool> alive(runs_.size(), false);
        for (std::size_t i = 0; i < runs_.size(); ++i) {
            in.emplace_back(runs_[i]);
            if (!in.back()) throw std::runtime_error("spill run unreadable: " + runs_[i]);
            alive[i] = static_cast<bool>(std::getline(in[i], head[i]));
        }
        std::vector<std::string> out;
        for (;;) {
            int best = -1;
            for (std::size_t i = 0; i < runs_.size(); ++i)
                if (alive[i] && (best < 0 || head[i] > head[best])) best = static_cast<int>(i);
            if (best < 0) break;
            std::string line = head[best];
            for (std::size_t i = 0; i < runs_.size(); ++i)  // advance every equal head
                while (alive[i] && head[i] == line)
                    alive[i] = static_cast<bool>(std::getline(in[i], head[i]));
            out.push_back(std::move(line));
        }
        return out;
    }

  private:
    void sort_buf() {
        std::sort(buf_.begin(), buf_.end(), std::greater<>());
        buf_.erase(std::unique(buf_.begin(), buf_.end()), buf_.end());
    }

    void spill() {
        if (buf_.empty()) return;
        sort_buf();
        static std::atomic<unsigned> seq{0};
        std::string path = (std::filesystem::path(dir_) /
                            ("molr-run-" + std::to_string(seq.fetch_add(1)) + "-" +
                             std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".tmp"))
                               .string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot create spill run: " + path);
        for (const std::string& line : buf_) out << line << '\n';
        runs_.push_back(std::move(path));
        buf_.clear();
    }

    std::size_t max_lines_;
    std::string dir_;
    std::vector<std::string> buf_;
    std::vector<std::string> runs_;
};

// Cycle types of S_n indexed densely, with the lex-max conjugate per type.
// Keys pack the cycle-length multiset four bits per length.
struct TypeTable {
    std::vector<std::uint64_t> keys;
    std::vector<Perm> reps;

    int find(std::uint64_t key) const {
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i] == key) return static_cast<int>(i);
        throw std::logic_error("cycle type key not in table");
    }
};

inline std::uint64_t cycle_type_key(const Perm& q) {
    std::uint32_t seen = 0;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (seen >> i & 1) continue;
        int len = 0;
        for (std::size_t j = i; !(seen >> j & 1); j = q[j]) {
            seen |= 1u << j;
            ++len;
        }
        key += std::uint64_t{1} << (4 * len);
    }
    return key;
}

inline const TypeTable& type_table(int n) {
    static std::mutex mu;
    static std::map<int, TypeTable> tables;
    std::lock_guard<std::mutex> lock(mu);
    auto it = tables.find(n);
    if (it == tables.end()) {
        TypeTable tab;
        for (const auto& [type, rep] : conjugacy_table(n).lex_max) {
            std::uint64_t key = 0;
            for (int len : type) key += std::uint64_t{1} << (4 * len);
            tab.keys.push_back(key);
            tab.reps.push_back(rep);
        }
        it = tables.emplace(n, std::move(tab)).first;
    }
    return it->second;
}

struct ExtensionUnit {
    std::size_t parent = 0;
    Perm alpha;  // member 1's new row
};

struct UnitStats {
    std::uint64_t generated = 0;
    std::uint64_t normalized = 0;
    std::vector<std::string> survivors;  // canonical extensions, serialized
};

}  // namespace detail

inline CensusResult run_census(int n, int k_max, const CensusOptions& opts = {}) {
    if (n < 2 || n > 12 || k_max < 2 || k_max > n)
        throw std::invalid_argument("run_census: need 2 <= k_max <= n <= 12");
    const detail::TypeTable& types = detail::type_table(n);  // shared, built up front
    CensusResult res;
    res.n = n;

    std::atomic<std::uint64_t> generated_total{0};
    std::atomic<bool> over_budget{false};
    std::vector<CanonicalRecord> parents{CanonicalRecord{Tuple::seed(n), 0, 0, 0}};

    for (int k = 2; k <= k_max; ++k) {
        // One work unit per (parent, member-1 row): coarse enough to keep
        // merge costs trivial, fine enough to load several workers.
        std::vector<detail::ExtensionUnit> units;
        for (std::size_t p = 0; p < parents.size(); ++p)
            for (Perm& alpha : candidate_rows(parents[p].triple.members[0]))
                units.push_back({p, std::move(alpha)});

        std::vector<detail::UnitStats> stats(units.size());
        detail::parallel_for(units.size(), opts.jobs, [&](std::size_t ui) {
            if (over_budget.load(std::memory_order_relaxed)) return;
            if (opts.budget && generated_total.load(std::memory_order_relaxed) > opts.budget) {
                over_budget.store(true);
                return;
            }
            const detail::ExtensionUnit& unit = units[ui];
            detail::UnitStats& out = stats[ui];
            const Tuple& P = parents[unit.parent].triple;
            const int kp = k - 1;  // rows in the parent
            const Perm& alpha = unit.alpha;
            const Perm& target = (kp == 1) ? alpha : P.row(0, 1);

            std::vector<std::vector<Perm>> inv(static_cast<std::size_t>(P.t()));
            for (int s = 0; s < P.t(); ++s)
                for (int i = 0; i < kp; ++i) inv[s].push_back(inverse(P.row(s, i)));

            // Member-1 quotients depend only on alpha: if any lex-max
            // conjugate beats the target, no extension with this alpha is
            // canonical.
            Perm q;
            bool alpha_ok = true;
            for (int i = 0; i < kp && alpha_ok; ++i) {
                compose_into(q, inv[0][i], alpha);
                if (perm_lex_cmp(types.reps[types.find(detail::cycle_type_key(q))],
                                 target) > 0)
                    alpha_ok = false;
            }
            std::vector<char> allowed;
            std::vector<Perm> cent;
            if (alpha_ok) {
                allowed.resize(types.reps.size());
                for (std::size_t i = 0; i < types.reps.size(); ++i)
                    allowed[i] = perm_lex_cmp(types.reps[i], target) <= 0;
                cent = centralizer(target);
            }
            // An extension is counted as normalized when the new row has a
            // (unique) joint insertion point restoring S1-S3: always, when
            // alpha stays below the second row; otherwise the new rows
            // become the second rows and S2 must hold for them. This is the
            // statistic behind the published per-size normalized counts.
            const bool alpha_below_second =
                kp >= 2 && perm_lex_cmp(alpha, P.row(0, 1)) < 0;

            std::uint64_t local = 0;
            for_each_extension_with_first(P, alpha, [&](const RowTriple& rows) {
                ++out.generated;
                if (opts.budget && (++local & 0xFFF) == 0) {
                    if (generated_total.fetch_add(local) + local > opts.budget) {
                        over_budget.store(true);
                        local = 0;
                        return true;
                    }
                    local = 0;
                }
                if (alpha_below_second ||
                    (perm_lex_cmp(alpha, rows[1]) > 0 &&
                     perm_lex_cmp(rows[1], rows[2]) > 0))
                    ++out.normalized;
                if (!alpha_ok) return false;
                for (int s = 1; s < 3; ++s)
                    for (int i = 0; i < kp; ++i) {
                        compose_into(q, inv[s][i], rows[s]);
                        if (!allowed[types.find(detail::cycle_type_key(q))])
                            return false;
                    }
                Tuple X = with_row(P, rows);
                if (is_canonical_bounded(X, target, cent))
                    out.survivors.push_back(serialize_tuple(X));
                return false;
            });
            if (opts.budget) generated_total.fetch_add(local);
        });
        if (over_budget.load()) {
            res.complete = false;
            break;
        }

        CensusRow row;
        row.n = n;
        row.k = k;
        row.maximal_applicable = (k < n);
        detail::LineDedup dedup(opts.spill_lines, opts.spill_dir);
        for (detail::UnitStats& s : stats) {
            row.normalized_generated += s.normalized;
            for (std::string& line : s.survivors) dedup.add(std::move(line));
            s.survivors.clear();
        }
        const std::vector<std::string> lines = dedup.finish();

        std::vector<CanonicalRecord> records(lines.size());
        detail::parallel_for(lines.size(), opts.jobs, [&](std::size_t i) {
            Tuple tp = parse_tuple(lines[i]);
            ScanResult scan = transform_scan(tp);
            if (triple_lex_cmp(scan.lex_max, tp) != 0)
                throw std::logic_error("census: accepted extension is not canonical");
            records[i] = make_record(tp, scan);
        });
        // Line byte order is member-major; representative order is row-major.
        std::sort(records.begin(), records.end(),
                  [](const CanonicalRecord& a, const CanonicalRecord& b) {
                      return triple_lex_cmp(a.triple, b.triple) > 0;
                  });
        if (opts.stepwise)
            std::erase_if(records, [](const CanonicalRecord& r) { return r.aut_order == 1; });

        std::vector<bool> flags(records.size(), false);
        if (k < n) {
            std::vector<char> fl(records.size(), 0);
            detail::parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
                fl[i] = is_maximal(records[i].triple) ? 1 : 0;
            });
            for (std::size_t i = 0; i < records.size(); ++i) flags[i] = fl[i] != 0;
        }

        row.classes = records.size();
        for (std::size_t i = 0; i < records.size(); ++i) {
            row.normalized_total += records[i].class_size;
            ++row.aut_histogram[records[i].aut_order];
            if (flags[i]) ++row.maximal;
        }
        if (auto it = row.aut_histogram.find(1); it != row.aut_histogram.end())
            row.trivial_aut = it->second;

        res.rows.push_back(std::move(row));
        res.levels.push_back(records);
        res.maximal_flags.push_back(std::move(flags));
        parents = std::move(records);
    }
    return res;
}

// ---- lineage ----------------------------------------------------------------

struct LineageChain {
    std::size_t top_index = 0;  // record index at the top level
    // orders[k - 2]: autotopism order of the level-k ancestor class on the
    // generation chain (the class of the top triple's first k rows).
    std::vector<std::uint64_t> orders;
};

namespace detail {

inline Tuple keep_rows(const Tuple& tp, const std::vector<int>& rows) {
    Tuple out;
    out.members.resize(static_cast<std::size_t>(tp.t()));
    for (int s = 0; s < tp.t(); ++s) {
        out.members[s].n = tp.n();
        for (int r : rows) out.members[s].rows.push_back(tp.row(s, r));
    }
    return out;
}

inline int find_record(const std::vector<CanonicalRecord>& level, const Tuple& tp) {
    // levels are sorted descending by triple lex order
    int lo = 0, hi = static_cast<int>(level.size());
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        auto c = triple_lex_cmp(level[mid].triple, tp);
        if (c == 0) return mid;
        if (c > 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return -1;
}

}  // namespace detail

// Generation ancestry of every top-level class: the level-k ancestor of a
// top class is the class of its representative's first k rows (the chain
// along which the census produced it). Also fills extends_to_top on the
// census rows with the classes lying on some chain.
inline std::vector<LineageChain> lineage(CensusResult& res) {
    if (!res.complete) throw std::invalid_argument("lineage: census incomplete");
    int top_k = 0;
    for (const CensusRow& row : res.rows)
        if (row.classes > 0) top_k = row.k;
    if (top_k < 3) throw std::invalid_argument("lineage: needs classes at k >= 3");

    for (CensusRow& row : res.rows) row.extends_to_top.clear();
    std::vector<std::vector<char>> marked(res.levels.size());
    for (std::size_t l = 0; l < res.levels.size(); ++l)
        marked[l].assign(res.levels[l].size(), 0);

    std::vector<LineageChain> chains;
    const auto& top = res.level(top_k);
    std::vector<int> rows;
    for (std::size_t ti = 0; ti < top.size(); ++ti) {
        LineageChain chain;
        chain.top_index = ti;
        for (int k = 2; k <= top_k; ++k) {
            rows.resize(static_cast<std::size_t>(k));
            std::iota(rows.begin(), rows.end(), 0);
            Tuple anc = canonicalize(detail::keep_rows(top[ti].triple, rows));
            int idx = detail::find_record(res.level(k), anc);
            if (idx < 0)
                throw std::logic_error("lineage: ancestor class missing from census");
            marked[k - 2][idx] = 1;
            chain.orders.push_back(res.level(k)[idx].aut_order);
        }
        chains.push_back(std::move(chain));
    }
    for (CensusRow& row : res.rows)
        if (row.k <= top_k)
            for (std::size_t i = 0; i < marked[row.k - 2].size(); ++i)
                if (marked[row.k - 2][i]) row.extends_to_top.push_back(i);
    return chains;
}

// ---- file output --------------------------------------------------------------

inline std::string census_tsv(const CensusResult& res) {
    std::string out = census_tsv_header() + "\n";
    for (const CensusRow& r : res.rows) {
        out += std::to_string(r.n) + '\t' + std::to_string(r.k) + '\t' +
               std::to_string(r.normalized_total) + '\t' +
               std::to_string(r.normalized_generated) + '\t' +
               std::to_string(r.classes) + '\t' +
               (r.maximal_applicable ? std::to_string(r.maximal) : std::string("-")) +
               '\t' + std::to_string(r.trivial_aut) + '\t' +
               histogram_tsv(r.aut_histogram) + '\n';
    }
    if (!res.complete) out += "# incomplete: generation budget exhausted\n";
    return out;
}

inline void write_census_outputs(const CensusResult& res, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t l = 0; l < res.levels.size(); ++l) {
        const int k = res.rows[l].k;
        std::ofstream reps(std::filesystem::path(dir) /
                           ("reps_k" + std::to_string(k) + "n" + std::to_string(res.n) +
                            ".molr"));
        for (const CanonicalRecord& rec : res.levels[l])
            reps << serialize_tuple(rec.triple) << '\n';
    }
    std::ofstream tsv(std::filesystem::path(dir) / "census.tsv");
    tsv << census_tsv(res);
}

}  // namespace molr
