// Command-line front end: census runs plus line-oriented filters for
// canonicalization, autotopism statistics, verification, balance reports,
// extension, complements, juxtaposition and lineage.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "molr/canonical.hpp"
#include "molr/census.hpp"
#include "molr/core.hpp"
#include "molr/extension.hpp"
#include "molr/io.hpp"
#include "molr/youden.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;

// Applies fn to every non-empty stdin line; input errors are reported with
// their line number and make the whole command fail.
int for_each_stdin_tuple(const std::function<void(const std::string&, const molr::Tuple&)>& fn) {
    std::string line;
    int lineno = 0;
    bool bad = false;
    while (std::getline(std::cin, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            fn(line, molr::parse_tuple(line));
        } catch (const molr::ParseError& e) {
            std::cerr << "line " << lineno;
            if (e.column) std::cerr << ", column " << e.column;
            std::cerr << ": " << e.what() << "\n";
            bad = true;
        }
    }
    return bad ? kExitInput : kExitOk;
}

std::string serialize_rectangle(const molr::Rectangle& r) {
    std::string out;
    for (int i = 0; i < r.k(); ++i) {
        if (i) out += ',';
        for (molr::Symbol v : r.rows[i]) out += molr::symbol_char(v);
    }
    return out;
}

molr::Tuple load_tuple_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + " is empty");
    return molr::parse_tuple(line);
}

int cmd_census(int n, int kmax, bool stepwise, int jobs, const std::string& out_dir,
               std::uint64_t budget) {
    molr::CensusOptions opts;
    opts.stepwise = stepwise;
    opts.jobs = jobs;
    opts.budget = budget;
    molr::CensusResult res = molr::run_census(n, kmax, opts);
    molr::write_census_outputs(res, out_dir);
    std::cout << molr::census_tsv(res);
    if (!res.complete) {
        std::cerr << "generation budget exhausted; partial results written\n";
        return kExitBudget;
    }
    return kExitOk;
}

int cmd_canon(bool dedup) {
    if (!dedup)
        return for_each_stdin_tuple([](const std::string&, const molr::Tuple& tp) {
            std::cout << molr::serialize_tuple(molr::canonicalize(tp)) << "\n";
        });
    std::vector<molr::Tuple> all;
    int rc = for_each_stdin_tuple(
        [&](const std::string&, const molr::Tuple& tp) { all.push_back(tp); });
    for (const molr::CanonicalRecord& rec : molr::dedup_canonical(all))
        std::cout << molr::serialize_tuple(rec.triple) << "\n";
    return rc;
}

int cmd_aut() {
    return for_each_stdin_tuple([](const std::string& line, const molr::Tuple& tp) {
        molr::ScanResult scan = molr::transform_scan(tp);
        if (molr::triple_lex_cmp(scan.lex_max, tp) != 0)
            throw molr::ParseError("not canonical; run canon first");
        molr::CanonicalRecord rec = molr::make_record(tp, scan);
        std::cout << line << "\t" << rec.aut_order << "\t" << rec.valid_count << "\t"
                  << rec.class_size << "\n";
    });
}

int cmd_verify() {
    return for_each_stdin_tuple([](const std::string& line, const molr::Tuple& tp) {
        std::cout << line << "\tvalid=1\tnormalized=" << molr::is_normalized(tp)
                  << "\tcanonical=" << molr::is_canonical(tp);
        if (molr::is_complete(tp)) {
            std::cout << "\tcomplete=1";
        } else {
            std::cout << "\tcomplete=0\tmaximal=" << molr::is_maximal(tp) << "\topen=";
            const auto open = molr::open_positions(tp);
            if (open.empty()) std::cout << "none";
            for (std::size_t i = 0; i < open.size(); ++i)
                std::cout << (i ? "," : "") << open[i];
        }
        std::cout << "\n";
    });
}

int cmd_youden() {
    return for_each_stdin_tuple([](const std::string& line, const molr::Tuple& tp) {
        std::cout << line;
        for (const molr::Rectangle& m : tp.members) {
            molr::BalanceReport rep = molr::balance_report(m);
            std::cout << "\tmin=" << rep.min_intersection << ",max=" << rep.max_intersection
                      << ",lambda_cc="
                      << (rep.lambda_cc ? std::to_string(*rep.lambda_cc) : "-")
                      << ",lambda_cc_p="
                      << (rep.lambda_cc_p ? std::to_string(*rep.lambda_cc_p) : "-");
        }
        molr::TupleBalance cls = molr::classify_tuple(tp);
        std::cout << "\tclass=";
        if (!cls.applicable) {
            std::cout << "n/a";
        } else {
            std::cout << "(";
            for (std::size_t i = 0; i < cls.lambdas.size(); ++i)
                std::cout << (i ? "," : "") << cls.lambdas[i];
            std::cout << ")," << (cls.all_youden ? "youden" : "not-youden");
        }
        std::cout << "\n";
    });
}

int cmd_extend() {
    return for_each_stdin_tuple([](const std::string&, const molr::Tuple& tp) {
        if (molr::is_complete(tp)) throw molr::ParseError("tuple already has n rows");
        molr::for_each_extension(tp, [&](const molr::RowTriple& rows) {
            std::cout << molr::serialize_tuple(molr::with_row(tp, rows)) << "\n";
        });
    });
}

int cmd_complements() {
    return for_each_stdin_tuple([](const std::string&, const molr::Tuple& tp) {
        for (const molr::Rectangle& r : molr::orthogonal_complements(tp))
            std::cout << serialize_rectangle(r) << "\n";
    });
}

int cmd_juxtapose(const std::string& a, const std::string& b) {
    std::cout << molr::serialize_tuple(
                     molr::juxtapose(load_tuple_file(a), load_tuple_file(b)))
              << "\n";
    return kExitOk;
}

int cmd_lineage(const std::string& dir) {
    // Rebuild the census levels from the representative files.
    molr::CensusResult res;
    for (int k = 2;; ++k) {
        std::optional<std::ifstream> found;
        int n = 0;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            int fk = 0, fn = 0;
            if (std::sscanf(name.c_str(), "reps_k%dn%d.molr", &fk, &fn) == 2 && fk == k) {
                found.emplace(entry.path());
                n = fn;
            }
        }
        if (!found) break;
        res.n = n;
        std::vector<molr::CanonicalRecord> level;
        std::string line;
        while (std::getline(*found, line)) {
            if (line.empty()) continue;
            molr::Tuple tp = molr::parse_tuple(line);
            level.push_back(molr::make_record(tp, molr::transform_scan(tp)));
        }
        molr::CensusRow row;
        row.n = n;
        row.k = k;
        row.classes = level.size();
        res.rows.push_back(row);
        res.levels.push_back(std::move(level));
        res.maximal_flags.emplace_back();
    }
    if (res.levels.empty()) {
        std::cerr << "no reps_k*n*.molr files in " << dir << "\n";
        return kExitInput;
    }
    for (const molr::LineageChain& chain : molr::lineage(res)) {
        std::cout << molr::serialize_tuple(
            res.level(res.rows.back().k)[chain.top_index].triple);
        for (std::uint64_t o : chain.orders) std::cout << "\t" << o;
        std::cout << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orthogonal Latin rectangle triples: census and analysis"};
    app.require_subcommand(1);

    int n = 0, kmax = 0, jobs = 0;
    bool stepwise = false, dedup = false;
    std::string out_dir = ".", file_a, file_b, dir;
    std::uint64_t budget = 0;

    auto* census = app.add_subcommand("census", "breadth-first census for one order");
    census->add_option("--n", n, "order (number of columns)")->required();
    census->add_option("--kmax", kmax, "largest row count")->required();
    census->add_flag("--stepwise", stepwise, "stepwise-symmetric mode");
    census->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    census->add_option("--out", out_dir, "output directory");
    census->add_option("--budget", budget, "cap on generated extensions");

    auto* canon = app.add_subcommand("canon", "canonicalize stdin lines");
    canon->add_flag("--dedup", dedup, "drop duplicates and sort descending");

    app.add_subcommand("aut", "autotopism statistics for canonical stdin lines");
    app.add_subcommand("verify", "validity/normalization/canonicity/maximality report");
    app.add_subcommand("youden", "balance reports and tuple classification");
    app.add_subcommand("extend", "all one-row extensions of each stdin line");
    app.add_subcommand("complements", "all orthogonal complement rectangles");

    auto* jux = app.add_subcommand("juxtapose", "combine two tuples side by side");
    jux->add_option("--a", file_a, "left tuple file")->required();
    jux->add_option("--b", file_b, "right tuple file")->required();

    auto* lin = app.add_subcommand("lineage", "ancestor autotopism chains of top classes");
    lin->add_option("--dir", dir, "census output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (census->parsed()) return cmd_census(n, kmax, stepwise, jobs, out_dir, budget);
        if (canon->parsed()) return cmd_canon(dedup);
        if (app.get_subcommand("aut")->parsed()) return cmd_aut();
        if (app.get_subcommand("verify")->parsed()) return cmd_verify();
        if (app.get_subcommand("youden")->parsed()) return cmd_youden();
        if (app.get_subcommand("extend")->parsed()) return cmd_extend();
        if (app.get_subcommand("complements")->parsed()) return cmd_complements();
        if (jux->parsed()) return cmd_juxtapose(file_a, file_b);
        if (lin->parsed()) return cmd_lineage(dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
