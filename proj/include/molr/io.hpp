#pragma once

// Line format for tuples and the built-in fixture collection.
//
// Grammar: members separated by '|', rows within a member by ',', each row
// is n characters from 0-9a-z (symbol 10 = 'a'). Note the line is
// member-major while triple_lex_cmp is row-major, so line byte order is an
// equality key but not the representative order for k >= 3.

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "molr/core.hpp"

namespace molr {

inline char symbol_char(Symbol s) {
    return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10));
}

inline int symbol_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    return -1;
}

inline std::string serialize_tuple(const Tuple& tp) {
    std::string out;
    for (int s = 0; s < tp.t(); ++s) {
        if (s) out += '|';
        for (int r = 0; r < tp.k(); ++r) {
            if (r) out += ',';
            for (Symbol v : tp.row(s, r)) out += symbol_char(v);
        }
    }
    return out;
}

struct ParseError : std::runtime_error {
    int column;  // 1-based offset into the line; 0 when not positional
    ParseError(std::string msg, int col = 0)
        : std::runtime_error(std::move(msg)), column(col) {}
};

// Parses and fully validates one line. Distinguishes grammar, Latin and
// orthogonality failures in the diagnostic.
inline Tuple parse_tuple(const std::string& line) {
    std::vector<Rectangle> members;
    Rectangle cur;
    Perm row;
    int col = 0;  // 1-based position for diagnostics
    auto end_row = [&] {
        if (row.empty()) throw ParseError("empty row", col);
        if (cur.rows.empty())
            cur.n = static_cast<int>(row.size());
        else if (static_cast<int>(row.size()) != cur.n)
            throw ParseError("row length differs from earlier rows", col);
        cur.rows.push_back(std::move(row));
        row.clear();
    };
    auto end_member = [&] {
        end_row();
        members.push_back(std::move(cur));
        cur = Rectangle{};
    };
    for (char c : line) {
        ++col;
        if (c == ',') {
            end_row();
        } else if (c == '|') {
            end_member();
        } else {
            int v = symbol_value(c);
            if (v < 0)
                throw ParseError(std::string("unexpected character '") + c + "'", col);
            if (static_cast<int>(row.size()) >= kMaxSymbols)
                throw ParseError("row exceeds the symbol limit", col);
            row.push_back(static_cast<Symbol>(v));
        }
    }
    ++col;
    end_member();

    Tuple tp{std::move(members)};
    std::string why;
    if (!is_valid_tuple(tp, &why)) throw ParseError(why);
    return tp;
}

inline std::string census_tsv_header() {
    return "n\tk\tnormalized_total\tnormalized_generated\tclasses\tmaximal\t"
           "trivial_aut\taut_histogram";
}

inline std::string histogram_tsv(const std::map<std::uint64_t, std::uint64_t>& hist) {
    std::string out;
    for (const auto& [order, count] : hist) {
        if (!out.empty()) out += ',';
        out += std::to_string(order) + ':' + std::to_string(count);
    }
    return out;
}

namespace detail {

inline std::vector<Tuple> parse_fixture_lines(std::initializer_list<const char*> lines) {
    std::vector<Tuple> out;
    for (const char* line : lines) out.push_back(parse_tuple(line));
    return out;
}

}  // namespace detail

// Reference tuples used throughout the tests. Each is validated at load;
// a transcription slip fails immediately.
inline const std::map<std::string, std::vector<Tuple>>& fixtures() {
    static const std::map<std::string, std::vector<Tuple>> all = [] {
        using detail::parse_fixture_lines;
        std::map<std::string, std::vector<Tuple>> m;
        m["figure_1"] = parse_fixture_lines(
            {"0123,3210,2301,1032|0123,2301,1032,3210|0123,1032,3210,2301"});
        m["appendix_A"] = m["figure_1"];
        m["example_1"] = parse_fixture_lines({"01234,43120|01234,34012|01234,20341"});
        m["appendix_B"] = parse_fixture_lines(
            {"01234,43102,32410,20341,14023|01234,32410,43102,14023,20341|"
             "01234,20341,14023,32410,43102"});
        m["appendix_C"] = parse_fixture_lines({
            "012345,543210,451032,325401,204153|012345,451032,325401,243150,530214|"
            "012345,325401,504213,451032,143520",
            "012345,543210,435102,354021,201453|012345,435102,543210,201453,354021|"
            "012345,354021,201453,543210,435102",
            "012345,543210,435021,354102,120534|012345,435021,543210,201453,354102|"
            "012345,354102,201453,543210,435021",
            "012345,543102,435210,201534,120453|012345,435210,120534,354102,543021|"
            "012345,201534,543021,120453,435210",
            "012345,543102,435210,201534,120453|012345,435210,120534,354102,543021|"
            "012345,201534,543021,120453,354210",
            "012345,543102,435021,354210,120453|012345,435210,201534,120453,354102|"
            "012345,201534,120453,543102,435210",
            "012345,543102,435021,354210,201534|012345,435210,201534,120453,543021|"
            "012345,201534,120453,543021,354102",
        });
        m["example_2"] = {m["appendix_C"][0]};
        m["appendix_D"] = parse_fixture_lines({
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|"
            "0123456,5436210,6542103,2651034,1260345,4305621,3014562|"
            "0123456,4305621,2651034,3014562,6542103,1260345,5436210",
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|"
            "0123456,5436210,6542103,2651034,1260345,4305621,3014562|"
            "0123456,3014562,1260345,6542103,4305621,5436210,2651034",
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|"
            "0123456,4305621,2651034,3014562,6542103,1260345,5436210|"
            "0123456,3014562,1260345,6542103,4305621,5436210,2651034",
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|"
            "0123456,4305621,2651034,3014562,6542103,1260345,5436210|"
            "0123456,1260345,3014562,5436210,2651034,6542103,4305621",
        });
        m["appendix_E1"] = parse_fixture_lines(
            {"012345,543210,451032,325401,204153|012345,451032,325401,243150,530214|"
             "012345,325401,504213,451032,143520|012345,204153,143520,530214,425031"});
        m["appendix_E2"] = parse_fixture_lines(
            {"0123456,6542103,2651034|0123456,5436210,3014562|0123456,4305621,1260345|"
             "0123456,3014562,5436210|0123456,2651034,6542103|0123456,1260345,4305621"});
        m["appendix_E3"] = parse_fixture_lines(
            {"0123456,6542103,5436210,4305621|0123456,5436210,6542103,2651034|"
             "0123456,4305621,2651034,3014562|0123456,3014562,1260345,6542103|"
             "0123456,2651034,4305621,1260345|0123456,1260345,3014562,5436210"});
        m["figure_2"] = parse_fixture_lines(
            {"0123456,6542310,3416025,1365204|0123456,5634102,6250314,3012645|"
             "0123456,4216035,5601243,6450312"});
        m["figure_6"] = parse_fixture_lines({
            "01234567,32107654,23016745,10325476|01234567,23016745,10325476,32107654|"
            "01234567,10325476,32107654,23016745",
            "01234567,32107654,23015476,10326745|01234567,23016745,10327654,32105476|"
            "01234567,10325476,32106745,23017654",
        });
        return m;
    }();
    return all;
}

}  // namespace molr
