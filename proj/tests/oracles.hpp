#pragma once

// Independent oracles used by the tests: direct generators that avoid the
// library's search and canonicalization machinery wherever possible.

#include <algorithm>
#include <string>
#include <vector>

#include "molr/core.hpp"

namespace oracles {

inline std::vector<molr::Perm> all_perms(int n) {
    std::vector<molr::Perm> out;
    molr::Perm p = molr::identity_perm(n);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// All normalized 2 x n triples by direct construction: identity first rows,
// second rows d1 > d2 > d3 pairwise discordant derangements. Checks are
// written out directly instead of reusing the library predicates.
inline std::vector<molr::Tuple> normalized_two_row_triples(int n) {
    using molr::Perm;
    std::vector<Perm> der;
    for (const Perm& p : all_perms(n)) {
        bool fixed_point = false;
        for (int i = 0; i < n; ++i) fixed_point = fixed_point || p[i] == i;
        if (!fixed_point) der.push_back(p);
    }
    auto discordant = [n](const Perm& a, const Perm& b) {
        for (int i = 0; i < n; ++i)
            if (a[i] == b[i]) return false;
        return true;
    };
    std::vector<molr::Tuple> out;
    for (std::size_t i = 0; i < der.size(); ++i)
        for (std::size_t j = i + 1; j < der.size(); ++j) {
            if (!discordant(der[i], der[j])) continue;
            for (std::size_t l = j + 1; l < der.size(); ++l) {
                if (!discordant(der[i], der[l]) || !discordant(der[j], der[l]))
                    continue;
                // descending: der is generated ascending, so reverse the roles
                molr::Tuple tp = molr::Tuple::seed(n);
                tp.members[0].rows.push_back(der[l]);
                tp.members[1].rows.push_back(der[j]);
                tp.members[2].rows.push_back(der[i]);
                out.push_back(std::move(tp));
            }
        }
    return out;
}

}  // namespace oracles
