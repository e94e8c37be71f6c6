#pragma once

// Reference semantics written straight from the definitions over string sets,
// with brute force wherever the library is clever. Slow and obvious on purpose.

#include "dj/situation.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Str = std::string;
using Set = std::set<Str>;
using Pairs = std::set<std::pair<Str, Str>>;

struct World
{
    Set args, props;
    Pairs support;
    Pairs exists, not_exists; // trumps in some / fails to trump in some perspective
    std::vector<Pairs> perspectives;

    bool sup(const Str& s, const Str& t) const { return support.contains({s, t}); }
    bool tr(const Str& a, const Str& b) const { return exists.contains({a, b}); }
    bool ntr(const Str& a, const Str& b) const { return not_exists.contains({a, b}); }
    bool all(const Str& a, const Str& b) const { return !ntr(a, b); }

    bool decisive(const Str& s) const
    {
        for (const auto& x : args)
            if (tr(x, s))
                return false;
        return true;
    }
};

inline World world(const dj::DecisionSituation& d)
{
    World w;
    w.args = Set(d.arguments.begin(), d.arguments.end());
    w.props = Set(d.propositions.begin(), d.propositions.end());
    w.support = Pairs(d.support.begin(), d.support.end());
    if (auto* pe = std::get_if<dj::PerspectiveEncoding>(&d.relations)) {
        for (const auto& [p, prs] : pe->perspectives)
            w.perspectives.emplace_back(prs.begin(), prs.end());
        for (const auto& a : w.args)
            for (const auto& b : w.args)
                for (const auto& p : w.perspectives) {
                    if (p.contains({a, b}))
                        w.exists.insert({a, b});
                    else
                        w.not_exists.insert({a, b});
                }
    } else {
        const auto& de = std::get<dj::DirectEncoding>(d.relations);
        w.exists = Pairs(de.trumps_exists.begin(), de.trumps_exists.end());
        for (const auto& a : w.args)
            for (const auto& b : w.args)
                if (!w.exists.contains({a, b}))
                    w.not_exists.insert({a, b});
        for (const auto& pr : de.ambivalent)
            w.not_exists.insert(pr);
    }
    return w;
}

inline Set decisive(const World& w)
{
    Set out;
    for (const auto& s : w.args)
        if (w.decisive(s))
            out.insert(s);
    return out;
}

inline bool justifiable(const World& w, const Str& t)
{
    for (const auto& s : w.args)
        if (w.sup(s, t) && w.decisive(s))
            return true;
    return false;
}

inline bool untenable(const World& w, const Str& t)
{
    for (const auto& s : w.args) {
        if (!w.sup(s, t))
            continue;
        bool beaten = false;
        for (const auto& c : w.args)
            beaten |= w.all(c, s) && w.decisive(c);
        if (!beaten)
            return false;
    }
    return true;
}

inline Set judgment(const World& w)
{
    Set out;
    for (const auto& t : w.props)
        if (justifiable(w, t))
            out.insert(t);
    return out;
}

inline bool replaces(const World& w, const Set& by, const Str& s, const Set* gamma = nullptr)
{
    for (const auto& x : w.args) {
        if (!w.tr(s, x) || (gamma && !gamma->contains(x)))
            continue;
        bool covered = false;
        for (const auto& b : by)
            covered |= w.tr(b, x);
        if (!covered)
            return false;
    }
    for (const auto& t : w.props) {
        if (!w.sup(s, t))
            continue;
        bool covered = false;
        for (const auto& b : by)
            covered |= w.sup(b, t);
        if (!covered)
            return false;
    }
    return true;
}

inline Set dec(const World& w, const Set& gamma)
{
    Set out;
    for (const auto& s : gamma)
        if (w.decisive(s))
            out.insert(s);
    return out;
}

inline Set res(const World& w, const Set& gamma)
{
    const Set d = dec(w, gamma);
    Set out;
    for (const auto& s : gamma) {
        bool hit = false;
        for (const auto& x : d)
            hit |= w.tr(x, s);
        if (!hit)
            out.insert(s);
    }
    return out;
}

inline bool unnecessary(const World& w, const Set& gamma, const Str& s)
{
    const Set r = res(w, gamma);
    for (const auto& x : r)
        if (w.tr(x, s))
            return true;
    return replaces(w, r, s, &gamma);
}

inline std::vector<Str> covering_witnesses(const World& w, const Set& gamma)
{
    std::vector<Str> out;
    for (const auto& s : w.args)
        if (!gamma.contains(s) && !unnecessary(w, gamma, s))
            out.push_back(s);
    return out;
}

inline bool answerable(const World& w, const Set& gamma)
{
    for (const auto& sp : gamma)
        for (const auto& s : w.args)
            if (w.tr(sp, s) && w.ntr(sp, s) && w.decisive(sp))
                return false;
    return true;
}

inline Set trumpers(const World& w, const Str& s)
{
    Set out;
    for (const auto& x : w.args)
        if (w.tr(x, s))
            out.insert(x);
    return out;
}

/// Subset form of closed under reinstatement, quantifiers as written.
inline bool reinstatement(const World& w, const Set& gamma)
{
    for (const auto& s1 : gamma)
        for (const auto& s3 : gamma) {
            if (s1 == s3 || !w.decisive(s3) || w.tr(s3, s1))
                continue;
            Set allowed;
            for (const auto& x : trumpers(w, s1))
                if (!w.all(s3, x))
                    allowed.insert(x);
            bool found = false;
            for (const auto& s : gamma) {
                if (!replaces(w, {s}, s1))
                    continue;
                bool inside = true;
                for (const auto& x : trumpers(w, s))
                    inside &= allowed.contains(x);
                found |= inside;
            }
            if (!found)
                return false;
        }
    return true;
}

/// Whole-situation form over pairwise distinct triples.
inline bool reinstatement_global(const World& w)
{
    for (const auto& s1 : w.args)
        for (const auto& s2 : w.args)
            for (const auto& s3 : w.args) {
                if (s1 == s2 || s2 == s3 || s1 == s3)
                    continue;
                if (!(w.all(s3, s2) && w.tr(s2, s1) && w.decisive(s3)))
                    continue;
                Set allowed = trumpers(w, s1);
                allowed.erase(s2);
                bool found = false;
                for (const auto& s : w.args) {
                    if (!replaces(w, {s}, s1))
                        continue;
                    bool inside = true;
                    for (const auto& x : trumpers(w, s))
                        inside &= allowed.contains(x);
                    found |= inside;
                }
                if (!found)
                    return false;
            }
    return true;
}

inline bool defends(const World& w, const Set& by, const Str& s)
{
    for (const auto& c : trumpers(w, s)) {
        bool beaten = false;
        for (const auto& b : by)
            beaten |= w.all(b, c) && w.decisive(b);
        if (!beaten)
            return false;
    }
    return true;
}

inline std::vector<Set> subsets(const Set& s)
{
    std::vector<Str> v(s.begin(), s.end());
    std::vector<Set> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << v.size()); ++mask) {
        Set x;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (mask >> i & 1)
                x.insert(v[i]);
        out.push_back(std::move(x));
    }
    return out;
}

/// Smallest defending subset of gamma by size, or none.
inline std::optional<std::size_t> min_defense(const World& w, const Set& gamma, const Str& s)
{
    std::optional<std::size_t> best;
    for (const auto& sub : subsets(gamma))
        if (defends(w, sub, s) && (!best || sub.size() < *best))
            best = sub.size();
    return best;
}

inline std::size_t width(const World& w, const Set& gamma)
{
    std::size_t j = 0;
    for (const auto& s : gamma)
        if (auto m = min_defense(w, gamma, s))
            j = std::max(j, *m);
    return j;
}

/// Longest Q-path (in steps) inside gamma by depth-first search; none on a cycle.
inline std::optional<std::size_t> longest_q_path(const World& w, const Set& gamma)
{
    auto q = [&](const Str& a, const Str& b) {
        if (w.tr(a, b))
            return true;
        for (const auto& m : w.args)
            if (w.tr(a, m) && w.tr(m, b))
                return true;
        return false;
    };
    std::map<Str, int> state; // 1 visiting, 2 done
    std::map<Str, std::size_t> depth;
    bool cyclic = false;
    auto dfs = [&](auto&& self, const Str& a) -> std::size_t {
        if (state[a] == 2)
            return depth[a];
        if (state[a] == 1) {
            cyclic = true;
            return 0;
        }
        state[a] = 1;
        std::size_t best = 0;
        for (const auto& b : gamma)
            if (q(a, b))
                best = std::max(best, 1 + self(self, b));
        state[a] = 2;
        return depth[a] = best;
    };
    std::size_t best = 0;
    for (const auto& a : gamma)
        best = std::max(best, dfs(dfs, a));
    if (cyclic)
        return std::nullopt;
    return best;
}

inline std::optional<std::size_t> length(const World& w, const Set& gamma)
{
    auto l = longest_q_path(w, gamma);
    if (!l)
        return std::nullopt;
    return std::max<std::size_t>(1, *l);
}

inline bool cac(const World& w, const Set& gamma)
{
    return reinstatement(w, gamma) && answerable(w, gamma) && length(w, gamma).has_value() &&
           covering_witnesses(w, gamma).empty();
}

inline bool efficient(const World& w, const Set& s)
{
    const Set d = dec(w, s);
    const Set ti = judgment(w);
    Set img;
    for (const auto& a : d)
        for (const auto& t : w.props)
            if (w.sup(a, t))
                img.insert(t);
    if (img != ti)
        return false;
    for (const auto& t : w.props) {
        bool all_beaten = true;
        for (const auto& x : w.args) {
            if (!w.sup(x, t))
                continue;
            bool beaten = false;
            for (const auto& b : d)
                beaten |= w.all(b, x);
            all_beaten &= beaten;
        }
        if (ti.contains(t) == all_beaten)
            return false;
    }
    return true;
}

struct ModelS
{
    Pairs support, counters;
};

using FailureS = std::tuple<std::string, Str, Str>;

/// Violations of the restricted validity criterion, as (kind, first, second).
inline std::set<FailureS> op_failures(const World& w, const Set& gamma, const ModelS& m)
{
    std::set<FailureS> out;
    auto countered = [&](const Str& x) {
        for (const auto& c : w.args)
            if (m.counters.contains({c, x}) && w.tr(c, x))
                return true;
        return false;
    };
    Set claims;
    for (const auto& [s, t] : m.support) {
        claims.insert(t);
        if (!w.sup(s, t))
            out.insert({"unsupported-claim", s, t});
        for (const auto& sc : gamma)
            if (!w.ntr(sc, s) && !countered(sc))
                out.insert({"uncountered-trumper", s, sc});
    }
    for (const auto& t : w.props) {
        if (claims.contains(t))
            continue;
        for (const auto& s : gamma)
            if (w.sup(s, t) && !countered(s))
                out.insert({"missing-counter-for-supporter", t, s});
    }
    return out;
}

} // namespace oracle
