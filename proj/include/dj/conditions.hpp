#pragma once

#include "dj/judgment.hpp"
#include "dj/situation.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace dj {

/// A tuple of indices certifying a violation; each check documents its layout.
using Witness = std::vector<std::size_t>;

struct CheckResult
{
    bool pass = true;
    bool undetermined = false; // the defense search cap was exceeded somewhere
    std::vector<Witness> witnesses;

    void fail(Witness w)
    {
        pass = false;
        witnesses.push_back(std::move(w));
    }
};

// ---------------------------------------------------------------------------
// Replacement

/// `by` replaces `s`: everything `s` trumps and supports, `by` does too.
inline bool replaces(const Situation& sit, const IdSet& by, std::size_t s)
{
    const auto& tr = sit.trumps();
    const auto& sup = sit.support();
    return tr.image(s).is_subset_of(tr.image(by)) && sup.image(s).is_subset_of(sup.image(by));
}

inline bool replaces(const Situation& sit, std::size_t by, std::size_t s)
{
    const auto& tr = sit.trumps();
    const auto& sup = sit.support();
    return tr.image(s).is_subset_of(tr.image(by)) && sup.image(s).is_subset_of(sup.image(by));
}

/// Replacement where only the trumped arguments inside `gamma` must be covered.
inline bool essentially_replaces(const Situation& sit, const IdSet& gamma, const IdSet& by, std::size_t s)
{
    const auto& tr = sit.trumps();
    const auto& sup = sit.support();
    return (tr.image(s) & gamma).is_subset_of(tr.image(by)) && sup.image(s).is_subset_of(sup.image(by));
}

// ---------------------------------------------------------------------------
// Derived argument classes of a chosen subset gamma

inline IdSet gamma_decisive(const Situation& sit, const IdSet& gamma) { return gamma & sit.decisive(); }

/// Members of gamma not trumped by any decisive member of gamma.
inline IdSet gamma_resistant(const Situation& sit, const IdSet& gamma)
{
    return gamma - sit.trumps().image(gamma_decisive(sit, gamma));
}

/// Q: one- or two-step trump reachability, restricted to gamma x gamma.
inline Relation q_relation(const Situation& sit, const IdSet& gamma)
{
    const auto& tr = sit.trumps();
    return (tr | then(tr, tr)).restrict(gamma, gamma);
}

// ---------------------------------------------------------------------------
// Defense

inline constexpr std::size_t defense_trumper_cap = 20;

struct Defense
{
    bool defended = false;     // every trumper is trumped in all perspectives by a decisive member of gamma
    bool cap_exceeded = false; // too many trumpers for the exact cover search
    IdSet cover;               // a smallest defending subset of gamma, when known
};

/// Decides whether `s` is gamma-defended and finds a smallest defending set.
///
/// The candidate defenders are the decisive members of gamma; a defender d
/// covers the trumpers of `s` that d trumps in all perspectives. A greedy pass
/// gives an upper bound, then a breadth-first search over covered-trumper
/// masks finds the exact minimum.
inline Defense minimal_defense(const Situation& sit, const IdSet& gamma, std::size_t s)
{
    Defense out;
    out.cover = sit.no_args();
    const auto& d = sit.derived();
    const IdSet defenders = gamma & d.decisive;
    const auto trumpers = members(d.trumps_exists.preimage(s));
    if (trumpers.empty()) {
        out.defended = true;
        return out;
    }
    if (!d.trumps_exists.preimage(s).is_subset_of(d.trumps_forall.image(defenders)))
        return out;
    out.defended = true;
    if (trumpers.size() > defense_trumper_cap) {
        out.cap_exceeded = true;
        return out;
    }

    const std::size_t m = trumpers.size();
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    std::vector<std::pair<std::uint32_t, std::size_t>> masks;
    for_each_member(defenders, [&](std::size_t c) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (d.trumps_forall.contains(c, trumpers[i]))
                mask |= std::uint32_t{1} << i;
        if (mask != 0)
            masks.emplace_back(mask, c);
    });

    // Greedy upper bound.
    std::vector<std::size_t> greedy;
    for (std::uint32_t covered = 0; covered != full;) {
        std::size_t best = 0;
        int best_gain = -1;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            int gain = __builtin_popcount(masks[i].first & ~covered);
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        covered |= masks[best].first;
        greedy.push_back(masks[best].second);
    }
    if (greedy.size() <= 1) {
        for (auto c : greedy)
            out.cover.set(c);
        return out;
    }

    // Exact: shortest path from the empty mask to the full mask.
    constexpr std::uint32_t unseen = 0xffffffffu;
    std::vector<std::uint32_t> parent(std::size_t{full} + 1, unseen);
    std::vector<std::uint32_t> via(std::size_t{full} + 1, 0);
    std::vector<std::uint32_t> frontier{0};
    parent[0] = 0;
    while (parent[full] == unseen && !frontier.empty()) {
        std::vector<std::uint32_t> next;
        for (auto cur : frontier) {
            for (std::uint32_t i = 0; i < masks.size(); ++i) {
                auto nxt = cur | masks[i].first;
                if (parent[nxt] == unseen) {
                    parent[nxt] = cur;
                    via[nxt] = i;
                    next.push_back(nxt);
                }
            }
        }
        frontier = std::move(next);
    }
    for (std::uint32_t cur = full; cur != 0; cur = parent[cur])
        out.cover.set(masks[via[cur]].second);
    return out;
}

inline bool is_defended(const Situation& sit, const IdSet& gamma, std::size_t s)
{
    const auto& d = sit.derived();
    return d.trumps_exists.preimage(s).is_subset_of(d.trumps_forall.image(gamma & d.decisive));
}

/// Defended by at most j members of gamma; nullopt when the search cap is exceeded.
inline std::optional<bool> is_j_defended(const Situation& sit, const IdSet& gamma, std::size_t s, std::size_t j)
{
    auto def = minimal_defense(sit, gamma, s);
    if (!def.defended)
        return false;
    if (def.cap_exceeded)
        return std::nullopt;
    return def.cover.count() <= j;
}

/// Finite defense with trump-in-some-perspective coverage by decisive members of gamma.
inline bool is_finitely_defended(const Situation& sit, const IdSet& gamma, std::size_t s)
{
    const auto& tr = sit.trumps();
    return tr.preimage(s).is_subset_of(tr.image(gamma_decisive(sit, gamma)));
}

// ---------------------------------------------------------------------------
// Analysis bundle

struct GammaAnalysis
{
    IdSet gamma;
    IdSet dec;      // decisive members of gamma
    IdSet res;      // members of gamma not trumped by dec
    IdSet def;      // finitely defended members of gamma
    IdSet defended; // gamma-defended members of gamma, trump-in-all-perspectives reading
    IdSet r_dec;    // arguments replaceable by dec
    IdSet e_res;    // arguments essentially replaceable by res
    IdSet e_dec;    // arguments essentially replaceable by dec
    Relation q;
    std::optional<std::size_t> width;  // smallest j, none if the defense cap was hit
    std::optional<std::size_t> length; // smallest k, none if Q has a cycle
};

inline std::optional<std::size_t> smallest_width(const Situation& sit, const IdSet& gamma)
{
    std::size_t j = 0;
    bool capped = false;
    for_each_member(gamma, [&](std::size_t s) {
        auto def = minimal_defense(sit, gamma, s);
        if (!def.defended)
            return;
        if (def.cap_exceeded)
            capped = true;
        else
            j = std::max(j, def.cover.count());
    });
    if (capped)
        return std::nullopt;
    return j;
}

inline std::optional<std::size_t> smallest_length(const Situation& sit, const IdSet& gamma)
{
    const Relation q = q_relation(sit, gamma);
    Relation power = q;
    const std::size_t limit = gamma.count() + 1;
    for (std::size_t e = 1; e <= limit; ++e) {
        if (power.empty())
            return std::max<std::size_t>(1, e - 1);
        power = then(power, q);
    }
    return std::nullopt;
}

inline GammaAnalysis analyze_gamma(const Situation& sit, const IdSet& gamma)
{
    GammaAnalysis a;
    a.gamma = gamma;
    a.dec = gamma_decisive(sit, gamma);
    a.res = gamma_resistant(sit, gamma);
    a.def = sit.no_args();
    a.defended = sit.no_args();
    a.r_dec = sit.no_args();
    a.e_res = sit.no_args();
    a.e_dec = sit.no_args();
    for_each_member(gamma, [&](std::size_t s) {
        if (is_finitely_defended(sit, gamma, s))
            a.def.set(s);
        if (is_defended(sit, gamma, s))
            a.defended.set(s);
    });
    for (std::size_t s = 0; s < sit.arg_count(); ++s) {
        if (replaces(sit, a.dec, s))
            a.r_dec.set(s);
        if (essentially_replaces(sit, gamma, a.res, s))
            a.e_res.set(s);
        if (essentially_replaces(sit, gamma, a.dec, s))
            a.e_dec.set(s);
    }
    a.q = q_relation(sit, gamma);
    a.width = smallest_width(sit, gamma);
    a.length = smallest_length(sit, gamma);
    return a;
}

// ---------------------------------------------------------------------------
// Conditions on a subset gamma

/// Trumped by a resistant member of gamma, or essentially replaceable by them.
inline bool is_unnecessary(const Situation& sit, const IdSet& gamma, std::size_t s)
{
    const IdSet res = gamma_resistant(sit, gamma);
    return sit.trumps().image(res).test(s) || essentially_replaces(sit, gamma, res, s);
}

/// Witness: {s} for each necessary argument outside gamma.
inline CheckResult check_covering(const Situation& sit, const IdSet& gamma)
{
    CheckResult r;
    for (std::size_t s = 0; s < sit.arg_count(); ++s)
        if (!gamma.test(s) && !is_unnecessary(sit, gamma, s))
            r.fail({s});
    return r;
}

/// Every ambivalent trump pair whose trumper lies in gamma has a trumped trumper.
/// Witness: (trumper, trumped). With gamma = all arguments this is the
/// whole-situation condition.
inline CheckResult check_answerability(const Situation& sit, const IdSet& gamma)
{
    CheckResult r;
    const auto& d = sit.derived();
    for_each_member(gamma, [&](std::size_t trumper) {
        if (d.trumps_exists.preimage(trumper).any())
            return;
        for_each_member(d.trumps_exists.image(trumper), [&](std::size_t s) {
            if (d.not_trumps_exists.contains(trumper, s))
                r.fail({trumper, s});
        });
    });
    return r;
}

inline CheckResult check_answerability(const Situation& sit) { return check_answerability(sit, sit.all_args()); }

/// Subset form. For s1 != s3 in gamma with s3 decisive and not trumping s1,
/// some member of gamma replaces s1 and is trumped only by trumpers of s1
/// that s3 does not trump in all perspectives.
/// Witness: (s1, s2, s3) with s2 a trumper of s1 that s3 always trumps.
inline CheckResult check_closed_reinstatement(const Situation& sit, const IdSet& gamma)
{
    CheckResult r;
    const auto& d = sit.derived();
    const IdSet dec = gamma & d.decisive;
    for_each_member(gamma, [&](std::size_t s1) {
        for_each_member(dec, [&](std::size_t s3) {
            if (s1 == s3 || d.trumps_exists.contains(s3, s1))
                return;
            const IdSet blocked = d.trumps_exists.preimage(s1) & d.trumps_forall.image(s3);
            if (blocked.none())
                return;
            const IdSet allowed = d.trumps_exists.preimage(s1) - blocked;
            bool found = false;
            for (auto s = gamma.find_first(); s != IdSet::npos && !found; s = gamma.find_next(s))
                found = replaces(sit, s, s1) && d.trumps_exists.preimage(s).is_subset_of(allowed);
            if (!found)
                r.fail({s1, blocked.find_first(), s3});
        });
    });
    return r;
}

/// Whole-situation form over pairwise distinct triples s3 always-trumps s2
/// trumps s1, s3 decisive. Witness: (s1, s2, s3).
inline CheckResult check_closed_reinstatement(const Situation& sit)
{
    CheckResult r;
    const auto& d = sit.derived();
    const std::size_t n = sit.arg_count();
    for (std::size_t s1 = 0; s1 < n; ++s1) {
        for_each_member(d.trumps_exists.preimage(s1), [&](std::size_t s2) {
            for_each_member(d.trumps_forall.preimage(s2) & d.decisive, [&](std::size_t s3) {
                if (s3 == s1 || s3 == s2 || s1 == s2)
                    return;
                IdSet allowed = d.trumps_exists.preimage(s1);
                allowed.reset(s2);
                bool found = false;
                for (std::size_t s = 0; s < n && !found; ++s)
                    found = replaces(sit, s, s1) && d.trumps_exists.preimage(s).is_subset_of(allowed);
                if (!found)
                    r.fail({s1, s2, s3});
            });
        });
    }
    return r;
}

/// Every gamma-defended member of gamma is defended by at most j members. Witness: {s}.
inline CheckResult check_width_bound(const Situation& sit, const IdSet& gamma, std::size_t j)
{
    CheckResult r;
    for_each_member(gamma, [&](std::size_t s) {
        auto def = minimal_defense(sit, gamma, s);
        if (!def.defended)
            return;
        if (def.cap_exceeded) {
            r.undetermined = true;
            r.pass = false;
        } else if (def.cover.count() > j) {
            r.fail({s});
        }
    });
    return r;
}

inline std::size_t max_trumper_indegree(const Situation& sit)
{
    std::size_t m = 0;
    for (std::size_t s = 0; s < sit.arg_count(); ++s)
        m = std::max(m, sit.trumps().preimage(s).count());
    return m;
}

/// No Q-path of k+1 steps within gamma. Witness: (from, to) joined by such a path.
inline CheckResult check_length_bound(const Situation& sit, const IdSet& gamma, std::size_t k)
{
    CheckResult r;
    const Relation q = q_relation(sit, gamma);
    Relation power = q;
    for (std::size_t e = 1; e <= k && !power.empty(); ++e)
        power = then(power, q);
    for (auto [a, b] : power.pairs())
        r.fail({a, b});
    return r;
}

/// No infinite chain in the trump relation; on a finite set, acyclicity.
inline bool trumps_acyclic(const Situation& sit) { return !has_cycle(sit.trumps()); }

// ---------------------------------------------------------------------------
// The combined condition

struct CacReport
{
    IdSet gamma;
    CheckResult reinstatement;
    CheckResult answerability;
    CheckResult width;
    CheckResult length;
    CheckResult covering;
    std::optional<std::size_t> j;
    std::optional<std::size_t> k;
    bool cac = false;

    // Whole-situation reports, informative in a finite setting.
    std::size_t max_trumper_indegree = 0;
    bool trumps_acyclic = true;
};

inline CacReport check_cac(const Situation& sit, const IdSet& gamma)
{
    CacReport r;
    r.gamma = gamma;
    r.reinstatement = check_closed_reinstatement(sit, gamma);
    r.answerability = check_answerability(sit, gamma);
    r.covering = check_covering(sit, gamma);
    r.j = smallest_width(sit, gamma);
    if (r.j) {
        r.width = check_width_bound(sit, gamma, *r.j);
    } else {
        r.width.pass = false;
        r.width.undetermined = true;
    }
    r.k = smallest_length(sit, gamma);
    if (r.k) {
        r.length = check_length_bound(sit, gamma, *r.k);
    } else {
        r.length = check_length_bound(sit, gamma, gamma.count());
    }
    r.cac = r.reinstatement.pass && r.answerability.pass && r.width.pass && r.length.pass && r.covering.pass;
    r.max_trumper_indegree = dj::max_trumper_indegree(sit);
    r.trumps_acyclic = dj::trumps_acyclic(sit);
    return r;
}

// ---------------------------------------------------------------------------
// Efficiency

struct EfficiencyReport
{
    bool pass = true;
    IdSet offending; // propositions
};

/// The decisive members of S settle the judgment: their supports are exactly
/// the justifiable propositions, and a proposition is not justifiable iff all
/// its supporters are trumped in all perspectives by those members.
inline EfficiencyReport check_efficiency(const Situation& sit, const IdSet& s)
{
    EfficiencyReport r;
    r.offending = sit.no_props();
    const auto& d = sit.derived();
    const IdSet dec = s & d.decisive;
    const IdSet judged = deliberated_judgment(sit);
    const IdSet supported = sit.support().image(dec);
    const IdSet defeated = d.trumps_forall.image(dec);
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        const bool in_judgment = judged.test(t);
        const bool settled = in_judgment == supported.test(t);
        const bool characterized = !in_judgment == sit.support().preimage(t).is_subset_of(defeated);
        if (!settled || !characterized)
            r.offending.set(t);
    }
    r.pass = r.offending.none();
    return r;
}

inline bool is_efficient(const Situation& sit, const IdSet& s) { return check_efficiency(sit, s).pass; }

// ---------------------------------------------------------------------------
// The set inclusions used to derive efficiency from the combined condition

struct LemmaCheck
{
    bool hypothesis = false;
    bool conclusion = false;

    [[nodiscard]] bool violated() const { return hypothesis && !conclusion; }
};

struct LemmaReport
{
    LemmaCheck defended_replaceable;   // def within r_dec, given answerability and reinstatement
    LemmaCheck resistant_partition;    // all = e_res + trumped-by-res, given covering
    LemmaCheck resistant_defended;     // res within def, given the combined condition
    LemmaCheck decisive_partition;     // all = e_dec + trumped-by-dec, given the combined condition
    LemmaCheck support_chain;          // the four support-image inclusions, given the combined condition
    bool defense_readings_agree = true; // finite defense vs all-perspective defense within gamma
    bool answerable = false;

    [[nodiscard]] bool any_violation() const
    {
        return defended_replaceable.violated() || resistant_partition.violated() || resistant_defended.violated() ||
               decisive_partition.violated() || support_chain.violated() || (answerable && !defense_readings_agree);
    }
};

inline LemmaReport lemma_suite(const Situation& sit, const IdSet& gamma)
{
    LemmaReport r;
    const auto a = analyze_gamma(sit, gamma);
    const auto cac = check_cac(sit, gamma);
    const auto& tr = sit.trumps();
    const IdSet all = sit.all_args();

    r.answerable = cac.answerability.pass;
    r.defense_readings_agree = a.def == a.defended;

    r.defended_replaceable.hypothesis = cac.answerability.pass && cac.reinstatement.pass;
    r.defended_replaceable.conclusion = a.def.is_subset_of(a.r_dec);

    r.resistant_partition.hypothesis = cac.covering.pass;
    r.resistant_partition.conclusion = (a.e_res | tr.image(a.res)) == all;

    r.resistant_defended.hypothesis = cac.cac;
    r.resistant_defended.conclusion = a.res.is_subset_of(a.def);

    r.decisive_partition.hypothesis = cac.cac;
    r.decisive_partition.conclusion = (a.e_dec | tr.image(a.dec)) == all;

    const auto& sup = sit.support();
    const IdSet from_e_dec = sup.image(a.e_dec);
    const IdSet from_dec = sup.image(a.dec);
    const IdSet judged = deliberated_judgment(sit);
    const IdSet undefeated = sup.image(all - sit.trumps_forall().image(a.dec));
    r.support_chain.hypothesis = cac.cac;
    r.support_chain.conclusion = from_e_dec.is_subset_of(from_dec) && from_dec.is_subset_of(judged) &&
                                 judged.is_subset_of(undefeated) && undefeated.is_subset_of(from_e_dec);
    return r;
}

} // namespace dj
