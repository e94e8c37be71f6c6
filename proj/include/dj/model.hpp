#pragma once

#include "dj/conditions.hpp"
#include "dj/judgment.hpp"
#include "dj/situation.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dj {

/// An analyst's model: claimed supports (argument, proposition) and counters
/// (counter, countered).
struct Model
{
    std::vector<IdPair> support;
    std::vector<IdPair> counters;

    friend bool operator==(const Model&, const Model&) = default;
};

inline Model canonicalize(Model m)
{
    detail::sort_unique(m.support);
    detail::sort_unique(m.counters);
    return m;
}

class InvalidModel : public std::runtime_error
{
public:
    explicit InvalidModel(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), _violations(std::move(violations))
    {
    }

    [[nodiscard]] const std::vector<std::string>& violations() const { return _violations; }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid model";
        for (const auto& s : v)
            out += "; " + s;
        return out;
    }

    std::vector<std::string> _violations;
};

inline ValidationReport validate_model(const Situation& sit, const Model& m)
{
    ValidationReport r;
    for (const auto& [s, t] : m.support) {
        if (!sit.find_arg(s))
            r.violations.push_back("unknown argument " + s + " in model support");
        if (!sit.find_prop(t))
            r.violations.push_back("unknown proposition " + t + " in model support");
    }
    for (const auto& [a, b] : m.counters) {
        if (!sit.find_arg(a))
            r.violations.push_back("unknown argument " + a + " in model counters");
        if (!sit.find_arg(b))
            r.violations.push_back("unknown argument " + b + " in model counters");
        if (a == b)
            r.violations.push_back("self-counter (" + a + ", " + a + ")");
    }
    return r;
}

/// A model resolved against a situation's index tables.
struct IndexedModel
{
    Relation support;  // arguments x propositions
    Relation counters; // arguments x arguments

    friend bool operator==(const IndexedModel&, const IndexedModel&) = default;
};

inline IndexedModel empty_model(const Situation& sit)
{
    return {Relation(sit.arg_count(), sit.prop_count()), Relation(sit.arg_count(), sit.arg_count())};
}

inline IndexedModel index_model(const Situation& sit, const Model& m)
{
    if (auto r = validate_model(sit, m); !r.ok())
        throw InvalidModel(r.violations);
    IndexedModel out = empty_model(sit);
    for (const auto& [s, t] : m.support)
        out.support.insert(sit.arg(s), sit.prop(t));
    for (const auto& [a, b] : m.counters)
        out.counters.insert(sit.arg(a), sit.arg(b));
    return out;
}

inline Model to_model(const Situation& sit, const IndexedModel& m)
{
    Model out;
    for (auto [s, t] : m.support.pairs())
        out.support.emplace_back(sit.arg_name(s), sit.prop_name(t));
    for (auto [a, b] : m.counters.pairs())
        out.counters.emplace_back(sit.arg_name(a), sit.arg_name(b));
    return canonicalize(std::move(out));
}

/// T_eta: the propositions the model claims are supported.
inline IdSet model_claims(const Situation& sit, const IndexedModel& m)
{
    return m.support.image(sit.all_args());
}

inline bool is_valid(const Situation& sit, const IndexedModel& m)
{
    return model_claims(sit, m) == deliberated_judgment(sit);
}

// ---------------------------------------------------------------------------
// Operational validity

enum class FailureKind { unsupported_claim, uncountered_trumper, missing_counter };

inline const char* to_string(FailureKind k)
{
    switch (k) {
    case FailureKind::unsupported_claim: return "unsupported-claim";
    case FailureKind::uncountered_trumper: return "uncountered-trumper";
    case FailureKind::missing_counter: return "missing-counter-for-supporter";
    }
    return "?";
}

/// unsupported-claim: (s, t); uncountered-trumper: (s, s_c);
/// missing-counter-for-supporter: (t, s). Proposition indices where the
/// layout says t, argument indices elsewhere.
struct Failure
{
    FailureKind kind;
    std::size_t first;
    std::size_t second;

    friend bool operator==(const Failure&, const Failure&) = default;
    friend auto operator<=>(const Failure&, const Failure&) = default;
};

inline std::pair<std::string, std::string> failure_names(const Situation& sit, const Failure& f)
{
    switch (f.kind) {
    case FailureKind::unsupported_claim: return {sit.arg_name(f.first), sit.prop_name(f.second)};
    case FailureKind::uncountered_trumper: return {sit.arg_name(f.first), sit.arg_name(f.second)};
    case FailureKind::missing_counter: return {sit.prop_name(f.first), sit.arg_name(f.second)};
    }
    return {};
}

struct ValidityVerdict
{
    bool valid = true;
    std::vector<Failure> failures;  // sorted
    std::vector<std::size_t> outside_gamma_witnesses; // counter witnesses used from outside gamma
};

/// The query-checkable criterion restricted to gamma: trumpers of claimed
/// supporters are only considered inside gamma, and only supporters inside
/// gamma of unclaimed propositions must be countered. Counter witnesses may
/// come from anywhere.
inline ValidityVerdict check_operational_validity(const Situation& sit, const IdSet& gamma, const IndexedModel& m)
{
    ValidityVerdict v;
    const auto& d = sit.derived();
    std::set<std::size_t> outside;

    // A counter of x that the model offers and that trumps x in some perspective.
    auto confirmed_counter = [&](std::size_t x) {
        return (m.counters.preimage(x) & d.trumps_exists.preimage(x)).find_first();
    };

    IdSet claimed_supporters = sit.no_args();
    for (auto [s, t] : m.support.pairs()) {
        if (!sit.support().contains(s, t))
            v.failures.push_back({FailureKind::unsupported_claim, s, t});
        claimed_supporters.set(s);
    }
    for_each_member(claimed_supporters, [&](std::size_t s) {
        // Obligations arise for trumpers in gamma that trump s in every perspective.
        for_each_member(gamma & d.trumps_forall.preimage(s), [&](std::size_t sc) {
            auto scc = confirmed_counter(sc);
            if (scc == IdSet::npos)
                v.failures.push_back({FailureKind::uncountered_trumper, s, sc});
            else if (!gamma.test(scc))
                outside.insert(scc);
        });
    });

    const IdSet claims = model_claims(sit, m);
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        if (claims.test(t))
            continue;
        for_each_member(gamma & sit.support().preimage(t), [&](std::size_t s) {
            auto sc = confirmed_counter(s);
            if (sc == IdSet::npos)
                v.failures.push_back({FailureKind::missing_counter, t, s});
            else if (!gamma.test(sc))
                outside.insert(sc);
        });
    }

    std::sort(v.failures.begin(), v.failures.end());
    v.valid = v.failures.empty();
    v.outside_gamma_witnesses.assign(outside.begin(), outside.end());
    return v;
}

inline ValidityVerdict check_operational_validity(const Situation& sit, const IndexedModel& m)
{
    return check_operational_validity(sit, sit.all_args(), m);
}

// ---------------------------------------------------------------------------
// Synthesis and extraction

class NotClearCut : public std::runtime_error
{
public:
    explicit NotClearCut(std::vector<std::string> undecided)
        : std::runtime_error(message(undecided)), _undecided(std::move(undecided))
    {
    }

    [[nodiscard]] const std::vector<std::string>& undecided() const { return _undecided; }

private:
    static std::string message(const std::vector<std::string>& v)
    {
        std::string out = "situation is not clear-cut; neither justifiable nor untenable:";
        for (const auto& t : v)
            out += " " + t;
        return out;
    }

    std::vector<std::string> _undecided;
};

/// Lowest decisive supporter for every justifiable proposition, and for every
/// supporter of an untenable proposition the lowest decisive argument that
/// trumps it in all perspectives.
inline IndexedModel synthesize_model(const Situation& sit)
{
    auto cc = clear_cut(sit);
    if (!cc.clear_cut)
        throw NotClearCut(sit.prop_names(cc.undecided()));
    const auto& d = sit.derived();
    IndexedModel m = empty_model(sit);
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        if (cc.statuses[t] == Status::justifiable) {
            m.support.insert((sit.support().preimage(t) & d.decisive).find_first(), t);
        } else {
            for_each_member(sit.support().preimage(t), [&](std::size_t s) {
                m.counters.insert((d.trumps_forall.preimage(s) & d.decisive).find_first(), s);
            });
        }
    }
    return m;
}

struct Extraction
{
    EfficiencyReport efficiency;
    IdSet gamma;             // empty unless efficient
    std::optional<CacReport> cac; // present when efficient
    bool ok() const { return efficiency.pass && cac && cac->cac; }
};

/// Builds a candidate CAC subset of an efficient set S out of its decisive
/// members: one supporter for each justifiable proposition and, for each
/// supporter of an untenable proposition, one member trumping it in all
/// perspectives. Members that are ambivalent towards nothing are preferred,
/// since an ambivalent trump from an untrumped member breaks answerability.
inline Extraction extract_cac_subset(const Situation& sit, const IdSet& s)
{
    Extraction out;
    out.efficiency = check_efficiency(sit, s);
    out.gamma = sit.no_args();
    if (!out.efficiency.pass)
        return out;

    const auto& d = sit.derived();
    const IdSet pool = s & d.decisive;
    IdSet clean = pool;
    for_each_member(pool, [&](std::size_t a) {
        if ((d.trumps_exists.image(a) & d.not_trumps_exists.image(a)).any())
            clean.reset(a);
    });
    auto pick = [&](const IdSet& candidates) {
        auto c = (candidates & clean).find_first();
        return c != IdSet::npos ? c : (candidates & pool).find_first();
    };

    const IdSet judged = deliberated_judgment(sit);
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        if (judged.test(t)) {
            out.gamma.set(pick(sit.support().preimage(t)));
        } else {
            for_each_member(sit.support().preimage(t),
                            [&](std::size_t sup) { out.gamma.set(pick(d.trumps_forall.preimage(sup))); });
        }
    }
    out.cac = check_cac(sit, out.gamma);
    return out;
}

} // namespace dj
