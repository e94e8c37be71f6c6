#pragma once

#include "dj/agent.hpp"
#include "dj/model.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dj {

enum class Verdict { valid, invalid, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::valid: return "valid";
    case Verdict::invalid: return "invalid";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

/// One clause instance of the validity criterion, in the same layout as Failure:
/// unsupported_claim is the (s, t) claim itself, uncountered_trumper is (s, s_c)
/// for a probed trumper s_c in gamma, missing_counter is (t, s) for a supporter
/// s in gamma of an unclaimed t.
struct Obligation
{
    enum class State { discharged, failed, unresolved };

    FailureKind kind;
    std::size_t first;
    std::size_t second;
    State state = State::discharged;
    std::size_t evidence = 0; // index of the query that settled it (last asked when unresolved)

    friend bool operator==(const Obligation&, const Obligation&) = default;
};

inline const char* to_string(Obligation::State s)
{
    switch (s) {
    case Obligation::State::discharged: return "discharged";
    case Obligation::State::failed: return "failed";
    case Obligation::State::unresolved: return "unresolved";
    }
    return "?";
}

struct DialogueOutcome
{
    Verdict verdict = Verdict::valid;
    std::vector<Failure> failures; // sorted
    std::vector<Obligation> obligations;
    bool variability = false; // some trump pair was answered both yes and no

    friend bool operator==(const DialogueOutcome&, const DialogueOutcome&) = default;
};

struct DialogueSpec
{
    IndexedModel model;
    IdSet gamma;
    std::size_t budget = 1;
};

struct Transcript
{
    DialogueSpec spec;
    std::vector<QueryRecord> queries;
    DialogueOutcome outcome;
};

/// Upper bound on the number of queries a dialogue can ask.
inline std::size_t query_bound(const Situation& sit, const DialogueSpec& spec)
{
    const std::size_t g = spec.gamma.count();
    const std::size_t c = spec.model.counters.size();
    const std::size_t unclaimed = sit.prop_count() - model_claims(sit, spec.model).count();
    return spec.model.support.size() * (1 + g * (1 + spec.budget * (c + 1))) +
           unclaimed * g * (1 + spec.budget * c);
}

inline void check_spec(const Situation& sit, const DialogueSpec& spec)
{
    if (spec.budget == 0)
        throw std::invalid_argument("budget must be at least 1");
    if (spec.gamma.size() != sit.arg_count())
        throw std::invalid_argument("gamma does not match the situation");
    if (spec.model.support.rows() != sit.arg_count() || spec.model.support.cols() != sit.prop_count() ||
        spec.model.counters.rows() != sit.arg_count())
        throw std::invalid_argument("model does not match the situation");
}

/// The analyst's side of the dialogue. `ask` answers one query with a bool.
///
/// Order: each claimed support is confirmed; then, for every claimed
/// supporter s and every other s_c in gamma, the trump (s_c, s) is probed.
/// A yes needs a model counter of s_c confirmed by a yes; each counter is
/// tried up to `budget` times in a row, after which the probe itself is
/// re-asked up to `budget` times looking for a no (a no shows s_c does not
/// trump s everywhere). Finally, for every unclaimed t and s in gamma, a
/// confirmed supporter must have a model counter confirmed by a yes.
///
/// A no to a claimed support, or a confirmed supporter with no model counter
/// at all, is a definitive failure. Obligations left open after the retries
/// make the verdict inconclusive when the answers showed some pair both ways,
/// and invalid otherwise.
template <typename Ask>
DialogueOutcome drive_dialogue(const Situation& sit, const DialogueSpec& spec, Ask&& ask)
{
    check_spec(sit, spec);
    DialogueOutcome out;
    std::size_t asked = 0;
    std::map<std::pair<std::size_t, std::size_t>, unsigned> seen; // bit 1 = yes seen, bit 2 = no seen

    auto query = [&](QueryKind kind, std::size_t a, std::size_t b) {
        bool yes = ask(Query{kind, a, b});
        ++asked;
        if (kind == QueryKind::trump) {
            unsigned& s = seen[{a, b}];
            s |= yes ? 1u : 2u;
            if (s == 3u)
                out.variability = true;
        }
        return yes;
    };
    auto last = [&] { return asked - 1; };

    // Ask the counters of x, each up to budget times, until one is confirmed.
    auto confirm_counter = [&](std::size_t x) {
        for (std::size_t c : members(spec.model.counters.preimage(x)))
            for (std::size_t k = 0; k < spec.budget; ++k)
                if (query(QueryKind::trump, c, x))
                    return true;
        return false;
    };

    const auto& model = spec.model;
    IdSet claimed_supporters = sit.no_args();
    for (auto [s, t] : model.support.pairs()) {
        claimed_supporters.set(s);
        Obligation ob{FailureKind::unsupported_claim, s, t};
        if (!query(QueryKind::support, s, t))
            ob.state = Obligation::State::failed;
        ob.evidence = last();
        out.obligations.push_back(ob);
    }

    for_each_member(claimed_supporters, [&](std::size_t s) {
        for_each_member(spec.gamma, [&](std::size_t sc) {
            if (sc == s)
                return;
            Obligation ob{FailureKind::uncountered_trumper, s, sc};
            if (query(QueryKind::trump, sc, s)) {
                bool done = confirm_counter(sc);
                for (std::size_t k = 0; k < spec.budget && !done; ++k)
                    done = !query(QueryKind::trump, sc, s);
                if (!done)
                    ob.state = Obligation::State::unresolved;
            }
            ob.evidence = last();
            out.obligations.push_back(ob);
        });
    });

    const IdSet claims = model_claims(sit, model);
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        if (claims.test(t))
            continue;
        for_each_member(spec.gamma, [&](std::size_t s) {
            Obligation ob{FailureKind::missing_counter, t, s};
            if (query(QueryKind::support, s, t)) {
                if (model.counters.preimage(s).none())
                    ob.state = Obligation::State::failed;
                else if (!confirm_counter(s))
                    ob.state = Obligation::State::unresolved;
            }
            ob.evidence = last();
            out.obligations.push_back(ob);
        });
    }

    bool failed = false;
    bool unresolved = false;
    for (const auto& ob : out.obligations) {
        failed |= ob.state == Obligation::State::failed;
        unresolved |= ob.state == Obligation::State::unresolved;
    }
    const bool blame_unresolved = unresolved && !out.variability;
    for (const auto& ob : out.obligations)
        if (ob.state == Obligation::State::failed || (blame_unresolved && ob.state == Obligation::State::unresolved))
            out.failures.push_back({ob.kind, ob.first, ob.second});
    std::sort(out.failures.begin(), out.failures.end());

    if (failed || blame_unresolved)
        out.verdict = Verdict::invalid;
    else if (unresolved)
        out.verdict = Verdict::inconclusive;
    else
        out.verdict = Verdict::valid;
    return out;
}

/// Runs the whole dialogue against a simulated agent.
inline Transcript run_validation_dialogue(Agent& agent, const DialogueSpec& spec)
{
    Transcript tr;
    tr.spec = spec;
    tr.outcome = drive_dialogue(agent.situation(), spec, [&](const Query& q) {
        tr.queries.push_back(agent.ask(q));
        return tr.queries.back().yes;
    });
    return tr;
}

/// A dialogue answered one query at a time, e.g. by a person.
///
/// The engine is re-run over the recorded answers after each one; it stops at
/// the first query that has no recorded answer yet.
class Dialogue
{
public:
    Dialogue(const Situation& sit, DialogueSpec spec) : _sit(&sit)
    {
        check_spec(sit, spec);
        _tr.spec = std::move(spec);
        step();
    }

    [[nodiscard]] bool done() const { return !_pending.has_value(); }
    [[nodiscard]] const std::optional<Query>& pending() const { return _pending; }
    [[nodiscard]] const Transcript& transcript() const { return _tr; }
    [[nodiscard]] const std::vector<QueryRecord>& answers() const { return _tr.queries; }

    void answer(bool yes, std::optional<std::size_t> perspective = std::nullopt)
    {
        if (!_pending)
            throw std::logic_error("dialogue is already finished");
        _tr.queries.push_back({*_pending, yes, perspective});
        step();
    }

private:
    struct NeedAnswer
    {
        Query query;
    };

    void step()
    {
        std::size_t i = 0;
        try {
            _tr.outcome = drive_dialogue(*_sit, _tr.spec, [&](const Query& q) {
                if (i == _tr.queries.size())
                    throw NeedAnswer{q};
                return _tr.queries[i++].yes;
            });
            _pending.reset();
        } catch (const NeedAnswer& need) {
            _pending = need.query;
        }
    }

    const Situation* _sit;
    Transcript _tr;
    std::optional<Query> _pending;
};

struct ReplayReport
{
    bool ok = true;
    std::string reason;
};

/// Checks that every recorded answer is possible in `sit` and that the
/// dialogue rules, fed the recorded answers, ask exactly the recorded queries
/// and reach the recorded outcome.
inline ReplayReport check_transcript(const Situation& sit, const Transcript& tr)
{
    const auto& d = sit.derived();
    auto fail = [](std::string why) { return ReplayReport{false, std::move(why)}; };

    for (std::size_t i = 0; i < tr.queries.size(); ++i) {
        const auto& r = tr.queries[i];
        const auto& q = r.query;
        const std::string at = "query " + std::to_string(i) + ": ";
        if (q.first >= sit.arg_count())
            return fail(at + "unknown argument");
        if (q.kind == QueryKind::support) {
            if (q.second >= sit.prop_count())
                return fail(at + "unknown proposition");
            if (r.yes != sit.support().contains(q.first, q.second))
                return fail(at + "support answer contradicts the situation");
            continue;
        }
        if (q.second >= sit.arg_count())
            return fail(at + "unknown argument");
        if (r.yes && !d.trumps_exists.contains(q.first, q.second))
            return fail(at + "yes answer on a pair that trumps in no perspective");
        if (!r.yes && !d.not_trumps_exists.contains(q.first, q.second))
            return fail(at + "no answer on a pair that trumps in every perspective");
        if (r.perspective) {
            if (*r.perspective >= sit.perspective_count()) {
                if (sit.has_perspectives())
                    return fail(at + "unknown perspective");
            } else if (r.yes != sit.perspective(*r.perspective).contains(q.first, q.second)) {
                return fail(at + "answer contradicts the recorded perspective");
            }
        }
    }

    std::size_t i = 0;
    std::string mismatch;
    DialogueOutcome outcome;
    try {
        outcome = drive_dialogue(sit, tr.spec, [&](const Query& q) {
            if (i == tr.queries.size())
                throw std::runtime_error("transcript ends before the dialogue does");
            if (!(tr.queries[i].query == q))
                throw std::runtime_error("query " + std::to_string(i) + " differs from the rules");
            return tr.queries[i++].yes;
        });
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    } catch (const std::runtime_error& e) {
        return fail(e.what());
    }
    if (i != tr.queries.size())
        return fail("transcript has queries after the dialogue ends");
    if (!(outcome == tr.outcome))
        return fail("recorded outcome does not follow from the answers");
    return {};
}

inline bool replay_transcript(const Situation& sit, const Transcript& tr) { return check_transcript(sit, tr).ok; }

} // namespace dj
