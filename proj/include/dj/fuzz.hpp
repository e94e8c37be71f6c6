#pragma once

#include "dj/agent.hpp"
#include "dj/conditions.hpp"
#include "dj/elicitation.hpp"
#include "dj/generate.hpp"
#include "dj/io.hpp"
#include "dj/model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace dj {

inline const std::vector<std::string>& fuzz_check_names()
{
    static const std::vector<std::string> names{"mutex",  "encoding", "cac-efficient",  "cac-judgment",    "efficient-validity",
                                                "extraction",   "lemmas",   "chain", "dialogue"};
    return names;
}

/// Deliberate checker defects, to show the harness notices them.
enum class Mutation { none, cac_ignores_answerability, cac_ignores_covering };

struct FuzzConfig
{
    std::size_t count = 100;
    std::uint64_t seed = 0;
    std::size_t max_args = 12;
    std::size_t max_props = 6;
    std::size_t max_perspectives = 4;
    std::optional<Profile> profile; // none: mixed
    std::set<std::string> checks;   // empty: all
    Mutation mutation = Mutation::none;
    unsigned threads = 0; // 0: hardware concurrency
};

struct FuzzViolation
{
    std::string check;
    std::size_t instance = 0;
    std::uint64_t seed = 0;
    std::string detail;
    DecisionSituation situation;
};

struct InstanceOutcome
{
    Profile profile = Profile::free;
    bool fallback = false;
    std::map<std::string, std::size_t> hits;
    std::vector<FuzzViolation> violations;
};

struct FuzzReport
{
    FuzzConfig config;
    std::map<std::string, std::size_t> profiles;
    std::size_t fallbacks = 0;
    std::map<std::string, std::size_t> hits;
    std::map<std::string, std::size_t> violation_counts;
    std::vector<FuzzViolation> violations;
    double elapsed_seconds = 0;

    [[nodiscard]] std::size_t total_violations() const { return violations.size(); }
};

namespace detail {

inline std::uint64_t instance_seed(std::uint64_t master, std::size_t i)
{
    return splitmix64(master ^ splitmix64(0x6a09e667f3bcc909ull + i));
}

inline double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t draw_between(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    return lo + draw_index(rng, hi - lo + 1);
}

} // namespace detail

/// Parameters and instance for fuzz case i; a pure function of (config, i).
inline std::pair<GenParams, DecisionSituation> fuzz_instance(const FuzzConfig& cfg, std::size_t i, bool* fallback = nullptr)
{
    const std::uint64_t seed = detail::instance_seed(cfg.seed, i);
    std::mt19937_64 rng(seed);
    GenParams p;
    p.profile = cfg.profile ? *cfg.profile : static_cast<Profile>(detail::draw_index(rng, 3));
    p.n_props = detail::draw_between(rng, 1, cfg.max_props);
    p.n_perspectives = detail::draw_between(rng, 1, cfg.max_perspectives);
    p.support_density = 0.15 + 0.4 * detail::draw_unit(rng);
    p.trump_density = 0.05 + 0.35 * detail::draw_unit(rng);
    p.ambivalence_rate = 0.5 * detail::draw_unit(rng);
    if (fallback)
        *fallback = false;
    if (p.profile != Profile::cac_enforced) {
        p.n_args = detail::draw_between(rng, 2, cfg.max_args);
        p.seed = rng();
        return {p, gen_random(p)};
    }
    // Repairs add arguments; start small and redraw if the result is too large.
    for (int attempt = 0; attempt < 16; ++attempt) {
        p.n_args = detail::draw_between(rng, 2, std::max<std::size_t>(2, cfg.max_args / 2));
        p.seed = rng();
        try {
            auto doc = gen_random(p);
            if (doc.arguments.size() <= cfg.max_args)
                return {p, doc};
        } catch (const NonConvergence&) {
        }
    }
    if (fallback)
        *fallback = true;
    p.profile = Profile::layered;
    return {p, gen_random(p)};
}

namespace detail {

class InstanceFuzzer
{
public:
    InstanceFuzzer(const FuzzConfig& cfg, std::size_t index, std::uint64_t seed, const DecisionSituation& doc)
        : _cfg(cfg), _index(index), _seed(seed), _doc(doc), _sit(doc), _rng(splitmix64(seed))
    {
    }

    InstanceOutcome run()
    {
        sample_gammas();
        sample_models();
        if (enabled("mutex"))
            check_mutex();
        if (enabled("encoding"))
            check_encoding();
        for (std::size_t g = 0; g < _gammas.size(); ++g)
            check_gamma(g);
        if (enabled("extraction"))
            check_extraction();
        if (enabled("dialogue"))
            check_dialogue();
        return std::move(_out);
    }

private:
    bool enabled(const std::string& c) const { return _cfg.checks.empty() || _cfg.checks.contains(c); }

    void violation(const std::string& check, const std::string& detail)
    {
        _out.violations.push_back({check, _index, _seed, detail, _doc});
    }

    void hit(const std::string& what) { ++_out.hits[what]; }

    std::string names(const IdSet& s) const
    {
        std::string out = "{";
        for (const auto& n : _sit.arg_names(s))
            out += (out.size() > 1 ? "," : "") + n;
        return out + "}";
    }

    bool cac(const IdSet& gamma)
    {
        auto key = gamma;
        if (auto it = _cac_cache.find(key); it != _cac_cache.end())
            return it->second;
        auto r = check_cac(_sit, gamma);
        bool v = r.cac;
        if (_cfg.mutation == Mutation::cac_ignores_answerability)
            v = r.reinstatement.pass && r.width.pass && r.length.pass && r.covering.pass;
        else if (_cfg.mutation == Mutation::cac_ignores_covering)
            v = r.reinstatement.pass && r.answerability.pass && r.width.pass && r.length.pass;
        _cac_cache.emplace(std::move(key), v);
        return v;
    }

    void sample_gammas()
    {
        const std::size_t n = _sit.arg_count();
        auto add = [&](IdSet g) {
            if (std::find(_gammas.begin(), _gammas.end(), g) == _gammas.end())
                _gammas.push_back(std::move(g));
        };
        add(_sit.all_args());
        add(_sit.decisive());
        if (auto ex = extract_cac_subset(_sit, _sit.all_args()); ex.efficiency.pass)
            add(ex.gamma);
        for (int k = 0; k < 3; ++k) {
            IdSet g(n);
            for (std::size_t a = 0; a < n; ++a)
                if (draw(_rng, 0.5))
                    g.set(a);
            add(g);
        }
        IdSet minus = _sit.all_args();
        minus.reset(draw_index(_rng, n));
        add(minus);
    }

    IndexedModel random_model()
    {
        IndexedModel m = empty_model(_sit);
        for (std::size_t s = 0; s < _sit.arg_count(); ++s)
            for (std::size_t t = 0; t < _sit.prop_count(); ++t)
                if (draw(_rng, 0.2))
                    m.support.insert(s, t);
        for (std::size_t a = 0; a < _sit.arg_count(); ++a)
            for (std::size_t b = 0; b < _sit.arg_count(); ++b)
                if (a != b && draw(_rng, 0.1))
                    m.counters.insert(a, b);
        return m;
    }

    IndexedModel mutate(IndexedModel m)
    {
        const std::size_t n = _sit.arg_count();
        const std::size_t edits = 1 + draw_index(_rng, 3);
        for (std::size_t e = 0; e < edits; ++e) {
            if (draw(_rng, 0.5)) {
                auto s = draw_index(_rng, n), t = draw_index(_rng, _sit.prop_count());
                m.support.contains(s, t) ? m.support.erase(s, t) : m.support.insert(s, t);
            } else {
                auto a = draw_index(_rng, n), b = draw_index(_rng, n);
                if (a == b)
                    continue;
                m.counters.contains(a, b) ? m.counters.erase(a, b) : m.counters.insert(a, b);
            }
        }
        return m;
    }

    void sample_models()
    {
        _clear_cut = is_clear_cut(_sit);
        IndexedModel base = empty_model(_sit);
        if (_clear_cut) {
            _synth = synthesize_model(_sit);
            base = *_synth;
            _models.push_back(base);
        }
        for (int k = 0; k < 20; ++k)
            _models.push_back(mutate(base));
        for (int k = 0; k < 20; ++k)
            _models.push_back(random_model());
    }

    void check_mutex()
    {
        const auto& d = _sit.derived();
        if (!d.trumps_forall.is_subset_of(d.trumps_exists) || !d.not_trumps_forall.is_subset_of(d.not_trumps_exists))
            violation("mutex", "universal relation not inside existential relation");
        if (!(d.trumps_forall & d.not_trumps_forall).empty())
            violation("mutex", "a pair both always trumps and never trumps");
        for (std::size_t t = 0; t < _sit.prop_count(); ++t)
            if (is_justifiable(_sit, t) && is_untenable(_sit, t))
                violation("mutex", "proposition " + _sit.prop_name(t) + " is justifiable and untenable");
    }

    void check_encoding()
    {
        const Situation direct(to_direct(_doc));
        if (!(direct.derived() == _sit.derived()))
            violation("encoding", "derived relations differ between encodings");
        if (!(deliberated_judgment(direct) == deliberated_judgment(_sit)))
            violation("encoding", "judgment differs between encodings");
        for (const auto& g : _gammas) {
            auto a = check_cac(_sit, g), b = check_cac(direct, g);
            if (a.cac != b.cac || a.j != b.j || a.k != b.k ||
                a.reinstatement.witnesses != b.reinstatement.witnesses ||
                a.answerability.witnesses != b.answerability.witnesses ||
                a.covering.witnesses != b.covering.witnesses)
                violation("encoding", "condition report differs between encodings for gamma " + names(g));
            if (!(check_efficiency(_sit, g).offending == check_efficiency(direct, g).offending))
                violation("encoding", "efficiency differs between encodings for gamma " + names(g));
        }
    }

    void check_gamma(std::size_t gi)
    {
        const IdSet& g = _gammas[gi];
        const bool is_cac = cac(g);
        const bool efficient = is_efficient(_sit, g);
        const IdSet judgment = deliberated_judgment(_sit);
        if (is_cac)
            hit("cac_gamma");
        if (efficient)
            hit("efficient_gamma");

        if (enabled("cac-efficient") && is_cac && !efficient)
            violation("cac-efficient", "CAC gamma " + names(g) + " is not efficient");

        if (enabled("cac-judgment") && is_cac) {
            if (!_clear_cut) {
                violation("cac-judgment", "CAC gamma " + names(g) + " but the situation is not clear-cut");
            } else if (!check_operational_validity(_sit, g, *_synth).valid) {
                violation("cac-judgment", "synthesized model is not operationally valid for CAC gamma " + names(g));
            }
        }
        for (std::size_t mi = 0; mi < _models.size(); ++mi) {
            const auto& m = _models[mi];
            if (!(is_cac || efficient))
                break;
            if (!check_operational_validity(_sit, g, m).valid)
                continue;
            hit("op_valid_model");
            const bool claims_ok = model_claims(_sit, m) == judgment;
            if (enabled("cac-judgment") && is_cac && !claims_ok)
                violation("cac-judgment", "model " + std::to_string(mi) + " is operationally valid for CAC gamma " +
                                      names(g) + " but its claims differ from the judgment");
            if (enabled("efficient-validity") && efficient && !claims_ok)
                violation("efficient-validity", "model " + std::to_string(mi) + " is operationally valid for efficient gamma " +
                                      names(g) + " but its claims differ from the judgment");
        }

        if (enabled("lemmas") || enabled("chain")) {
            const auto lr = lemma_suite(_sit, g);
            if (lr.resistant_partition.hypothesis)
                hit("lemma_covering_hypothesis");
            if (enabled("lemmas")) {
                if (lr.defended_replaceable.violated())
                    violation("lemmas", "defended members not replaceable by decisive ones for gamma " + names(g));
                if (lr.resistant_partition.violated())
                    violation("lemmas", "resistant partition fails for covering gamma " + names(g));
                if (lr.resistant_defended.violated())
                    violation("lemmas", "resistant members not finitely defended for CAC gamma " + names(g));
                if (lr.decisive_partition.violated())
                    violation("lemmas", "decisive partition fails for CAC gamma " + names(g));
                if (lr.answerable && !lr.defense_readings_agree)
                    violation("lemmas", "defense readings disagree under answerability for gamma " + names(g));
            }
            if (enabled("chain") && lr.support_chain.violated())
                violation("chain", "support chain fails for CAC gamma " + names(g));
        }
    }

    /// Is there a CAC subset of s? Exhaustive; fine at desk scale.
    std::optional<bool> some_cac_subset(const IdSet& s)
    {
        const auto m = members(s);
        if (m.size() > 16)
            return std::nullopt;
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m.size()); ++mask) {
            IdSet g = _sit.no_args();
            for (std::size_t i = 0; i < m.size(); ++i)
                if (mask >> i & 1)
                    g.set(m[i]);
            if (cac(g))
                return true;
        }
        return false;
    }

    void check_extraction()
    {
        for (const auto& s : _gammas) {
            const bool efficient = is_efficient(_sit, s);
            // Forward: a CAC subset among the samples forces efficiency of s.
            for (const auto& g : _gammas)
                if (g.is_subset_of(s) && cac(g) && !efficient)
                    violation("extraction", "CAC subset " + names(g) + " of inefficient set " + names(s));
            if (!efficient)
                continue;
            hit("efficient_set");
            auto ex = extract_cac_subset(_sit, s);
            bool ok = ex.ok();
            if (_cfg.mutation != Mutation::none)
                ok = cac(ex.gamma);
            if (ok) {
                hit("extraction_cac");
                continue;
            }
            const auto exists = some_cac_subset(s);
            if (!exists) {
                hit("extraction_failed_search_skipped");
                violation("extraction", "extraction " + names(ex.gamma) + " from efficient set " + names(s) +
                                      " is not CAC; set too large to search for another");
            } else if (*exists) {
                hit("extraction_missed_existing_cac");
                violation("extraction", "extraction " + names(ex.gamma) + " from efficient set " + names(s) +
                                      " is not CAC although a CAC subset exists");
            } else {
                hit("efficient_without_cac_subset");
                violation("extraction", "efficient set " + names(s) + " has no CAC subset");
            }
        }
    }

    void check_dialogue()
    {
        if (!_sit.has_perspectives())
            return;
        const std::vector<IdSet> gammas{_gammas.begin(), _gammas.begin() + std::min<std::size_t>(3, _gammas.size())};
        const std::size_t n_models = std::min<std::size_t>(6, _models.size());
        for (const auto& g : gammas) {
            for (std::size_t mi = 0; mi < n_models; ++mi) {
                const auto& m = _models[mi];
                const auto truth = check_operational_validity(_sit, g, m);
                if (_sit.perspective_count() == 1) {
                    Agent agent(_sit, AgentPolicy::fixed);
                    run_one(agent, {m, g, 1}, truth, true);
                } else {
                    Agent cyclic(_sit, AgentPolicy::cyclic, 0, draw_index(_rng, _sit.perspective_count()));
                    run_one(cyclic, {m, g, _sit.perspective_count()}, truth, false);
                    Agent drift(_sit, AgentPolicy::drift, _rng());
                    run_one(drift, {m, g, 16}, truth, false);
                }
            }
        }
    }

    void run_one(Agent& agent, const DialogueSpec& spec, const ValidityVerdict& truth, bool exact)
    {
        hit("dialogue");
        const auto tr = run_validation_dialogue(agent, spec);
        const std::string who = std::string(to_string(agent.policy())) + " dialogue on gamma " + names(spec.gamma);
        if (auto rep = check_transcript(_sit, tr); !rep.ok)
            violation("dialogue", who + ": transcript does not replay: " + rep.reason);
        if (tr.queries.size() > query_bound(_sit, spec))
            violation("dialogue", who + ": query bound exceeded");
        const auto& d = _sit.derived();
        for (const auto& ob : tr.outcome.obligations) {
            if (ob.state != Obligation::State::discharged)
                continue;
            const auto& r = tr.queries.at(ob.evidence);
            if (r.query.kind == QueryKind::trump && r.yes && !d.trumps_exists.contains(r.query.first, r.query.second))
                violation("dialogue", who + ": obligation discharged by an unsound yes");
        }
        if (exact) {
            if (tr.outcome.verdict == Verdict::inconclusive)
                violation("dialogue", who + ": inconclusive with a single perspective");
            else if ((tr.outcome.verdict == Verdict::valid) != truth.valid || tr.outcome.failures != truth.failures)
                violation("dialogue", who + ": verdict differs from the direct check");
            return;
        }
        if (tr.outcome.verdict == Verdict::inconclusive)
            hit("dialogue_inconclusive");
        if (tr.outcome.verdict == Verdict::valid && !truth.valid)
            violation("dialogue", who + ": valid verdict on an operationally invalid model");
        if (tr.outcome.verdict == Verdict::invalid) {
            for (const auto& f : tr.outcome.failures)
                if (std::find(truth.failures.begin(), truth.failures.end(), f) == truth.failures.end())
                    violation("dialogue", who + ": reported failure is not a real violation");
        }
    }

    const FuzzConfig& _cfg;
    std::size_t _index;
    std::uint64_t _seed;
    DecisionSituation _doc;
    Situation _sit;
    std::mt19937_64 _rng;
    std::vector<IdSet> _gammas;
    std::vector<IndexedModel> _models;
    std::optional<IndexedModel> _synth;
    bool _clear_cut = false;
    std::map<IdSet, bool> _cac_cache;
    InstanceOutcome _out;
};

} // namespace detail

inline InstanceOutcome fuzz_one(const FuzzConfig& cfg, std::size_t i)
{
    bool fallback = false;
    auto [params, doc] = fuzz_instance(cfg, i, &fallback);
    auto out = detail::InstanceFuzzer(cfg, i, detail::instance_seed(cfg.seed, i), doc).run();
    out.profile = params.profile;
    out.fallback = fallback;
    return out;
}

inline FuzzReport fuzz_theorems(const FuzzConfig& cfg)
{
    for (const auto& c : cfg.checks)
        if (std::find(fuzz_check_names().begin(), fuzz_check_names().end(), c) == fuzz_check_names().end())
            throw std::invalid_argument("unknown check " + c);
    if (cfg.count == 0)
        throw std::invalid_argument("count must be at least 1");
    const auto start = std::chrono::steady_clock::now();

    std::vector<InstanceOutcome> outcomes(cfg.count);
    std::atomic<std::size_t> next{0};
    unsigned n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, cfg.count));
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfg.count;)
            outcomes[i] = fuzz_one(cfg, i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();

    FuzzReport r;
    r.config = cfg;
    for (auto& o : outcomes) {
        ++r.profiles[to_string(o.profile)];
        r.fallbacks += o.fallback;
        for (const auto& [k, v] : o.hits)
            r.hits[k] += v;
        for (auto& v : o.violations) {
            ++r.violation_counts[v.check];
            r.violations.push_back(std::move(v));
        }
    }
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// The comparable part of the report is a pure function of the configuration;
/// run information goes to "metadata".
inline Json fuzz_report_json(const FuzzReport& r, std::size_t max_listed = 50)
{
    Json rep;
    rep["count"] = r.config.count;
    rep["seed"] = r.config.seed;
    rep["profile"] = r.config.profile ? to_string(*r.config.profile) : "mixed";
    std::vector<std::string> checks =
        r.config.checks.empty() ? fuzz_check_names() : std::vector<std::string>(r.config.checks.begin(), r.config.checks.end());
    rep["checks"] = checks;
    rep["limits"] = {{"arguments", r.config.max_args},
                     {"propositions", r.config.max_props},
                     {"perspectives", r.config.max_perspectives}};
    Json profiles = Json::object();
    for (const auto& [k, v] : r.profiles)
        profiles[k] = v;
    rep["profiles"] = std::move(profiles);
    rep["cac_enforced_fallbacks"] = r.fallbacks;
    Json hits = Json::object();
    for (const auto& [k, v] : r.hits)
        hits[k] = v;
    rep["hypothesis_hits"] = std::move(hits);
    Json counts = Json::object();
    for (const auto& c : checks) {
        auto it = r.violation_counts.find(c);
        counts[c] = it == r.violation_counts.end() ? 0 : it->second;
    }
    rep["violation_counts"] = std::move(counts);
    rep["violations_total"] = r.total_violations();
    Json list = Json::array();
    for (std::size_t i = 0; i < r.violations.size() && i < max_listed; ++i) {
        const auto& v = r.violations[i];
        Json j;
        j["check"] = v.check;
        j["instance"] = v.instance;
        j["seed"] = v.seed;
        j["detail"] = v.detail;
        j["situation"] = situation_json(v.situation);
        list.push_back(std::move(j));
    }
    rep["violations"] = std::move(list);

    Json out;
    out["format"] = "dj-fuzz/1";
    out["report"] = std::move(rep);
    out["metadata"] = {{"elapsed_seconds", r.elapsed_seconds}};
    return out;
}

} // namespace dj
