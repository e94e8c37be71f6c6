// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include "oracle.hpp"

#include "dj/dj.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace dj;

namespace {

// Pinned limits.
constexpr double fixture_seconds = 1.0;
constexpr double example_seconds = 1.0;
constexpr double fuzz_seconds = 300.0;
constexpr std::size_t fuzz_count = 1000;
constexpr std::uint64_t fuzz_seed = 7;
constexpr std::size_t dialogue_pairs = 200;
constexpr std::size_t allowed_violations = 0;

struct Outcome
{
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(std::string s) { notes.push_back(std::move(s)); }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (o.pass ? "PASS " : "FAIL ") << name << " (" << secs << " s)";
    std::cout << line.str() << "\n";
    for (const auto& n : o.notes)
        std::cout << "    " << n << "\n";
    std::cout.flush();
    failures += !o.pass;
}

double elapsed_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::set<std::string> prop_names(const Situation& sit, const IdSet& s)
{
    auto v = sit.prop_names(s);
    return {v.begin(), v.end()};
}

IdSet ids(const Situation& sit, const std::vector<std::string>& names)
{
    IdSet g = sit.no_args();
    for (const auto& n : names)
        g.set(sit.arg(n));
    return g;
}

std::string capture(const std::string& cmd, int* code)
{
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        *code = -1;
        return out;
    }
    std::array<char, 1 << 14> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        out.append(buf.data(), n);
    const int st = pclose(p);
    *code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return out;
}

void fixture_exactness(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Situation w(fixtures::weather()), v(fixtures::variant()), b(fixtures::budget()), f(fixtures::flicker());
    o.require(prop_names(w, deliberated_judgment(w)) == std::set<std::string>{"t"}, "WEATHER judgment = {t}");
    o.require(prop_names(v, deliberated_judgment(v)) == std::set<std::string>{"t1", "t2"},
              "VARIANT judgment = {t1, t2}");
    o.require(prop_names(b, deliberated_judgment(b)) == std::set<std::string>{"t"}, "BUDGET judgment = {t}");
    const auto cc = clear_cut(f);
    o.require(!cc.clear_cut, "FLICKER is not clear-cut");
    o.require(status_of(f, f.prop("t")) == Status::neither, "FLICKER t is neither");
    const double secs = elapsed_since(t0);
    o.require(secs < fixture_seconds, "under " + std::to_string(fixture_seconds) + " s");
}

void budget_end_to_end(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Situation b(fixtures::budget());
    const auto r = check_cac(b, b.all_args());
    o.require(r.cac, "check_cac(BUDGET, S*) passes");
    o.require(r.j == 2u, "j = 2");
    o.require(r.k == 2u, "k = 2");
    const auto m = index_model(b, fixtures::budget_model());
    o.require(check_operational_validity(b, m).valid, "model operationally valid");
    o.require(check_operational_validity(b, b.all_args(), m).valid, "model gamma-operationally valid for S*");
    const auto judged = deliberated_judgment(b);
    o.require(model_claims(b, m) == judged, "T_eta = T_i");
    o.require(prop_names(b, judged) == std::set<std::string>{"t"}, "T_i = {t}");
    // The same through a static dialogue.
    Agent agent(b, AgentPolicy::fixed);
    const auto tr = run_validation_dialogue(agent, {m, b.all_args(), 1});
    o.require(tr.outcome.verdict == Verdict::valid, "dialogue verdict valid");
    o.note(std::to_string(tr.queries.size()) + " queries");
    o.require(elapsed_since(t0) < example_seconds, "under " + std::to_string(example_seconds) + " s");
}

void fuzz_suite(Outcome& o)
{
    FuzzConfig cfg;
    cfg.count = fuzz_count;
    cfg.seed = fuzz_seed;
    cfg.max_args = 12;
    cfg.max_props = 6;
    cfg.max_perspectives = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = fuzz_theorems(cfg);
    const double secs = elapsed_since(t0);

    const std::vector<std::pair<std::string, std::string>> parts{
        {"a", "mutex"}, {"b", "encoding"}, {"c", "cac-efficient"}, {"d", "cac-judgment"},
        {"e", "efficient-validity"},  {"f", "extraction"},     {"g", "lemmas"}, {"h", "chain"}};
    for (const auto& [label, check] : parts) {
        auto it = r.violation_counts.find(check);
        const std::size_t n = it == r.violation_counts.end() ? 0 : it->second;
        o.note("(" + label + ") " + check + ": " + std::to_string(n) + " violations");
        o.require(n <= allowed_violations, "(" + label + ") " + check + " has " + std::to_string(n) + " violations");
    }
    std::string profiles;
    for (const auto& [k, v] : r.profiles)
        profiles += " " + k + "=" + std::to_string(v);
    o.note("profiles:" + profiles + ", cac-enforced fallbacks=" + std::to_string(r.fallbacks));
    for (const char* k : {"cac_gamma", "efficient_gamma", "op_valid_model", "efficient_set", "extraction_cac",
                          "efficient_without_cac_subset", "extraction_missed_existing_cac",
                          "extraction_failed_search_skipped"}) {
        auto it = r.hits.find(k);
        o.note(std::string(k) + ": " + std::to_string(it == r.hits.end() ? 0 : it->second));
    }
    for (const auto& v : r.violations)
        if (v.check == "extraction") {
            o.note("first extraction case: instance " + std::to_string(v.instance) + ": " + v.detail);
            break;
        }
    o.require(secs < fuzz_seconds, "under " + std::to_string(fuzz_seconds) + " s");
}

/// A model for a pair: synthesized when possible, then randomly edited, or random outright.
IndexedModel pair_model(const Situation& sit, std::mt19937_64& rng)
{
    IndexedModel m = empty_model(sit);
    const auto n = sit.arg_count(), np = sit.prop_count();
    if (is_clear_cut(sit) && rng() % 3 != 0)
        m = synthesize_model(sit);
    const int edits = static_cast<int>(rng() % 3);
    for (int e = 0; e < edits; ++e) {
        const auto a = rng() % n, b = rng() % n;
        switch (rng() % 4) {
        case 0: m.support.insert(a, rng() % np); break;
        case 1: {
            auto p = m.support.pairs();
            if (!p.empty())
                m.support.erase(p[rng() % p.size()].first, p[rng() % p.size()].second);
            break;
        }
        case 2:
            if (a != b)
                m.counters.insert(a, b);
            break;
        default: {
            auto p = m.counters.pairs();
            if (!p.empty()) {
                auto pr = p[rng() % p.size()];
                m.counters.erase(pr.first, pr.second);
            }
        }
        }
    }
    return m;
}

IdSet pair_gamma(const Situation& sit, std::mt19937_64& rng)
{
    switch (rng() % 3) {
    case 0: return sit.all_args();
    case 1: return sit.decisive();
    default: {
        IdSet g = sit.no_args();
        for (std::size_t i = 0; i < sit.arg_count(); ++i)
            if (rng() & 1)
                g.set(i);
        return g;
    }
    }
}

std::set<oracle::FailureS> truth_of(const Situation& sit, const oracle::World& w, const IdSet& g, const IndexedModel& m)
{
    oracle::ModelS ms;
    for (auto [s, t] : m.support.pairs())
        ms.support.insert({sit.arg_name(s), sit.prop_name(t)});
    for (auto [a, b] : m.counters.pairs())
        ms.counters.insert({sit.arg_name(a), sit.arg_name(b)});
    auto v = sit.arg_names(g);
    return oracle::op_failures(w, oracle::Set(v.begin(), v.end()), ms);
}

oracle::FailureS named(const Situation& sit, const Failure& f)
{
    auto [a, b] = failure_names(sit, f);
    return {to_string(f.kind), a, b};
}

void dialogue_soundness(Outcome& o)
{
    std::mt19937_64 rng(fuzz_seed);
    std::size_t static_pairs = 0, static_mismatch = 0, static_inconclusive = 0;
    std::size_t multi_pairs = 0, unsound_discharge = 0, unsound_failure = 0, invalid_without_violation = 0,
                valid_on_invalid = 0, inconclusive = 0, replay_rejected = 0;

    FuzzConfig single;
    single.seed = fuzz_seed;
    single.max_perspectives = 1;
    FuzzConfig multi;
    multi.seed = fuzz_seed + 1;

    for (std::size_t i = 0; static_pairs < dialogue_pairs; ++i) {
        const auto doc = fuzz_instance(single, i).second;
        const Situation sit(doc);
        const auto w = oracle::world(doc);
        const auto g = pair_gamma(sit, rng);
        const auto m = pair_model(sit, rng);
        Agent agent(sit, AgentPolicy::fixed);
        const auto tr = run_validation_dialogue(agent, {m, g, 1});
        const auto truth = truth_of(sit, w, g, m);
        std::set<oracle::FailureS> got;
        for (const auto& f : tr.outcome.failures)
            got.insert(named(sit, f));
        static_inconclusive += tr.outcome.verdict == Verdict::inconclusive;
        static_mismatch += (tr.outcome.verdict == Verdict::valid) != truth.empty() || got != truth;
        replay_rejected += !replay_transcript(sit, tr);
        ++static_pairs;
    }

    for (std::size_t i = 0; multi_pairs < dialogue_pairs; ++i) {
        const auto doc = fuzz_instance(multi, i).second;
        const Situation sit(doc);
        if (sit.perspective_count() < 2)
            continue;
        const auto w = oracle::world(doc);
        const auto g = pair_gamma(sit, rng);
        const auto m = pair_model(sit, rng);
        const auto truth = truth_of(sit, w, g, m);
        ++multi_pairs;
        for (auto policy : {AgentPolicy::cyclic, AgentPolicy::drift}) {
            Agent agent(sit, policy, rng(), rng() % sit.perspective_count());
            const std::size_t budget = policy == AgentPolicy::cyclic ? sit.perspective_count() : 16;
            const auto tr = run_validation_dialogue(agent, {m, g, budget});
            replay_rejected += !replay_transcript(sit, tr);
            for (const auto& ob : tr.outcome.obligations) {
                if (ob.state != Obligation::State::discharged)
                    continue;
                const auto& r = tr.queries.at(ob.evidence);
                const auto a = sit.arg_name(r.query.first);
                if (r.query.kind != QueryKind::trump)
                    continue; // a support "no" discharges; supports are fixed facts
                const auto b = sit.arg_name(r.query.second);
                if (r.yes ? !w.tr(a, b) : !w.ntr(a, b))
                    ++unsound_discharge;
            }
            if (tr.outcome.verdict == Verdict::invalid) {
                if (truth.empty())
                    ++invalid_without_violation;
                for (const auto& f : tr.outcome.failures)
                    unsound_failure += !truth.contains(named(sit, f));
            }
            valid_on_invalid += tr.outcome.verdict == Verdict::valid && !truth.empty();
            inconclusive += tr.outcome.verdict == Verdict::inconclusive;
        }
    }

    o.note("static: " + std::to_string(static_pairs) + " single-perspective pairs, " +
           std::to_string(static_mismatch) + " mismatches, " + std::to_string(static_inconclusive) + " inconclusive");
    o.note("cyclic/drift: " + std::to_string(multi_pairs) + " multi-perspective pairs, " +
           std::to_string(unsound_discharge) + " unsound discharges, " + std::to_string(unsound_failure) +
           " unsound failures, " + std::to_string(invalid_without_violation) + " invalid without violation, " +
           std::to_string(valid_on_invalid) + " valid on invalid, " + std::to_string(inconclusive) + " inconclusive");
    o.require(static_mismatch == 0, "static verdicts equal the direct check");
    o.require(static_inconclusive == 0, "no inconclusive static verdicts");
    o.require(unsound_discharge == 0, "every discharge re-verifies");
    o.require(unsound_failure == 0 && invalid_without_violation == 0, "every invalid verdict re-verifies");
    o.require(valid_on_invalid == 0, "no valid verdict on an invalid model");
    o.require(replay_rejected == 0, "every transcript replays");
}

/// BUDGET plus arguments that are unnecessary with respect to the certified gamma.
DecisionSituation budget_extended()
{
    auto d = fixtures::budget();
    auto& p1 = std::get<PerspectiveEncoding>(d.relations).perspectives.at("p1");
    // another reformulation of s, trumped by the resistant sc1c
    d.arguments.push_back("s4r");
    d.support.emplace_back("s4r", "t");
    p1.emplace_back("sc1c", "s4r");
    // an untrumped supporter of t that trumps nothing
    d.arguments.push_back("s5");
    d.support.emplace_back("s5", "t");
    // a second answer to sc1
    d.arguments.push_back("sc1d");
    p1.emplace_back("sc1d", "sc1");
    // an unrelated 3-cycle
    for (const char* x : {"x1", "x2", "x3"})
        d.arguments.push_back(x);
    p1.emplace_back("x1", "x2");
    p1.emplace_back("x2", "x3");
    p1.emplace_back("x3", "x1");
    return d;
}

void unnecessary_argument_regression(Outcome& o)
{
    const Situation old_sit(fixtures::budget());
    const auto cert = check_cac(old_sit, old_sit.all_args());
    o.require(cert.cac, "certificate: CAC(BUDGET, S*)");
    const auto model = fixtures::budget_model();
    Agent agent(old_sit, AgentPolicy::fixed);
    const auto stored = run_validation_dialogue(agent, {index_model(old_sit, model), old_sit.all_args(), 1});
    o.require(stored.outcome.verdict == Verdict::valid, "stored verdict valid");
    const auto gamma_names = old_sit.arg_names(old_sit.all_args());

    const Situation sit(budget_extended());
    const IdSet gamma = ids(sit, gamma_names);
    for (const char* added : {"s4r", "s5", "sc1d", "x1", "x2", "x3"})
        o.require(is_unnecessary(sit, gamma, sit.arg(added)), std::string(added) + " is unnecessary for the old gamma");
    o.require(check_covering(sit, gamma).pass, "old gamma still covering");

    // Recompute everything the certificate and the stored verdict stand for.
    const auto r = check_cac(sit, gamma);
    o.require(r.cac, "old gamma still CAC");
    o.require(r.j == cert.j && r.k == cert.k, "same j and k");
    const auto m = index_model(sit, model);
    o.require(check_operational_validity(sit, gamma, m).valid, "stored model still gamma-operationally valid");
    o.require(prop_names(sit, deliberated_judgment(sit)) == std::set<std::string>{"t"}, "T_i unchanged = {t}");
    o.require(model_claims(sit, m) == deliberated_judgment(sit), "T_eta = T_i");

    // The stored answers, read against the new situation, still give the same verdict.
    Transcript moved;
    moved.spec = {m, gamma, stored.spec.budget};
    for (const auto& q : stored.queries) {
        QueryRecord r2 = q;
        r2.query.first = sit.arg(old_sit.arg_name(q.query.first));
        if (q.query.kind == QueryKind::trump)
            r2.query.second = sit.arg(old_sit.arg_name(q.query.second));
        moved.queries.push_back(r2);
    }
    moved.outcome = stored.outcome;
    for (auto& ob : moved.outcome.obligations) {
        if (ob.kind != FailureKind::missing_counter)
            ob.first = sit.arg(old_sit.arg_name(ob.first));
        if (ob.kind != FailureKind::unsupported_claim)
            ob.second = sit.arg(old_sit.arg_name(ob.second));
    }
    const auto rep = check_transcript(sit, moved);
    o.require(rep.ok, "stored transcript replays on the extended situation" + (rep.ok ? "" : ": " + rep.reason));
    o.note(std::to_string(stored.queries.size()) + " stored queries, none re-asked");
}

void determinism(Outcome& o)
{
    const std::string cmd = "DJ_COLOR=0 " + std::string(DJ_CLI_PATH) + " fuzz --count " + std::to_string(fuzz_count) +
                            " --seed " + std::to_string(fuzz_seed) + " 2>/dev/null";
    int c1 = 0, c2 = 0;
    const auto a = capture(cmd, &c1);
    const auto b = capture(cmd, &c2);
    o.require(c1 == c2 && (c1 == 0 || c1 == 1), "both runs completed");
    const auto ja = parse_json(a), jb = parse_json(b);
    const auto ra = dump(ja.at("report")), rb = dump(jb.at("report"));
    o.require(ra == rb, "report sections byte-identical");
    o.note("report section " + std::to_string(ra.size()) + " bytes");
}

} // namespace

int main()
{
    criterion("fixture exactness", fixture_exactness);
    criterion("BUDGET end to end", budget_end_to_end);
    criterion("theorem fuzz suite (a)-(h)", fuzz_suite);
    criterion("dialogue soundness", dialogue_soundness);
    criterion("unnecessary-argument regression", unnecessary_argument_regression);
    criterion("determinism of dj fuzz", determinism);
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << "\n";
    return failures;
}
