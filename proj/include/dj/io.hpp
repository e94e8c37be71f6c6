#pragma once

#include "dj/conditions.hpp"
#include "dj/elicitation.hpp"
#include "dj/judgment.hpp"
#include "dj/model.hpp"
#include "dj/situation.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dj {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view situation_format = "dj-situation/1";
inline constexpr std::string_view model_format = "dj-model/1";
inline constexpr std::string_view transcript_format = "dj-transcript/1";
inline constexpr std::string_view check_format = "dj-check/1";
inline constexpr std::string_view judgment_format = "dj-judgment/1";
inline constexpr std::string_view validation_format = "dj-validation/1";
inline constexpr std::string_view extraction_format = "dj-extract/1";

/// Malformed or schema-violating document. `where` is "line:column" for
/// syntax errors and a JSON pointer for schema errors.
class DocumentError : public std::runtime_error
{
public:
    DocumentError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), _where(std::move(where))
    {
    }

    [[nodiscard]] const std::string& where() const { return _where; }

private:
    std::string _where;
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto pos = msg.find("; "); pos != std::string::npos)
            msg = msg.substr(pos + 2);
        throw DocumentError(std::to_string(line) + ":" + std::to_string(col), msg);
    }
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::string pointer(const std::string& base, std::string_view key) { return base + "/" + std::string(key); }

inline void expect(bool cond, const std::string& where, const std::string& what)
{
    if (!cond)
        throw DocumentError(where.empty() ? "/" : where, what);
}

inline void expect_keys(const Json& j, const std::string& where, std::initializer_list<std::string_view> required,
                        std::initializer_list<std::string_view> optional = {})
{
    expect(j.is_object(), where, "expected an object");
    for (auto k : required)
        expect(j.contains(k), pointer(where, k), "missing key");
    for (const auto& [k, v] : j.items()) {
        bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                     std::find(optional.begin(), optional.end(), k) != optional.end();
        expect(known, pointer(where, k), "unexpected key");
    }
}

inline void expect_format(const Json& j, std::string_view format)
{
    expect(j.is_object(), "", "expected an object");
    expect(j.contains("format"), "/format", "missing key");
    expect(j["format"].is_string(), "/format", "expected a string");
    const auto& f = j["format"].get_ref<const std::string&>();
    expect(f == format, "/format", "unknown format \"" + f + "\", expected \"" + std::string(format) + "\"");
}

/// A non-negative integer, whether it was parsed or built in code.
inline bool is_index(const Json& j) { return j.is_number_integer() && j.get<std::int64_t>() >= 0; }

inline std::vector<std::string> ids(const Json& j, const std::string& where)
{
    expect(j.is_array(), where, "expected an array of identifiers");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        expect(j[i].is_string(), where + "/" + std::to_string(i), "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

inline std::vector<IdPair> pairs(const Json& j, const std::string& where)
{
    expect(j.is_array(), where, "expected an array of pairs");
    std::vector<IdPair> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto at = where + "/" + std::to_string(i);
        expect(j[i].is_array() && j[i].size() == 2 && j[i][0].is_string() && j[i][1].is_string(), at,
               "expected a pair of identifiers");
        out.emplace_back(j[i][0].get<std::string>(), j[i][1].get<std::string>());
    }
    return out;
}

inline Json pairs_json(const std::vector<IdPair>& v)
{
    Json out = Json::array();
    for (const auto& [a, b] : v)
        out.push_back(Json::array({a, b}));
    return out;
}

inline Json names_json(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    return Json(v);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Situations

inline Json situation_json(const DecisionSituation& input)
{
    const auto doc = canonicalize(input);
    Json j;
    j["format"] = situation_format;
    j["propositions"] = doc.propositions;
    j["arguments"] = doc.arguments;
    j["support"] = detail::pairs_json(doc.support);
    Json rel;
    if (const auto* pe = std::get_if<PerspectiveEncoding>(&doc.relations)) {
        rel["mode"] = "perspectives";
        Json ps = Json::object();
        for (const auto& [p, prs] : pe->perspectives)
            ps[p] = detail::pairs_json(prs);
        rel["perspectives"] = std::move(ps);
    } else {
        const auto& de = std::get<DirectEncoding>(doc.relations);
        rel["mode"] = "direct";
        rel["trumps_exists"] = detail::pairs_json(de.trumps_exists);
        rel["ambivalent"] = detail::pairs_json(de.ambivalent);
    }
    j["relations"] = std::move(rel);
    return j;
}

/// Parses and validates; validation failures are reported as a DocumentError at "/".
inline DecisionSituation situation_from_json(const Json& j)
{
    detail::expect_format(j, situation_format);
    detail::expect_keys(j, "", {"format", "propositions", "arguments", "support", "relations"});
    DecisionSituation doc;
    doc.propositions = detail::ids(j["propositions"], "/propositions");
    doc.arguments = detail::ids(j["arguments"], "/arguments");
    doc.support = detail::pairs(j["support"], "/support");
    const auto& rel = j["relations"];
    detail::expect(rel.is_object() && rel.contains("mode") && rel["mode"].is_string(), "/relations/mode",
                   "expected \"perspectives\" or \"direct\"");
    const auto mode = rel["mode"].get<std::string>();
    if (mode == "perspectives") {
        detail::expect_keys(rel, "/relations", {"mode", "perspectives"});
        detail::expect(rel["perspectives"].is_object(), "/relations/perspectives", "expected an object");
        PerspectiveEncoding pe;
        for (const auto& [p, prs] : rel["perspectives"].items())
            pe.perspectives[p] = detail::pairs(prs, "/relations/perspectives/" + p);
        doc.relations = std::move(pe);
    } else if (mode == "direct") {
        detail::expect_keys(rel, "/relations", {"mode", "trumps_exists", "ambivalent"});
        DirectEncoding de;
        de.trumps_exists = detail::pairs(rel["trumps_exists"], "/relations/trumps_exists");
        de.ambivalent = detail::pairs(rel["ambivalent"], "/relations/ambivalent");
        doc.relations = std::move(de);
    } else {
        throw DocumentError("/relations/mode", "unknown mode \"" + mode + "\"");
    }
    if (auto report = validate_situation(doc); !report.ok()) {
        std::string msg = "invalid decision situation";
        for (const auto& v : report.violations)
            msg += "; " + v;
        throw DocumentError("/", msg);
    }
    return doc;
}

inline std::string serialize_instance(const DecisionSituation& sit) { return dump(situation_json(sit)); }
inline DecisionSituation parse_instance(std::string_view text) { return situation_from_json(parse_json(text)); }

// ---------------------------------------------------------------------------
// Models

inline Json model_body(const Model& input)
{
    const auto m = canonicalize(input);
    Json j;
    j["support"] = detail::pairs_json(m.support);
    j["counters"] = detail::pairs_json(m.counters);
    return j;
}

inline Json model_json(const Model& m)
{
    Json j;
    j["format"] = model_format;
    j.update(model_body(m));
    return j;
}

inline Model model_from_body(const Json& j, const std::string& where)
{
    Model m;
    m.support = detail::pairs(j["support"], where + "/support");
    m.counters = detail::pairs(j["counters"], where + "/counters");
    return m;
}

inline Model model_from_json(const Json& j)
{
    detail::expect_format(j, model_format);
    detail::expect_keys(j, "", {"format", "support", "counters"});
    return model_from_body(j, "");
}

inline std::string serialize_model(const Model& m) { return dump(model_json(m)); }
inline Model parse_model(std::string_view text) { return model_from_json(parse_json(text)); }

// ---------------------------------------------------------------------------
// Gamma lists

inline IdSet gamma_from_ids(const Situation& sit, const std::vector<std::string>& v, const std::string& where)
{
    IdSet g = sit.no_args();
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto a = sit.find_arg(v[i]);
        detail::expect(a.has_value(), where + "/" + std::to_string(i), "unknown argument " + v[i]);
        g.set(*a);
    }
    return g;
}

inline Json names_json(const Situation& sit, const IdSet& s) { return Json(sit.arg_names(s)); }
inline Json prop_names_json(const Situation& sit, const IdSet& s) { return Json(sit.prop_names(s)); }

// ---------------------------------------------------------------------------
// Transcripts

inline Json failure_json(const Situation& sit, const Failure& f)
{
    auto [a, b] = failure_names(sit, f);
    Json j;
    j["kind"] = to_string(f.kind);
    j["pair"] = Json::array({a, b});
    return j;
}

inline Json query_json(const Situation& sit, const Query& q)
{
    Json j;
    j["kind"] = to_string(q.kind);
    j["pair"] = Json::array(
        {sit.arg_name(q.first), q.kind == QueryKind::trump ? sit.arg_name(q.second) : sit.prop_name(q.second)});
    return j;
}

inline Json outcome_json(const Situation& sit, const DialogueOutcome& o)
{
    Json j;
    j["verdict"] = to_string(o.verdict);
    j["failures"] = Json::array();
    for (const auto& f : o.failures)
        j["failures"].push_back(failure_json(sit, f));
    j["obligations"] = Json::array();
    for (const auto& ob : o.obligations) {
        Json oj = failure_json(sit, {ob.kind, ob.first, ob.second});
        oj["state"] = to_string(ob.state);
        oj["evidence"] = ob.evidence;
        j["obligations"].push_back(std::move(oj));
    }
    j["variability"] = o.variability;
    return j;
}

inline Json transcript_json(const Situation& sit, const Transcript& tr)
{
    Json j;
    j["format"] = transcript_format;
    j["model"] = model_body(to_model(sit, tr.spec.model));
    j["gamma"] = names_json(sit, tr.spec.gamma);
    j["budget"] = tr.spec.budget;
    j["queries"] = Json::array();
    for (const auto& r : tr.queries) {
        Json q = query_json(sit, r.query);
        q["answer"] = r.yes ? "yes" : "no";
        q["perspective"] = r.perspective && *r.perspective < sit.perspective_count()
                               ? Json(sit.perspective_name(*r.perspective))
                               : Json(nullptr);
        j["queries"].push_back(std::move(q));
    }
    j["verdict"] = outcome_json(sit, tr.outcome);
    return j;
}

namespace detail {

inline FailureKind failure_kind(const Json& j, const std::string& where)
{
    expect(j.is_string(), where, "expected a string");
    const auto s = j.get<std::string>();
    for (auto k : {FailureKind::unsupported_claim, FailureKind::uncountered_trumper, FailureKind::missing_counter})
        if (s == to_string(k))
            return k;
    throw DocumentError(where, "unknown failure kind \"" + s + "\"");
}

inline std::size_t arg_at(const Situation& sit, const std::string& id, const std::string& where)
{
    auto a = sit.find_arg(id);
    expect(a.has_value(), where, "unknown argument " + id);
    return *a;
}

inline std::size_t prop_at(const Situation& sit, const std::string& id, const std::string& where)
{
    auto t = sit.find_prop(id);
    expect(t.has_value(), where, "unknown proposition " + id);
    return *t;
}

inline Failure failure_from_json(const Situation& sit, const Json& j, const std::string& where)
{
    expect(j.is_object() && j.contains("kind") && j.contains("pair"), where, "expected a failure record");
    auto kind = failure_kind(j["kind"], where + "/kind");
    auto pr = pairs(Json::array({j["pair"]}), where + "/pair").front();
    switch (kind) {
    case FailureKind::unsupported_claim:
        return {kind, arg_at(sit, pr.first, where + "/pair/0"), prop_at(sit, pr.second, where + "/pair/1")};
    case FailureKind::uncountered_trumper:
        return {kind, arg_at(sit, pr.first, where + "/pair/0"), arg_at(sit, pr.second, where + "/pair/1")};
    case FailureKind::missing_counter:
        break;
    }
    return {kind, prop_at(sit, pr.first, where + "/pair/0"), arg_at(sit, pr.second, where + "/pair/1")};
}

} // namespace detail

inline Transcript transcript_from_json(const Situation& sit, const Json& j)
{
    using detail::expect;
    detail::expect_format(j, transcript_format);
    detail::expect_keys(j, "", {"format", "model", "gamma", "budget", "queries", "verdict"});
    detail::expect_keys(j["model"], "/model", {"support", "counters"});
    Transcript tr;
    try {
        tr.spec.model = index_model(sit, model_from_body(j["model"], "/model"));
    } catch (const InvalidModel& e) {
        throw DocumentError("/model", e.what());
    }
    tr.spec.gamma = gamma_from_ids(sit, detail::ids(j["gamma"], "/gamma"), "/gamma");
    expect(detail::is_index(j["budget"]) && j["budget"].get<std::size_t>() >= 1, "/budget",
           "expected a positive integer");
    tr.spec.budget = j["budget"].get<std::size_t>();

    expect(j["queries"].is_array(), "/queries", "expected an array");
    for (std::size_t i = 0; i < j["queries"].size(); ++i) {
        const auto where = "/queries/" + std::to_string(i);
        const auto& q = j["queries"][i];
        detail::expect_keys(q, where, {"kind", "pair", "answer", "perspective"});
        expect(q["kind"].is_string(), where + "/kind", "expected a string");
        const auto kind = q["kind"].get<std::string>();
        expect(kind == "trump" || kind == "support", where + "/kind", "expected \"trump\" or \"support\"");
        auto pr = detail::pairs(Json::array({q["pair"]}), where + "/pair").front();
        QueryRecord r;
        if (kind == "trump")
            r.query = {QueryKind::trump, detail::arg_at(sit, pr.first, where + "/pair/0"),
                       detail::arg_at(sit, pr.second, where + "/pair/1")};
        else
            r.query = {QueryKind::support, detail::arg_at(sit, pr.first, where + "/pair/0"),
                       detail::prop_at(sit, pr.second, where + "/pair/1")};
        expect(q["answer"] == "yes" || q["answer"] == "no", where + "/answer", "expected \"yes\" or \"no\"");
        r.yes = q["answer"] == "yes";
        if (!q["perspective"].is_null()) {
            expect(q["perspective"].is_string(), where + "/perspective", "expected a string or null");
            auto p = sit.find_perspective(q["perspective"].get<std::string>());
            expect(p.has_value(), where + "/perspective", "unknown perspective");
            r.perspective = *p;
        }
        tr.queries.push_back(r);
    }

    const auto& v = j["verdict"];
    detail::expect_keys(v, "/verdict", {"verdict", "failures", "obligations", "variability"});
    const auto verdict = v["verdict"].is_string() ? v["verdict"].get<std::string>() : "";
    if (verdict == "valid")
        tr.outcome.verdict = Verdict::valid;
    else if (verdict == "invalid")
        tr.outcome.verdict = Verdict::invalid;
    else if (verdict == "inconclusive")
        tr.outcome.verdict = Verdict::inconclusive;
    else
        throw DocumentError("/verdict/verdict", "expected \"valid\", \"invalid\" or \"inconclusive\"");
    expect(v["failures"].is_array(), "/verdict/failures", "expected an array");
    for (std::size_t i = 0; i < v["failures"].size(); ++i)
        tr.outcome.failures.push_back(
            detail::failure_from_json(sit, v["failures"][i], "/verdict/failures/" + std::to_string(i)));
    expect(v["obligations"].is_array(), "/verdict/obligations", "expected an array");
    for (std::size_t i = 0; i < v["obligations"].size(); ++i) {
        const auto where = "/verdict/obligations/" + std::to_string(i);
        const auto& o = v["obligations"][i];
        detail::expect_keys(o, where, {"kind", "pair", "state", "evidence"});
        auto f = detail::failure_from_json(sit, o, where);
        Obligation ob{f.kind, f.first, f.second};
        const auto st = o["state"].is_string() ? o["state"].get<std::string>() : "";
        if (st == "discharged")
            ob.state = Obligation::State::discharged;
        else if (st == "failed")
            ob.state = Obligation::State::failed;
        else if (st == "unresolved")
            ob.state = Obligation::State::unresolved;
        else
            throw DocumentError(where + "/state", "unknown obligation state");
        expect(detail::is_index(o["evidence"]), where + "/evidence", "expected a query index");
        ob.evidence = o["evidence"].get<std::size_t>();
        tr.outcome.obligations.push_back(ob);
    }
    expect(v["variability"].is_boolean(), "/verdict/variability", "expected a boolean");
    tr.outcome.variability = v["variability"].get<bool>();
    return tr;
}

inline std::string serialize_transcript(const Situation& sit, const Transcript& tr)
{
    return dump(transcript_json(sit, tr));
}

inline Transcript parse_transcript(const Situation& sit, std::string_view text)
{
    return transcript_from_json(sit, parse_json(text));
}

// ---------------------------------------------------------------------------
// Reports

inline Json witnesses_json(const Situation& sit, const CheckResult& r)
{
    Json out = Json::array();
    for (const auto& w : r.witnesses) {
        Json t = Json::array();
        for (auto i : w)
            t.push_back(sit.arg_name(i));
        out.push_back(std::move(t));
    }
    return out;
}

inline Json check_result_json(const Situation& sit, const CheckResult& r)
{
    Json j;
    j["pass"] = r.pass;
    if (r.undetermined)
        j["note"] = "defense search cap exceeded";
    j["witnesses"] = witnesses_json(sit, r);
    return j;
}

inline Json relation_json(const Situation& sit, const Relation& r)
{
    Json out = Json::array();
    for (auto [a, b] : r.pairs())
        out.push_back(Json::array({sit.arg_name(a), sit.arg_name(b)}));
    return out;
}

inline Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json check_json(const Situation& sit, const CacReport& r)
{
    const auto a = analyze_gamma(sit, r.gamma);
    Json j;
    j["format"] = check_format;
    j["gamma"] = names_json(sit, r.gamma);
    j["cac"] = r.cac;
    j["j"] = optional_json(r.j);
    j["k"] = optional_json(r.k);
    Json c;
    c["reinstatement"] = check_result_json(sit, r.reinstatement);
    c["answerability"] = check_result_json(sit, r.answerability);
    c["width"] = check_result_json(sit, r.width);
    c["length"] = check_result_json(sit, r.length);
    c["covering"] = check_result_json(sit, r.covering);
    j["conditions"] = std::move(c);
    Json an;
    an["decisive"] = names_json(sit, a.dec);
    an["resistant"] = names_json(sit, a.res);
    an["finitely_defended"] = names_json(sit, a.def);
    an["defended"] = names_json(sit, a.defended);
    an["replaceable_by_decisive"] = names_json(sit, a.r_dec);
    an["essentially_replaceable_by_resistant"] = names_json(sit, a.e_res);
    an["essentially_replaceable_by_decisive"] = names_json(sit, a.e_dec);
    an["q"] = relation_json(sit, a.q);
    j["analysis"] = std::move(an);
    Json g;
    g["max_trumper_indegree"] = r.max_trumper_indegree;
    g["trumps_acyclic"] = r.trumps_acyclic;
    g["answerability"] = check_result_json(sit, check_answerability(sit));
    g["reinstatement"] = check_result_json(sit, check_closed_reinstatement(sit));
    j["global"] = std::move(g);
    return j;
}

inline Json judgment_json(const Situation& sit)
{
    const auto cc = clear_cut(sit);
    Json j;
    j["format"] = judgment_format;
    j["judgment"] = prop_names_json(sit, deliberated_judgment(sit));
    j["clear_cut"] = cc.clear_cut;
    Json st = Json::object();
    Json wit = Json::object();
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        st[sit.prop_name(t)] = to_string(cc.statuses[t]);
        if (auto w = justification_witness(sit, t))
            wit[sit.prop_name(t)] = sit.arg_name(*w);
    }
    j["statuses"] = std::move(st);
    j["witnesses"] = std::move(wit);
    j["decisive"] = names_json(sit, sit.decisive());
    return j;
}

inline Json validation_json(const Situation& sit, const IdSet& gamma, const IndexedModel& m, const ValidityVerdict& v)
{
    Json j;
    j["format"] = validation_format;
    j["gamma"] = names_json(sit, gamma);
    j["verdict"] = v.valid ? "valid" : "invalid";
    j["failures"] = Json::array();
    for (const auto& f : v.failures)
        j["failures"].push_back(failure_json(sit, f));
    IdSet outside = sit.no_args();
    for (auto a : v.outside_gamma_witnesses)
        outside.set(a);
    j["outside_gamma_witnesses"] = names_json(sit, outside);
    j["claims"] = prop_names_json(sit, model_claims(sit, m));
    j["judgment"] = prop_names_json(sit, deliberated_judgment(sit));
    j["claims_match_judgment"] = is_valid(sit, m);
    return j;
}

inline Json extraction_json(const Situation& sit, const IdSet& s, const Extraction& e)
{
    Json j;
    j["format"] = extraction_format;
    j["set"] = names_json(sit, s);
    j["efficient"] = e.efficiency.pass;
    j["offending"] = prop_names_json(sit, e.efficiency.offending);
    j["gamma"] = e.efficiency.pass ? names_json(sit, e.gamma) : Json(nullptr);
    j["check"] = e.cac ? check_json(sit, *e.cac) : Json(nullptr);
    return j;
}

} // namespace dj
