#pragma once

#include "dj/agent.hpp"
#include "dj/elicitation.hpp"
#include "dj/fixtures.hpp"
#include "dj/io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace dj {

/// A request the service refuses; `status` is the HTTP status to use.
class SessionError : public std::runtime_error
{
public:
    SessionError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), _status(status), _code(std::move(code))
    {
    }

    [[nodiscard]] int status() const { return _status; }
    [[nodiscard]] const std::string& code() const { return _code; }

    [[nodiscard]] Json body() const
    {
        Json j;
        j["error"] = _code;
        j["message"] = what();
        return j;
    }

private:
    int _status;
    std::string _code;
};

enum class OracleMode { simulated, human };

struct SessionOptions
{
    std::optional<std::filesystem::path> journal_dir;
};

/// In-memory elicitation sessions. Distinct sessions proceed concurrently;
/// calls on one session are serialized.
class SessionStore
{
public:
    explicit SessionStore(SessionOptions opts = {}) : _opts(std::move(opts))
    {
        if (_opts.journal_dir)
            std::filesystem::create_directories(*_opts.journal_dir);
    }

    /// Body: {"instance": situation document or fixture name, "model": model
    /// document, "gamma": [ids] or null, "budget": n, "oracle": {"mode":
    /// "simulated", "policy", "seed", "perspective"} or {"mode": "human"},
    /// "certificate": check report (optional)}.
    Json create(const Json& body)
    {
        auto s = std::make_shared<Session>();
        try {
            build(*s, body);
        } catch (const DocumentError& e) {
            throw SessionError(422, "invalid-document", e.what());
        } catch (const InvalidModel& e) {
            throw SessionError(422, "invalid-document", e.what());
        } catch (const UnknownIdentifier& e) {
            throw SessionError(422, "invalid-document", e.what());
        } catch (const nlohmann::json::exception& e) {
            throw SessionError(400, "bad-request", e.what());
        }
        {
            std::unique_lock lock(_mutex);
            s->id = "s" + std::to_string(++_serial);
            _sessions.emplace(s->id, s);
        }
        std::lock_guard guard(s->mutex);
        Json ev = {{"event", "create"}, {"request", body}};
        journal(*s, ev);
        if (s->done())
            journal(*s, {{"event", "done"}, {"verdict", to_string(s->outcome().verdict)}});
        return state(*s);
    }

    Json next(const std::string& id)
    {
        auto s = find(id);
        std::lock_guard guard(s->mutex);
        return state(*s);
    }

    /// Body: {"query": id of the pending query, "answer": "yes" | "no"}.
    Json answer(const std::string& id, const Json& body)
    {
        auto s = find(id);
        std::lock_guard guard(s->mutex);
        if (!body.is_object() || !body.contains("query") || !detail::is_index(body["query"]))
            throw SessionError(400, "bad-request", "expected a numeric \"query\"");
        if (!body.contains("answer") || (body["answer"] != "yes" && body["answer"] != "no"))
            throw SessionError(400, "bad-request", "expected \"answer\": \"yes\" or \"no\"");
        if (s->done())
            throw SessionError(409, "session-done", "session " + id + " is finished");
        if (!s->dialogue)
            throw SessionError(409, "not-human", "session " + id + " is answered by a simulated agent");
        const auto qid = body["query"].get<std::size_t>();
        if (qid != s->dialogue->answers().size())
            throw SessionError(409, "stale-query", "query " + std::to_string(qid) + " is not the pending query");
        const bool yes = body["answer"] == "yes";
        s->dialogue->answer(yes);
        journal(*s, {{"event", "answer"}, {"query", qid}, {"answer", yes ? "yes" : "no"}});
        if (s->done())
            journal(*s, {{"event", "done"}, {"verdict", to_string(s->outcome().verdict)}});
        Json out = state(*s);
        out["accepted"] = qid;
        return out;
    }

    Json report(const std::string& id)
    {
        auto s = find(id);
        std::lock_guard guard(s->mutex);
        Json out = state(*s);
        const Transcript& tr = s->transcript();
        Json t = transcript_json(*s->sit, tr);
        if (!s->done())
            t["verdict"] = nullptr;
        out["transcript"] = std::move(t);
        out["conclusion"] = nullptr;
        if (s->done()) {
            Json unresolved = Json::array();
            for (const auto& ob : tr.outcome.obligations)
                if (ob.state == Obligation::State::unresolved)
                    unresolved.push_back(failure_json(*s->sit, {ob.kind, ob.first, ob.second}));
            out["unresolved"] = std::move(unresolved);
            if (tr.outcome.verdict == Verdict::valid && s->certificate) {
                // A valid model on a CAC gamma claims exactly the deliberated judgment.
                Json c;
                c["judgment"] = prop_names_json(*s->sit, model_claims(*s->sit, tr.spec.model));
                c["statement"] = "T_i = T_eta";
                c["certificate"] = {{"format", check_format},
                                    {"gamma", names_json(*s->sit, tr.spec.gamma)},
                                    {"j", (*s->certificate)["j"]},
                                    {"k", (*s->certificate)["k"]}};
                out["conclusion"] = std::move(c);
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t size() const
    {
        std::shared_lock lock(_mutex);
        return _sessions.size();
    }

private:
    struct Session
    {
        std::string id;
        std::unique_ptr<Situation> sit;
        OracleMode mode = OracleMode::human;
        std::optional<Transcript> finished; // simulated mode
        std::unique_ptr<Dialogue> dialogue; // human mode
        std::optional<Json> certificate;
        std::mutex mutex;

        [[nodiscard]] bool done() const { return finished || dialogue->done(); }
        [[nodiscard]] const Transcript& transcript() const { return finished ? *finished : dialogue->transcript(); }
        [[nodiscard]] const DialogueOutcome& outcome() const { return transcript().outcome; }
    };

    std::shared_ptr<Session> find(const std::string& id)
    {
        std::shared_lock lock(_mutex);
        auto it = _sessions.find(id);
        if (it == _sessions.end())
            throw SessionError(404, "unknown-session", "unknown session " + id);
        return it->second;
    }

    static void build(Session& s, const Json& body)
    {
        detail::expect_keys(body, "", {"instance", "model"}, {"gamma", "budget", "oracle", "certificate"});
        DecisionSituation doc;
        if (body["instance"].is_string()) {
            const auto name = body["instance"].get<std::string>();
            auto it = fixtures::all().find(name);
            detail::expect(it != fixtures::all().end(), "/instance", "unknown fixture " + name);
            doc = it->second;
        } else {
            try {
                doc = situation_from_json(body["instance"]);
            } catch (const DocumentError& e) {
                throw DocumentError("/instance" + (e.where() == "/" ? std::string() : e.where()), e.what());
            }
        }
        s.sit = std::make_unique<Situation>(doc);
        const Situation& sit = *s.sit;

        DialogueSpec spec;
        try {
            spec.model = index_model(sit, model_from_json(body["model"]));
        } catch (const DocumentError& e) {
            throw DocumentError("/model" + (e.where() == "/" ? std::string() : e.where()), e.what());
        }
        spec.gamma = sit.all_args();
        if (body.contains("gamma") && !body["gamma"].is_null())
            spec.gamma = gamma_from_ids(sit, detail::ids(body["gamma"], "/gamma"), "/gamma");
        if (body.contains("budget")) {
            detail::expect(detail::is_index(body["budget"]) && body["budget"].get<std::size_t>() >= 1, "/budget",
                           "expected a positive integer");
            spec.budget = body["budget"].get<std::size_t>();
        }

        if (body.contains("certificate")) {
            const Json& cert = body["certificate"];
            detail::expect_format(cert, check_format);
            detail::expect(cert.contains("gamma"), "/certificate/gamma", "missing key");
            const IdSet cg = gamma_from_ids(sit, detail::ids(cert["gamma"], "/certificate/gamma"), "/certificate/gamma");
            detail::expect(cg == spec.gamma, "/certificate/gamma", "certificate is for a different gamma");
            detail::expect(cert.contains("cac") && cert["cac"] == true, "/certificate/cac",
                           "certificate does not assert CAC");
            detail::expect(check_cac(sit, spec.gamma).cac, "/certificate", "gamma is not CAC in this situation");
            s.certificate = cert;
        }

        Json oracle = body.contains("oracle") ? body["oracle"] : Json{{"mode", "human"}};
        detail::expect(oracle.is_object() && oracle.contains("mode"), "/oracle/mode", "missing key");
        const auto mode = oracle["mode"].get<std::string>();
        if (mode == "human") {
            detail::expect_keys(oracle, "/oracle", {"mode"});
            s.mode = OracleMode::human;
            s.dialogue = std::make_unique<Dialogue>(sit, std::move(spec));
        } else if (mode == "simulated") {
            detail::expect_keys(oracle, "/oracle", {"mode"}, {"policy", "seed", "perspective"});
            auto policy = parse_policy(oracle.value("policy", std::string("static")));
            detail::expect(policy.has_value(), "/oracle/policy", "expected static, cyclic or drift");
            detail::expect(sit.has_perspectives(), "/instance", "a simulated agent needs the perspective encoding");
            std::size_t start = 0;
            if (oracle.contains("perspective")) {
                auto p = sit.find_perspective(oracle["perspective"].get<std::string>());
                detail::expect(p.has_value(), "/oracle/perspective", "unknown perspective");
                start = *p;
            }
            Agent agent(sit, *policy, oracle.value("seed", std::uint64_t{0}), start);
            s.mode = OracleMode::simulated;
            s.finished = run_validation_dialogue(agent, spec);
        } else {
            throw DocumentError("/oracle/mode", "expected \"human\" or \"simulated\"");
        }
    }

    static Json state(const Session& s)
    {
        Json j;
        j["session"] = s.id;
        j["mode"] = s.mode == OracleMode::human ? "human" : "simulated";
        j["state"] = s.done() ? "done" : "running";
        j["answered"] = s.transcript().queries.size();
        if (s.done()) {
            j["query"] = nullptr;
            j["verdict"] = to_string(s.outcome().verdict);
            j["failures"] = Json::array();
            for (const auto& f : s.outcome().failures)
                j["failures"].push_back(failure_json(*s.sit, f));
        } else {
            Json q = query_json(*s.sit, *s.dialogue->pending());
            q["id"] = s.dialogue->answers().size();
            j["query"] = std::move(q);
            j["verdict"] = nullptr;
        }
        return j;
    }

    void journal(const Session& s, const Json& event) const
    {
        if (!_opts.journal_dir)
            return;
        std::ofstream out(*_opts.journal_dir / (s.id + ".jsonl"), std::ios::app);
        out << event.dump() << "\n";
    }

    SessionOptions _opts;
    mutable std::shared_mutex _mutex;
    std::map<std::string, std::shared_ptr<Session>> _sessions;
    std::size_t _serial = 0;
};

} // namespace dj
