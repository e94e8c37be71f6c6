#include "dj/fixtures.hpp"
#include "dj/http.hpp"
#include "dj/session.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace dj;

namespace {

Json budget_request(Json oracle = {{"mode", "human"}})
{
    return {{"instance", "budget"}, {"model", model_json(fixtures::budget_model())}, {"oracle", std::move(oracle)}};
}

Json certificate(const char* fixture)
{
    const Situation sit(fixtures::all().at(fixture));
    return check_json(sit, check_cac(sit, sit.all_args()));
}

/// Truthful answer for a single-perspective fixture.
bool truth(const Situation& sit, const Json& q)
{
    const auto a = sit.arg(q["pair"][0].get<std::string>());
    if (q["kind"] == "support")
        return sit.support().contains(a, sit.prop(q["pair"][1].get<std::string>()));
    return sit.trumps().contains(a, sit.arg(q["pair"][1].get<std::string>()));
}

int error_status(const std::function<void()>& f, std::string* code = nullptr)
{
    try {
        f();
    } catch (const SessionError& e) {
        if (code)
            *code = e.code();
        return e.status();
    }
    return 0;
}

} // namespace

TEST(Store, HumanBudgetWalkthrough)
{
    SessionStore store;
    const Situation b(fixtures::budget());
    auto req = budget_request();
    req["certificate"] = certificate("budget");
    Json st = store.create(req);
    EXPECT_EQ(st["session"], "s1");
    EXPECT_EQ(st["state"], "running");
    EXPECT_EQ(st["query"]["kind"], "support");
    EXPECT_EQ(st["query"]["pair"], Json({"s", "t"}));

    auto running = store.report("s1");
    EXPECT_TRUE(running["transcript"]["verdict"].is_null());
    EXPECT_TRUE(running["conclusion"].is_null());

    std::size_t steps = 0;
    while (st["state"] == "running") {
        const auto id = st["query"]["id"];
        st = store.answer("s1", {{"query", id}, {"answer", truth(b, st["query"]) ? "yes" : "no"}});
        EXPECT_EQ(st["accepted"], id);
        ASSERT_LT(++steps, 100u);
    }
    EXPECT_EQ(steps, 10u);
    EXPECT_EQ(st["verdict"], "valid");

    auto rep = store.report("s1");
    EXPECT_EQ(rep["transcript"]["verdict"]["verdict"], "valid");
    EXPECT_EQ(rep["unresolved"], Json::array());
    EXPECT_EQ(rep["conclusion"]["judgment"], Json({"t"}));
    EXPECT_EQ(rep["conclusion"]["statement"], "T_i = T_eta");
    EXPECT_EQ(rep["conclusion"]["certificate"]["j"], 2);
    EXPECT_EQ(rep["conclusion"]["certificate"]["k"], 2);

    // The transcript stands on its own.
    const auto tr = transcript_from_json(b, rep["transcript"]);
    EXPECT_TRUE(replay_transcript(b, tr));
}

TEST(Store, WeatherHumanWrongModel)
{
    SessionStore store;
    const Situation w(fixtures::weather());
    Json st = store.create({{"instance", situation_json(fixtures::weather())},
                            {"model", model_json(Model{{{"s1", "t"}}, {}})}});
    while (st["state"] == "running")
        st = store.answer("s1", {{"query", st["query"]["id"]}, {"answer", truth(w, st["query"]) ? "yes" : "no"}});
    EXPECT_EQ(st["verdict"], "invalid");
    EXPECT_EQ(st["failures"][0]["kind"], "uncountered-trumper");
    EXPECT_EQ(st["failures"][0]["pair"], Json({"s1", "s2"}));
    auto rep = store.report("s1");
    EXPECT_EQ(rep["unresolved"].size(), 1u);
    EXPECT_TRUE(rep["conclusion"].is_null());
}

TEST(Store, SimulatedRunsToCompletion)
{
    SessionStore store;
    auto st = store.create(budget_request({{"mode", "simulated"}, {"policy", "cyclic"}, {"seed", 3}}));
    EXPECT_EQ(st["state"], "done");
    EXPECT_EQ(st["verdict"], "valid");
    EXPECT_TRUE(store.report("s1")["conclusion"].is_null()); // no certificate supplied
    std::string code;
    EXPECT_EQ(error_status([&] { store.answer("s1", {{"query", 0}, {"answer", "yes"}}); }, &code), 409);
    EXPECT_EQ(code, "session-done");
}

TEST(Store, Errors)
{
    SessionStore store;
    std::string code;
    EXPECT_EQ(error_status([&] { store.next("s9"); }, &code), 404);
    EXPECT_EQ(code, "unknown-session");

    EXPECT_EQ(error_status([&] { store.create({{"instance", "nope"}, {"model", model_json({})}}); }, &code), 422);
    EXPECT_EQ(code, "invalid-document");
    EXPECT_EQ(error_status([&] { store.create({{"instance", "budget"}}); }), 422);
    EXPECT_EQ(error_status([&] { store.create({{"instance", "budget"},
                                               {"model", model_json(Model{{{"ghost", "t"}}, {}})}}); }),
              422);
    auto cert = certificate("budget");
    cert["gamma"] = Json({"s"});
    auto req = budget_request();
    req["certificate"] = cert;
    EXPECT_EQ(error_status([&] { store.create(req); }), 422);
    req["certificate"] = certificate("flicker");
    EXPECT_EQ(error_status([&] { store.create(req); }), 422);
    EXPECT_EQ(store.size(), 0u);

    store.create(budget_request());
    EXPECT_EQ(error_status([&] { store.answer("s1", {{"query", 3}, {"answer", "yes"}}); }, &code), 409);
    EXPECT_EQ(code, "stale-query");
    EXPECT_EQ(error_status([&] { store.answer("s1", {{"query", 0}, {"answer", "perhaps"}}); }, &code), 400);
    EXPECT_EQ(code, "bad-request");
    EXPECT_EQ(store.next("s1")["answered"], 0);
}

TEST(Store, CertificateNeedsCacGamma)
{
    SessionStore store;
    auto cert = certificate("flicker");
    cert["cac"] = true; // a forged claim is recomputed
    std::string code;
    EXPECT_EQ(error_status([&] {
                  store.create({{"instance", "flicker"},
                                {"model", model_json(Model{{{"s1", "t"}}, {}})},
                                {"certificate", cert}});
              },
                           &code),
              422);
}

TEST(Store, Journal)
{
    const auto dir = std::filesystem::temp_directory_path() / ("dj-journal-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    {
        SessionStore store({dir});
        auto st = store.create(budget_request());
        store.answer("s1", {{"query", 0}, {"answer", "yes"}});
    }
    std::ifstream in(dir / "s1.jsonl");
    std::vector<Json> events;
    for (std::string line; std::getline(in, line);)
        events.push_back(Json::parse(line));
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[0]["event"], "create");
    EXPECT_EQ(events[1]["event"], "answer");
    EXPECT_EQ(events[1]["answer"], "yes");
    std::filesystem::remove_all(dir);
}

TEST(Store, ConcurrentSessions)
{
    SessionStore store;
    const Situation b(fixtures::budget());
    constexpr int n = 8;
    std::vector<std::thread> threads;
    std::vector<std::string> verdicts(n);
    for (int i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
            Json st = store.create(budget_request());
            const auto id = st["session"].get<std::string>();
            while (st["state"] == "running")
                st = store.answer(id, {{"query", st["query"]["id"]}, {"answer", truth(b, st["query"]) ? "yes" : "no"}});
            verdicts[i] = st["verdict"];
        });
    }
    for (auto& t : threads)
        t.join();
    EXPECT_EQ(store.size(), std::size_t{n});
    for (const auto& v : verdicts)
        EXPECT_EQ(v, "valid");
}

class HttpTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        install_routes(server, store);
        port = server.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port, 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    void TearDown() override
    {
        server.stop();
        thread.join();
    }

    httplib::Client client() { return httplib::Client("127.0.0.1", port); }

    SessionStore store;
    httplib::Server server;
    std::thread thread;
    int port = 0;
};

TEST_F(HttpTest, RoundTrip)
{
    auto cli = client();
    const Situation b(fixtures::budget());
    auto req = budget_request();
    req["certificate"] = certificate("budget");
    auto res = cli.Post("/sessions", req.dump(), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    auto st = Json::parse(res->body);
    const auto id = st["session"].get<std::string>();

    auto next = cli.Get("/sessions/" + id + "/next");
    ASSERT_TRUE(next);
    EXPECT_EQ(Json::parse(next->body)["query"]["id"], 0);

    while (st["state"] == "running") {
        Json body{{"query", st["query"]["id"]}, {"answer", truth(b, st["query"]) ? "yes" : "no"}};
        auto r = cli.Post("/sessions/" + id + "/answer", body.dump(), "application/json");
        ASSERT_TRUE(r);
        ASSERT_EQ(r->status, 200) << r->body;
        st = Json::parse(r->body);
    }
    auto rep = cli.Get("/sessions/" + id + "/report");
    ASSERT_TRUE(rep);
    auto j = Json::parse(rep->body);
    EXPECT_EQ(j["verdict"], "valid");
    EXPECT_EQ(j["conclusion"]["judgment"], Json({"t"}));
}

TEST_F(HttpTest, ErrorStatuses)
{
    auto cli = client();
    auto r = cli.Get("/sessions/s42/next");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404);
    EXPECT_EQ(Json::parse(r->body)["error"], "unknown-session");

    r = cli.Post("/sessions", "{ not json", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 422);

    auto st = Json::parse(cli.Post("/sessions", budget_request().dump(), "application/json")->body);
    r = cli.Post("/sessions/" + st["session"].get<std::string>() + "/answer", R"({"query": 5, "answer": "no"})",
                 "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 409);
    EXPECT_EQ(Json::parse(r->body)["error"], "stale-query");

    auto sim = Json::parse(cli.Post("/sessions", budget_request({{"mode", "simulated"}}).dump(), "application/json")->body);
    r = cli.Post("/sessions/" + sim["session"].get<std::string>() + "/answer", R"({"query": 0, "answer": "no"})",
                 "application/json");
    EXPECT_EQ(r->status, 409);
}

TEST_F(HttpTest, Instances)
{
    auto cli = client();
    auto r = cli.Get("/instances");
    ASSERT_TRUE(r);
    EXPECT_EQ(Json::parse(r->body)["instances"], Json({"budget", "empty", "flicker", "variant", "weather"}));
    r = cli.Get("/instances/weather");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->body, serialize_instance(fixtures::weather()));
    r = cli.Get("/instances/none");
    EXPECT_EQ(r->status, 404);
    r = cli.Options("/sessions");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 204);
}
