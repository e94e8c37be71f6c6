// dj: command-line front end for the deliberated-judgment engine.

#include "dj/dj.hpp"
#include "dj/http.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <unistd.h>

namespace {

using dj::Json;

struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

bool styled()
{
    const char* c = std::getenv("DJ_COLOR");
    if (c && std::string(c) == "0")
        return false;
    return isatty(STDERR_FILENO);
}

/// One summary line on stderr; the report itself goes to stdout.
void summary(bool good, const std::string& text)
{
    if (styled())
        std::cerr << (good ? "\033[32m" : "\033[31m") << text << "\033[0m\n";
    else
        std::cerr << text << "\n";
}

dj::DecisionSituation load_situation(const std::string& path)
{
    return dj::parse_instance(dj::read_file(path));
}

dj::IdSet load_gamma(const dj::Situation& sit, const std::vector<std::string>& ids, const std::string& file)
{
    if (!file.empty()) {
        Json j = dj::parse_json(dj::read_file(file));
        if (j.is_object() && j.contains("gamma"))
            j = j["gamma"];
        return dj::gamma_from_ids(sit, dj::detail::ids(j, "/gamma"), "/gamma");
    }
    if (!ids.empty())
        return dj::gamma_from_ids(sit, ids, "--gamma");
    return sit.all_args();
}

int cmd_judge(const std::string& file)
{
    const dj::Situation sit(load_situation(file));
    const Json j = dj::judgment_json(sit);
    std::cout << dj::dump(j);
    std::string text = "T_i = {";
    for (std::size_t i = 0; i < j["judgment"].size(); ++i)
        text += (i ? ", " : "") + j["judgment"][i].get<std::string>();
    summary(true, text + "}" + (j["clear_cut"] == true ? ", clear-cut" : ", not clear-cut"));
    return 0;
}

int cmd_check(const std::string& file, const std::vector<std::string>& gamma, const std::string& gamma_file)
{
    const dj::Situation sit(load_situation(file));
    const auto g = load_gamma(sit, gamma, gamma_file);
    const auto r = dj::check_cac(sit, g);
    std::cout << dj::dump(dj::check_json(sit, r));
    if (r.cac)
        summary(true, "CAC: pass (j=" + std::to_string(*r.j) + ", k=" + std::to_string(*r.k) + ")");
    else
        summary(false, "CAC: fail");
    return r.cac ? 0 : 1;
}

int cmd_validate(const std::string& file, const std::string& model_file, const std::vector<std::string>& gamma,
                 const std::string& gamma_file)
{
    const dj::Situation sit(load_situation(file));
    const auto m = dj::index_model(sit, dj::parse_model(dj::read_file(model_file)));
    const auto g = load_gamma(sit, gamma, gamma_file);
    const auto v = dj::check_operational_validity(sit, g, m);
    std::cout << dj::dump(dj::validation_json(sit, g, m, v));
    summary(v.valid, v.valid ? "operationally valid" : "invalid (" + std::to_string(v.failures.size()) + " failures)");
    return v.valid ? 0 : 1;
}

int cmd_synth(const std::string& file)
{
    const dj::Situation sit(load_situation(file));
    try {
        const auto m = dj::synthesize_model(sit);
        std::cout << dj::serialize_model(dj::to_model(sit, m));
        return 0;
    } catch (const dj::NotClearCut& e) {
        Json j;
        j["error"] = "not-clear-cut";
        j["undecided"] = e.undecided();
        std::cout << dj::dump(j);
        summary(false, e.what());
        return 1;
    }
}

int cmd_extract(const std::string& file, const std::vector<std::string>& set)
{
    const dj::Situation sit(load_situation(file));
    const auto s = set.empty() ? sit.all_args() : dj::gamma_from_ids(sit, set, "--set");
    const auto e = dj::extract_cac_subset(sit, s);
    std::cout << dj::dump(dj::extraction_json(sit, s, e));
    if (!e.efficiency.pass)
        summary(false, "set is not efficient");
    else
        summary(e.ok(), e.ok() ? "extracted a CAC subset" : "extraction is not CAC");
    return e.ok() ? 0 : 1;
}

int cmd_fuzz(std::size_t count, std::uint64_t seed, const std::string& profile, const std::vector<std::string>& checks,
             unsigned threads, std::size_t listed)
{
    dj::FuzzConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    cfg.threads = threads;
    if (profile != "mixed") {
        auto p = dj::parse_profile(profile);
        if (!p)
            throw InputError("unknown profile " + profile);
        cfg.profile = *p;
    }
    for (const auto& c : checks) {
        const auto& known = dj::fuzz_check_names();
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw InputError("unknown check " + c);
        cfg.checks.insert(c);
    }
    const auto r = dj::fuzz_theorems(cfg);
    std::cout << dj::dump(dj::fuzz_report_json(r, listed));
    summary(r.total_violations() == 0, std::to_string(r.total_violations()) + " violations in " +
                                           std::to_string(count) + " instances");
    return r.total_violations() == 0 ? 0 : 1;
}

int cmd_dialogue(const std::string& file, const std::string& model_file, const std::string& agent_name,
                 std::uint64_t agent_seed, std::size_t budget, const std::string& perspective,
                 const std::vector<std::string>& gamma, const std::string& gamma_file)
{
    const dj::Situation sit(load_situation(file));
    const auto policy = dj::parse_policy(agent_name);
    if (!policy)
        throw InputError("unknown agent " + agent_name);
    if (budget == 0)
        throw InputError("budget must be at least 1");
    if (!sit.has_perspectives())
        throw InputError("a simulated agent needs the perspective encoding");
    std::size_t start = 0;
    if (!perspective.empty()) {
        auto p = sit.find_perspective(perspective);
        if (!p)
            throw InputError("unknown perspective " + perspective);
        start = *p;
    }
    dj::DialogueSpec spec{dj::index_model(sit, dj::parse_model(dj::read_file(model_file))),
                          load_gamma(sit, gamma, gamma_file), budget};
    dj::Agent agent(sit, *policy, agent_seed, start);
    const auto tr = dj::run_validation_dialogue(agent, spec);
    std::cout << dj::serialize_transcript(sit, tr);
    const bool valid = tr.outcome.verdict == dj::Verdict::valid;
    summary(valid, std::string(dj::to_string(tr.outcome.verdict)) + " after " + std::to_string(tr.queries.size()) +
                       " queries");
    return valid ? 0 : 1;
}

int cmd_replay(const std::string& file, const std::string& transcript_file)
{
    const dj::Situation sit(load_situation(file));
    const auto tr = dj::parse_transcript(sit, dj::read_file(transcript_file));
    const auto rep = dj::check_transcript(sit, tr);
    Json j;
    j["consistent"] = rep.ok;
    j["reason"] = rep.ok ? Json(nullptr) : Json(rep.reason);
    std::cout << dj::dump(j);
    summary(rep.ok, rep.ok ? "transcript replays" : "transcript rejected: " + rep.reason);
    return rep.ok ? 0 : 1;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& cors, const std::string& journal)
{
    dj::SessionOptions opts;
    if (!journal.empty())
        opts.journal_dir = journal;
    dj::SessionStore store(opts);
    httplib::Server server;
    dj::install_routes(server, store, {cors});
    g_server = &server;
    std::signal(SIGINT, [](int) { g_server->stop(); });
    std::signal(SIGTERM, [](int) { g_server->stop(); });
    std::cerr << "listening on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"deliberated judgment: evaluate, check and validate decision situations"};
    app.require_subcommand(1);

    std::string file, model_file, gamma_file, agent = "static", perspective, transcript_file;
    std::vector<std::string> gamma, set, checks;
    bool gamma_all = false;
    std::size_t count = 100, budget = 1, listed = 50;
    std::uint64_t seed = 0, agent_seed = 0;
    std::string profile = "mixed";
    unsigned threads = 0;
    std::string host = "127.0.0.1", cors = "*", journal;
    int port = 8080;

    auto add_gamma = [&](CLI::App* sub) {
        auto* g = sub->add_option("--gamma", gamma, "comma-separated argument ids")->delimiter(',');
        auto* gf = sub->add_option("--gamma-file", gamma_file, "JSON array of ids, or a report with a gamma field");
        auto* ga = sub->add_flag("--gamma-all", gamma_all, "use every argument (default)");
        g->excludes(gf)->excludes(ga);
        gf->excludes(ga);
    };

    auto* judge = app.add_subcommand("judge", "deliberated judgment and statuses");
    judge->add_option("file", file)->required();

    auto* check = app.add_subcommand("check", "condition report for a subset of arguments");
    check->add_option("file", file)->required();
    add_gamma(check);

    auto* validate = app.add_subcommand("validate", "operational validity of a model");
    validate->add_option("file", file)->required();
    validate->add_option("--model", model_file)->required();
    add_gamma(validate);

    auto* synth = app.add_subcommand("synth", "synthesize a model of a clear-cut situation");
    synth->add_option("file", file)->required();

    auto* extract = app.add_subcommand("extract", "CAC subset of an efficient set");
    extract->add_option("file", file)->required();
    extract->add_option("--set", set, "comma-separated argument ids (default: all)")->delimiter(',');

    auto* fuzz = app.add_subcommand("fuzz", "check the theorems on generated instances");
    fuzz->add_option("--count", count)->check(CLI::PositiveNumber);
    fuzz->add_option("--seed", seed);
    fuzz->add_option("--profile", profile, "free, layered, cac-enforced or mixed");
    fuzz->add_option("--checks", checks, "comma-separated subset of checks")->delimiter(',');
    fuzz->add_option("--threads", threads, "worker threads (default: all cores)");
    fuzz->add_option("--max-listed", listed, "violations listed in full");

    auto* dialogue = app.add_subcommand("dialogue", "validate a model by questioning a simulated agent");
    dialogue->add_option("file", file)->required();
    dialogue->add_option("--model", model_file)->required();
    dialogue->add_option("--agent", agent, "static, cyclic or drift");
    dialogue->add_option("--agent-seed", agent_seed);
    dialogue->add_option("--budget", budget);
    dialogue->add_option("--perspective", perspective, "starting perspective");
    add_gamma(dialogue);

    auto* replay = app.add_subcommand("replay", "check a transcript against a situation");
    replay->add_option("file", file)->required();
    replay->add_option("--transcript", transcript_file)->required();

    auto* serve = app.add_subcommand("serve", "HTTP session service");
    serve->add_option("--port", port);
    serve->add_option("--host", host);
    serve->add_option("--cors", cors, "allowed origin; empty disables CORS");
    serve->add_option("--journal", journal, "directory for per-session journals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*judge)
            return cmd_judge(file);
        if (*check)
            return cmd_check(file, gamma, gamma_file);
        if (*validate)
            return cmd_validate(file, model_file, gamma, gamma_file);
        if (*synth)
            return cmd_synth(file);
        if (*extract)
            return cmd_extract(file, set);
        if (*fuzz)
            return cmd_fuzz(count, seed, profile, checks, threads, listed);
        if (*dialogue)
            return cmd_dialogue(file, model_file, agent, agent_seed, budget, perspective, gamma, gamma_file);
        if (*replay)
            return cmd_replay(file, transcript_file);
        if (*serve)
            return cmd_serve(host, port, cors, journal);
    } catch (const dj::DocumentError& e) {
        std::cerr << "dj: " << e.what() << "\n";
        return 2;
    } catch (const dj::InvalidModel& e) {
        std::cerr << "dj: " << e.what() << "\n";
        return 2;
    } catch (const dj::UnknownIdentifier& e) {
        std::cerr << "dj: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "dj: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "dj: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
