#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include <surveynet/service/http_api.hpp>

#include <httplib.h>
#include <thread>

#include "study.hpp"

using namespace surveynet;
using namespace surveynet::service;

namespace {

ServiceOptions options(std::string db = ":memory:") {
    ServiceOptions o;
    o.database = std::move(db);
    o.study_key = "unit-test-key";
    return o;
}

struct Fixture {
    SurveyService svc;
    study::Actors who;
    Wave wave;
    std::mt19937_64 rng{7};

    explicit Fixture(ServiceOptions o = options(), int size = 6) : svc(std::move(o)) {
        who = study::actors(svc);
        svc.save_questionnaire(who.alice, study::document("school"));
        svc.publish(who.alice, "school");
        const auto kids = study::people("R", size);
        svc.save_group(who.alice, study::group_of("6A", kids), kids);
        wave = svc.open_wave(who.alice, "school", "6A", "T1", 1000);
    }

    SubmitResult submit(const std::string& respondent) {
        return svc.submit_response(who.alice, wave.id, respondent, study::answers(rng, wave.roster, respondent),
                                   CompletionStatus::Submitted);
    }
};

std::string temp_db(const char* name) {
    auto path = std::filesystem::temp_directory_path() / (std::string("surveynet-") + name + ".db");
    for (const char* suffix : {"", "-wal", "-shm"})
        std::filesystem::remove(path.string() + suffix);
    return path.string();
}

} // namespace

TEST_CASE("authorization decisions carry rule ids") {
    CHECK(authorize(Role::Interviewer, Action::QuestionnaireRead, Relation::Other) ==
          Decision{false, "I2-other-interviewers-hidden", false});
    CHECK(authorize(Role::Interviewer, Action::InstrumentRegister, Relation::None).rule == "I3-catalog-read-only");
    CHECK_FALSE(authorize(Role::Respondent, Action::ResponseRead, Relation::Other).allowed);
    CHECK(authorize(Role::Respondent, Action::ResponseSubmit, Relation::Own).allowed);
    CHECK_FALSE(authorize(Role::Respondent, Action::ScoresRead, Relation::Own).allowed);
    const auto raw = authorize(Role::SuperAdmin, Action::ResponseRead, Relation::Other);
    CHECK(raw.allowed);
    CHECK(raw.audited);
    CHECK_FALSE(authorize(Role::SuperAdmin, Action::Export, Relation::Other).audited);
}

TEST_CASE("password records and sessions") {
    const auto record = hash_password("secret");
    CHECK(record.rfind("pbkdf2-sha256$", 0) == 0);
    CHECK(verify_password("secret", record));
    CHECK_FALSE(verify_password("Secret", record));
    CHECK(hash_password("secret") != record);
    CHECK(random_token().size() == 64);

    SurveyService svc(options());
    CHECK_FALSE(svc.has_accounts());
    auto who = study::actors(svc);
    CHECK_THROWS_AS(svc.bootstrap_admin("again", "x"), Error);
    const auto token = svc.login("alice", "alice-pass");
    CHECK(svc.session(token) == who.alice);
    CHECK_THROWS_AS(svc.login("alice", "wrong"), Error);
    CHECK_THROWS_AS(svc.session("nope"), Error);
    CHECK_THROWS_AS(svc.create_user(who.alice, "eve", "x", Role::Interviewer), AccessDenied);
    CHECK_THROWS_AS(svc.create_user(who.admin, "alice", "x", Role::Interviewer), Error);
}

TEST_CASE("pseudonyms are keyed, stable and injective") {
    PseudonymMap a("k1"), b("k1"), c("k2");
    const auto t = a.token(PseudonymMap::Kind::Respondent, "R1");
    CHECK(t.size() == 10);
    CHECK(t.rfind("R-", 0) == 0);
    CHECK(b.token(PseudonymMap::Kind::Respondent, "R1") == t);
    CHECK(c.token(PseudonymMap::Kind::Respondent, "R1") != t);
    CHECK(a.token(PseudonymMap::Kind::Field, "R1").rfind("A-", 0) == 0);
    CHECK(t == "R-" + PseudonymMap::keyed_token("k1", PseudonymMap::Kind::Respondent, "R1").substr(2));
    std::set<std::string> seen;
    for (int i = 0; i < 5000; ++i)
        seen.insert(a.token(PseudonymMap::Kind::Respondent, "P" + std::to_string(i)));
    CHECK(seen.size() == 5000);
    CHECK_THROWS_AS(PseudonymMap(""), Error);
}

TEST_CASE("store transactions roll back") {
    Store store(":memory:");
    store.put("k", "a", "1");
    {
        Store::Transaction tx(store);
        store.put("k", "b", "2");
        store.put("k", "a", "3");
    }
    CHECK(store.get("k", "a") == std::optional<std::string>("1"));
    CHECK_FALSE(store.get("k", "b"));
    {
        Store::Transaction tx(store);
        store.put("k", "b", "2");
        tx.commit();
    }
    CHECK(store.list("k").size() == 2);
    store.remove("k", "a");
    CHECK(store.list("k").size() == 1);
    store.audit("me", "act", "x", "d");
    CHECK(store.audit_log().size() == 1);
}

TEST_CASE("interviewers only see their own questionnaires") {
    Fixture f;
    CHECK(f.svc.questionnaire(f.who.alice, "school").owner == f.who.alice.id);
    CHECK(f.svc.questionnaires(f.who.bob).empty());
    CHECK(f.svc.questionnaires(f.who.admin).size() == 1);
    try {
        f.svc.questionnaire(f.who.bob, "school");
        FAIL("expected denial");
    } catch (const AccessDenied& e) {
        CHECK(e.rule() == "I2-other-interviewers-hidden");
    }
    CHECK_THROWS_AS(f.svc.scores(f.who.bob, f.wave.id), AccessDenied);
    CHECK_THROWS_AS(f.svc.export_wave(f.who.bob, f.wave.id, "scores-csv"), AccessDenied);
    CHECK_THROWS_AS(f.svc.register_instrument(f.who.alice, *InstrumentLibrary().find(kAuditId)), AccessDenied);
    CHECK(f.svc.instruments(f.who.bob).size() == 5);
}

TEST_CASE("draft documents may not define instruments") {
    Fixture f;
    auto doc = study::document("other");
    doc.elements.instruments["MY"] = *InstrumentLibrary().find(kAuditId);
    CHECK_THROWS_AS(f.svc.save_questionnaire(f.who.alice, doc), Error);
}

TEST_CASE("publishing rejects invalid drafts with findings") {
    Fixture f;
    auto doc = study::document("broken");
    doc.questionnaire.elements.push_back({ElementKind::Question, "nowhere"});
    f.svc.save_questionnaire(f.who.alice, doc);
    try {
        f.svc.publish(f.who.alice, "broken");
        FAIL("expected rejection");
    } catch (const PublishRejected& e) {
        REQUIRE(e.findings().size() == 1);
        CHECK(e.findings()[0].rule == "unresolved-element");
    }
    CHECK(f.svc.questionnaire(f.who.alice, "broken").latest_version == 0);
}

TEST_CASE("submission scores atomically and checks the roster") {
    Fixture f;
    const auto result = f.submit("R1");
    REQUIRE(result.scores);
    CHECK(result.scores->find("AUDIT.total"));
    CHECK_FALSE(result.overwritten);
    CHECK(f.svc.scores(f.who.alice, f.wave.id).size() == 1);

    auto answers = study::answers(f.rng, f.wave.roster, "R2");
    answers.erase("AUDIT.Q3");
    try {
        f.svc.submit_response(f.who.alice, f.wave.id, "R2", answers, CompletionStatus::Submitted);
        FAIL("expected missing answers");
    } catch (const MissingRequired& e) {
        CHECK(e.items() == std::vector<std::string>{"AUDIT.Q3"});
    }
    CHECK(f.svc.responses(f.who.alice, f.wave.id, "R2").empty());

    const auto partial = f.svc.submit_response(f.who.alice, f.wave.id, "R2", answers, CompletionStatus::Partial);
    CHECK_FALSE(partial.scores);
    CHECK(f.svc.responses(f.who.alice, f.wave.id, "R2").size() == 1);
    CHECK(f.svc.scores(f.who.alice, f.wave.id, "R2").empty());

    CHECK_THROWS_AS(f.svc.submit_response(f.who.alice, f.wave.id, "Z9", {}, CompletionStatus::Partial), AccessDenied);
    auto bad = answers;
    bad["nope"] = Answer::choice(0);
    CHECK_THROWS_AS(f.svc.submit_response(f.who.alice, f.wave.id, "R2", bad, CompletionStatus::Partial), Error);
    bad = answers;
    bad["AUDIT.Q1"] = Answer::choice(9);
    CHECK_THROWS_AS(f.svc.submit_response(f.who.alice, f.wave.id, "R2", bad, CompletionStatus::Partial), Error);
    bad = answers;
    bad["F[R2]"] = Answer::choice(1);
    CHECK_THROWS_AS(f.svc.submit_response(f.who.alice, f.wave.id, "R2", bad, CompletionStatus::Partial), Error);
}

TEST_CASE("resubmission overwrites with an audit entry") {
    Fixture f;
    f.submit("R1");
    const auto again = f.submit("R1");
    CHECK(again.overwritten);
    bool audited = false;
    for (const auto& e : f.svc.audit_log(f.who.admin))
        audited = audited || (e.action == "response.overwrite" && e.target == f.wave.id + "/R1");
    CHECK(audited);
    CHECK_THROWS_AS(f.svc.submit_response(f.who.alice, f.wave.id, "R1", again.response.answers,
                                          CompletionStatus::Partial),
                    Error);

    auto o = options();
    o.allow_resubmission = false;
    Fixture strict(o);
    strict.submit("R1");
    CHECK_THROWS_AS(strict.submit("R1"), Error);
}

TEST_CASE("closed waves refuse submissions and roster edits") {
    Fixture f;
    f.svc.close_wave(f.who.alice, f.wave.id);
    try {
        f.submit("R1");
        FAIL("expected WaveClosed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WaveClosed);
    }
    CHECK_THROWS_AS(f.svc.edit_roster(f.who.alice, f.wave.id, RosterEdit::add("R99")), Error);
}

TEST_CASE("respondents fill their own form only") {
    Fixture f;
    const auto r1 = f.svc.create_user(f.who.admin, "kid1", "pw", Role::Respondent, "R1");
    const auto form = f.svc.wave_form(r1, f.wave.id, "R1");
    CHECK(form["relational"].size() == 5);
    CHECK_THROWS_AS(f.svc.wave_form(r1, f.wave.id, "R2"), AccessDenied);
    const auto answers = study::answers(f.rng, f.wave.roster, "R1");
    f.svc.submit_response(r1, f.wave.id, "R1", answers, CompletionStatus::Submitted);
    CHECK(f.svc.responses(r1, f.wave.id, "R1").size() == 1);
    CHECK_THROWS_AS(f.svc.responses(r1, f.wave.id, "R2"), AccessDenied);
    CHECK_THROWS_AS(f.svc.responses(r1, f.wave.id), AccessDenied);
    CHECK_THROWS_AS(f.svc.scores(r1, f.wave.id, "R1"), AccessDenied);
    CHECK_THROWS_AS(f.svc.network(r1, f.wave.id, "friendship"), AccessDenied);
    CHECK_THROWS_AS(
        f.svc.submit_response(r1, f.wave.id, "R2", answers, CompletionStatus::Partial), AccessDenied);
}

TEST_CASE("super-admin raw reads are audited") {
    Fixture f;
    f.submit("R1");
    const auto before = f.svc.audit_log(f.who.admin).size();
    CHECK(f.svc.responses(f.who.admin, f.wave.id).size() == 1);
    const auto log = f.svc.audit_log(f.who.admin);
    REQUIRE(log.size() == before + 1);
    CHECK(log.back().action == "response.read");
    CHECK(log.back().actor == "admin");
    f.svc.responses(f.who.alice, f.wave.id);
    CHECK(f.svc.audit_log(f.who.admin).size() == before + 1);
    CHECK_THROWS_AS(f.svc.audit_log(f.who.alice), AccessDenied);
    CHECK_THROWS_AS(f.svc.pseudonym_map(f.who.alice), AccessDenied);
}

TEST_CASE("roster edits keep alter items in step") {
    Fixture f;
    f.submit("R1");
    f.submit("R2");
    f.svc.edit_roster(f.who.alice, f.wave.id, RosterEdit::add("R7", "Newcomer"));
    auto form = f.svc.wave_form(f.who.alice, f.wave.id, "R1");
    CHECK(form["relational"].size() == 6);
    const auto kept = f.svc.responses(f.who.alice, f.wave.id, "R1").at(0);
    f.svc.edit_roster(f.who.alice, f.wave.id, RosterEdit::remove("R2"));
    CHECK(f.svc.responses(f.who.alice, f.wave.id, "R2").empty());
    CHECK(f.svc.scores(f.who.alice, f.wave.id, "R2").empty());
    const auto after = f.svc.responses(f.who.alice, f.wave.id, "R1").at(0);
    for (const auto& [item, answer] : kept.answers)
        if (item != "F[R2]")
            CHECK(after.answers.at(item) == answer);
    CHECK_FALSE(after.answers.count("F[R2]"));
    f.svc.edit_roster(f.who.alice, f.wave.id, RosterEdit::rename("R3", "Renamed"));
    form = f.svc.wave_form(f.who.alice, f.wave.id, "R1");
    bool renamed = false;
    for (const auto& item : form["relational"])
        renamed = renamed || item["prompt"].get<std::string>().find("Renamed") != std::string::npos;
    CHECK(renamed);
}

TEST_CASE("analysis views are pseudonymous") {
    Fixture f;
    for (const auto& id : f.wave.roster)
        f.submit(id);
    const auto network = f.svc.network(f.who.alice, f.wave.id, "friendship");
    CHECK(network["nodes"].size() == 6);
    const std::string text = network.dump();
    CHECK(text.find("\"R1\"") == std::string::npos);
    CHECK(text.find(f.svc.respondent_token("R1")) != std::string::npos);

    const auto report = Json::parse(f.svc.respondent_report(f.who.alice, "R1", f.wave.id, "json"));
    CHECK(report["respondent"] == f.svc.respondent_token("R1"));
    const auto prose = f.svc.respondent_report(f.who.alice, "R1", f.wave.id, "text");
    CHECK(prose.find("Student R1") == std::string::npos);
    CHECK(prose.find("percentile") != std::string::npos);
    CHECK(Json::parse(f.svc.group_report(f.who.alice, f.wave.id, "json"))["respondents"] == 6);
    CHECK_THROWS_AS(f.svc.respondent_report(f.who.alice, "R1", f.wave.id, "pdf"), Error);

    for (const char* format : {"scores-csv", "edges-csv", "graph-node-link", "gexf", "reports", "responses-csv"}) {
        const auto out = f.svc.export_wave(f.who.alice, f.wave.id, format);
        CHECK(!out.empty());
        for (const auto& id : f.wave.roster) {
            CHECK(out.find("nick-" + id) == std::string::npos);
            CHECK(out.find("Student " + id) == std::string::npos);
        }
    }
    CHECK(f.svc.pseudonym_map(f.who.admin).count("respondent:R1"));
}

TEST_CASE("wave tabs and churn") {
    Fixture f;
    for (const auto& id : f.wave.roster)
        f.submit(id);
    const auto w2 = f.svc.open_wave(f.who.alice, "school", "6A", "T2", 2000);
    for (const auto& id : w2.roster)
        f.svc.submit_response(f.who.alice, w2.id, id, study::answers(f.rng, w2.roster, id),
                              CompletionStatus::Submitted);
    const auto tabs = f.svc.wave_tabs(f.who.alice, "school");
    REQUIRE(tabs.size() == 2);
    CHECK(tabs[0].wave.label == "T1");
    CHECK(tabs[1].submitted == 6);
    CHECK(tabs[0].mean_audit);
    const auto churn = f.svc.churn(f.who.alice, f.wave.id, w2.id);
    CHECK(churn["relation"] == "friendship");
    CHECK(churn["churn"].contains("jaccard"));
}

TEST_CASE("state and tokens survive a restart") {
    const auto db = temp_db("restart");
    std::string token, scores;
    {
        Fixture f(options(db));
        f.submit("R1");
        f.submit("R2");
        token = f.svc.respondent_token("R1");
        scores = f.svc.export_wave(f.who.alice, f.wave.id, "scores-csv");
    }
    SurveyService again(options(db));
    const auto alice_token = again.login("alice", "alice-pass");
    const auto alice = again.session(alice_token);
    const auto waves = again.wave_tabs(alice, "school");
    REQUIRE(waves.size() == 1);
    CHECK(again.export_wave(alice, waves[0].wave.id, "scores-csv") == scores);
    CHECK(again.respondent_token("R1") == token);
    const auto w2 = again.open_wave(alice, "school", "6A", "T2", 5);
    CHECK(w2.id != waves[0].wave.id);
}

TEST_CASE("csv import creates the wave and reports row errors") {
    Fixture f;
    std::string csv = "id,name,sex,AUDIT.Q1,AUDIT.Q2,AUDIT.Q3,AUDIT.Q4,AUDIT.Q5,AUDIT.Q6,AUDIT.Q7,AUDIT.Q8,AUDIT.Q9,"
                      "AUDIT.Q10,FAS-II.Q1,FAS-II.Q2,FAS-II.Q3,FAS-II.Q4,nickname,phone,postcode,F[S2],F[S1],color\n";
    csv += "S1,Ana,F,1,1,1,1,1,1,1,1,1,1,0,1,2,3,a,b,c,3,,red\n";
    csv += "S2,Ben,M,0,0,0,0,0,0,0,0,0,0,0,0,0,0,d,e,f,,2,blue\n";
    csv += "S3,Cid,M,4,4,4,4,4,4,4,4,4,4,0,0,0,0,g,h,i,1,1,green\n";
    ImportMapping mapping;
    mapping.questionnaire_id = "school";
    mapping.group_id = "7B";
    mapping.name_column = "name";
    mapping.attributes["sex"] = "sex";
    mapping.wave_label = "legacy";
    const auto summary = f.svc.import_csv(f.who.alice, csv, mapping);
    CHECK(summary.rows_imported == 3);
    CHECK(summary.respondents_created == 3);
    CHECK(summary.scored == 3);
    CHECK(summary.skipped_columns == std::vector<std::string>{"color"});
    const auto scores = f.svc.scores(f.who.alice, summary.wave_id);
    REQUIRE(scores.size() == 3);
    CHECK(scores[2].find("AUDIT.total")->score == 40);
    const auto edges = f.svc.export_wave(f.who.alice, summary.wave_id, "edges-csv");
    CHECK(std::count(edges.begin(), edges.end(), '\n') == 5);

    std::string broken = csv;
    broken += "S4,Dan,M,7,0,0,0,0,0,0,0,0,0,0,0,0,0,j,k,l,,,x\n";
    mapping.wave_id = "W-bad";
    CHECK_THROWS_AS(f.svc.import_csv(f.who.alice, broken, mapping), ImportRejected);
    CHECK_THROWS_AS(f.svc.scores(f.who.alice, "W-bad"), Error);
    mapping.strict = false;
    const auto lenient = f.svc.import_csv(f.who.alice, broken, mapping);
    CHECK(lenient.rows_imported == 3);
    REQUIRE(lenient.row_errors.size() == 1);
    CHECK(lenient.row_errors[0].line == 5);
    CHECK_THROWS_AS(f.svc.import_csv(f.who.bob, csv, mapping), AccessDenied);
}

TEST_CASE("http api maps errors to statuses") {
    Fixture f;
    HttpApi api(f.svc);
    auto call = [&](std::string method, std::string path, std::string body = {}, std::string token = {},
                    std::map<std::string, std::string> query = {}) {
        return api.handle(ApiRequest{std::move(method), std::move(path), std::move(query), std::move(body),
                                     token.empty() ? "" : "Bearer " + token});
    };
    CHECK(call("POST", "/api/session", R"({"login":"alice","password":"bad"})").status == 401);
    const auto session = call("POST", "/api/session", R"({"login":"alice","password":"alice-pass"})");
    REQUIRE(session.status == 200);
    const std::string alice = Json::parse(session.body)["token"];
    const std::string bob =
        Json::parse(call("POST", "/api/session", R"({"login":"bob","password":"bob-pass"})").body)["token"];

    CHECK(call("GET", "/api/questionnaires").status == 401);
    CHECK(call("GET", "/api/questionnaires/school", "", alice).status == 200);
    const auto denied = call("GET", "/api/questionnaires/school", "", bob);
    CHECK(denied.status == 403);
    CHECK(Json::parse(denied.body)["rule"] == "I2-other-interviewers-hidden");
    CHECK(call("GET", "/api/questionnaires/none", "", alice).status == 404);
    CHECK(call("GET", "/api/nowhere", "", alice).status == 404);
    CHECK(call("DELETE", "/api/questionnaires/school", "", alice).status == 405);
    CHECK(call("POST", "/api/instruments", Json(*InstrumentLibrary().find(kAuditId)).dump(), alice).status == 403);
    CHECK(Json::parse(call("GET", "/api/instruments", "", alice).body).size() == 5);
    CHECK(call("POST", "/api/questionnaires", "{not json", alice).status == 400);

    auto answers = study::answers(f.rng, f.wave.roster, "R1");
    Json body{{"respondent", "R1"}, {"answers", answers}, {"status", "submitted"}};
    const auto ok = call("POST", "/api/waves/" + f.wave.id + "/responses", body.dump(), alice);
    CHECK(ok.status == 200);
    CHECK(Json::parse(ok.body)["scores"]["entries"].size() > 0);
    body["answers"].erase("AUDIT.Q1");
    const auto missing = call("POST", "/api/waves/" + f.wave.id + "/responses", body.dump(), alice);
    CHECK(missing.status == 422);
    CHECK(Json::parse(missing.body)["missing"] == Json::array({"AUDIT.Q1"}));

    CHECK(call("GET", "/api/waves/" + f.wave.id + "/scores", "", alice).status == 200);
    CHECK(call("GET", "/api/waves/" + f.wave.id + "/network", "", alice, {{"relation", "friendship"}}).status == 200);
    CHECK(call("GET", "/api/waves/" + f.wave.id + "/network", "", alice, {{"relation", "hate"}}).status == 404);
    const auto report =
        call("GET", "/api/respondents/R1/report", "", alice, {{"wave", f.wave.id}, {"format", "text"}});
    CHECK(report.status == 200);
    CHECK(report.content_type.rfind("text/plain", 0) == 0);
    const auto exported = call("GET", "/api/waves/" + f.wave.id + "/export", "", alice, {{"format", "scores-csv"}});
    CHECK(exported.status == 200);
    CHECK(exported.content_type == "text/csv");
    CHECK(call("GET", "/api/waves/" + f.wave.id + "/export", "", alice, {{"format", "xls"}}).status == 400);

    auto doc = Json::parse(write_definition_document(study::document("second")));
    CHECK(call("POST", "/api/questionnaires", doc.dump(), bob).status == 201);
    doc["publish"] = true;
    const auto published = call("PUT", "/api/questionnaires/second", doc.dump(), bob);
    CHECK(published.status == 200);
    CHECK(Json::parse(published.body)["latest_version"] == 1);

    CHECK(call("POST", "/api/waves/" + f.wave.id + "/close", "", alice).status == 200);
    CHECK(call("POST", "/api/waves/" + f.wave.id + "/responses", body.dump(), alice).status == 409);
}

TEST_CASE("http api over a socket") {
    Fixture f;
    HttpApi api(f.svc);
    httplib::Server server;
    api.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto login = client.Post("/api/session", R"({"login":"alice","password":"alice-pass"})", "application/json");
    REQUIRE(login);
    CHECK(login->status == 200);
    const std::string token = Json::parse(login->body)["token"];
    httplib::Headers auth{{"Authorization", "Bearer " + token}};
    auto scores = client.Get("/api/waves/" + f.wave.id + "/scores", auth);
    REQUIRE(scores);
    CHECK(scores->status == 200);
    auto network = client.Get("/api/waves/" + f.wave.id + "/network?relation=friendship", auth);
    REQUIRE(network);
    CHECK(network->status == 200);
    CHECK(Json::parse(network->body)["nodes"].size() == 6);
    server.stop();
    thread.join();
}
