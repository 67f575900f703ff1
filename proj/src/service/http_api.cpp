#include <surveynet/service/http_api.hpp>

#include <functional>
#include <regex>
#include <vector>

#include <httplib.h>

namespace surveynet::service {

namespace {

using surveynet::to_string;

struct Route {
    std::string method;
    std::regex pattern;
    std::function<ApiResponse(const ApiRequest&, const std::smatch&, std::stop_token)> run;
};

ApiResponse json_response(const Json& body, int status = 200) {
    return ApiResponse{status, "application/json", body.dump()};
}

ApiResponse error_response(int status, std::string_view code, const std::string& message, Json extra = {}) {
    Json body{{"error", code}, {"message", message}};
    if (extra.is_object())
        body.update(extra);
    return json_response(body, status);
}

std::string query(const ApiRequest& r, const std::string& key, const std::string& fallback = {}) {
    auto it = r.query.find(key);
    return it == r.query.end() ? fallback : it->second;
}

Json parse_body(const ApiRequest& r) {
    if (r.body.empty())
        return Json::object();
    Json j = Json::parse(r.body);
    if (!j.is_object())
        throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return j;
}

Json info_json(const QuestionnaireInfo& info) {
    return Json{{"id", info.draft.questionnaire.id},
                {"owner", info.owner},
                {"latest_version", info.latest_version},
                {"document", Json::parse(write_definition_document(info.draft))}};
}

Json account_view(const UserAccount& a) {
    return Json{{"id", a.id}, {"login", a.login}, {"role", to_string(a.role)}, {"respondent_id", a.respondent_id}};
}

std::string export_content_type(const std::string& format) {
    if (format.size() > 4 && format.compare(format.size() - 4, 4, "-csv") == 0)
        return "text/csv";
    if (format == "gexf")
        return "application/xml";
    return "application/json";
}

std::string report_content_type(const std::string& format) {
    return format == "json" ? "application/json" : "text/plain; charset=utf-8";
}

} // namespace

int HttpApi::status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownEndpoint:
        return 404;
    case ErrorCode::Denied:
        return 403;
    case ErrorCode::Unauthenticated:
        return 401;
    case ErrorCode::WaveClosed:
        return 409;
    case ErrorCode::PublishRejected:
    case ErrorCode::MissingRequired:
    case ErrorCode::ImportRejected:
    case ErrorCode::MissingAnswer:
    case ErrorCode::DivisionByZero:
    case ErrorCode::NoData:
    case ErrorCode::InsufficientData:
    case ErrorCode::NotPublished:
    case ErrorCode::EmptyGroup:
        return 422;
    case ErrorCode::Cancelled:
        return 503;
    case ErrorCode::Storage:
        return 500;
    default:
        return 400;
    }
}

ApiResponse HttpApi::handle(const ApiRequest& request, std::stop_token stop) const {
    SurveyService& svc = service_;
    auto caller = [&]() {
        const std::string prefix = "Bearer ";
        if (request.authorization.compare(0, prefix.size(), prefix) != 0)
            throw Error(ErrorCode::Unauthenticated, "missing bearer token");
        return svc.session(request.authorization.substr(prefix.size()));
    };

    static const std::string id = "([^/]+)";
    const std::vector<Route> routes = {
        {"POST", std::regex("/api/session"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             const Json b = parse_body(r);
             const std::string token = svc.login(b.at("login").get<std::string>(), b.at("password").get<std::string>());
             return json_response(Json{{"token", token}, {"account", account_view(svc.session(token))}});
         }},
        {"POST", std::regex("/api/users"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             const Json b = parse_body(r);
             const auto account = svc.create_user(caller(), b.at("login").get<std::string>(),
                                                  b.at("password").get<std::string>(),
                                                  role_from_string(b.at("role").get<std::string>()),
                                                  b.value("respondent_id", std::string()));
             return json_response(account_view(account), 201);
         }},
        {"GET", std::regex("/api/instruments"),
         [&](const ApiRequest&, const std::smatch&, std::stop_token) {
             return json_response(Json(svc.instruments(caller())));
         }},
        {"POST", std::regex("/api/instruments"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             const auto registered = svc.register_instrument(caller(), parse_body(r).get<Instrument>());
             return json_response(Json{{"id", registered}}, 201);
         }},
        {"GET", std::regex("/api/questionnaires"),
         [&](const ApiRequest&, const std::smatch&, std::stop_token) {
             Json out = Json::array();
             for (const auto& info : svc.questionnaires(caller()))
                 out.push_back(info_json(info));
             return json_response(out);
         }},
        {"POST", std::regex("/api/questionnaires"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             return json_response(info_json(svc.save_questionnaire(caller(), parse_definition_document(r.body))),
                                  201);
         }},
        {"GET", std::regex("/api/questionnaires/" + id),
         [&](const ApiRequest&, const std::smatch& m, std::stop_token) {
             return json_response(info_json(svc.questionnaire(caller(), m[1])));
         }},
        {"PUT", std::regex("/api/questionnaires/" + id),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             Json b = parse_body(r);
             const bool publish = b.value("publish", false);
             b.erase("publish");
             const auto account = caller();
             if (b.contains("questionnaire")) {
                 const auto doc = parse_definition_document(b.dump());
                 if (doc.questionnaire.id != m[1].str())
                     throw Error(ErrorCode::InvalidArgument, "document id does not match the URL");
                 svc.save_questionnaire(account, doc);
             }
             if (publish)
                 svc.publish(account, m[1]);
             return json_response(info_json(svc.questionnaire(account, m[1])));
         }},
        {"POST", std::regex("/api/questionnaires/" + id + "/publish"),
         [&](const ApiRequest&, const std::smatch& m, std::stop_token) {
             return json_response(Json{{"id", m[1].str()}, {"version", svc.publish(caller(), m[1])}});
         }},
        {"GET", std::regex("/api/questionnaires/" + id + "/versions/([0-9]+)"),
         [&](const ApiRequest&, const std::smatch& m, std::stop_token) {
             return json_response(Json(svc.published(caller(), m[1], std::stoll(m[2]))));
         }},
        {"POST", std::regex("/api/groups"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             const Json b = parse_body(r);
             const auto group = svc.save_group(caller(), b.at("group").get<RespondentGroup>(),
                                               b.value("respondents", std::vector<Respondent>{}));
             return json_response(Json(group), 201);
         }},
        {"POST", std::regex("/api/questionnaires/" + id + "/waves"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             const Json b = parse_body(r);
             const auto wave = svc.open_wave(caller(), m[1], b.at("group").get<std::string>(),
                                             b.value("label", std::string()), b.value("timestamp", std::int64_t{0}),
                                             b.value("version", std::int64_t{0}), b.value("id", std::string()));
             return json_response(Json(wave), 201);
         }},
        {"GET", std::regex("/api/questionnaires/" + id + "/waves"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             Json out = Json::array();
             for (const auto& tab : svc.wave_tabs(caller(), m[1], query(r, "group")))
                 out.push_back(Json{{"wave", tab.wave},
                                    {"submitted", tab.submitted},
                                    {"mean_audit", tab.mean_audit ? rational_to_json(*tab.mean_audit) : Json()}});
             return json_response(out);
         }},
        {"POST", std::regex("/api/waves/" + id + "/close"),
         [&](const ApiRequest&, const std::smatch& m, std::stop_token) {
             return json_response(Json(svc.close_wave(caller(), m[1])));
         }},
        {"POST", std::regex("/api/waves/" + id + "/roster"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             const Json b = parse_body(r);
             const std::string op = b.at("op").get<std::string>();
             const std::string who = b.at("respondent").get<std::string>();
             const std::string name = b.value("name", std::string());
             RosterEdit edit;
             if (op == "add")
                 edit = RosterEdit::add(who, name);
             else if (op == "remove")
                 edit = RosterEdit::remove(who);
             else if (op == "rename")
                 edit = RosterEdit::rename(who, name);
             else
                 throw Error(ErrorCode::InvalidArgument, "roster op must be add, remove or rename");
             return json_response(Json(svc.edit_roster(caller(), m[1], edit)));
         }},
        {"GET", std::regex("/api/waves/" + id + "/form"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             const auto account = caller();
             const std::string who = query(r, "respondent", account.respondent_id);
             return json_response(svc.wave_form(account, m[1], who));
         }},
        {"POST", std::regex("/api/waves/" + id + "/responses"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             const auto account = caller();
             const Json b = parse_body(r);
             const std::string who = b.value("respondent", account.respondent_id);
             const auto result =
                 svc.submit_response(account, m[1], who, b.value("answers", std::map<std::string, Answer>{}),
                                     completion_status_from_string(b.value("status", std::string("submitted"))));
             const bool show_scores = result.scores && account.role != Role::Respondent;
             return json_response(Json{{"response", result.response},
                                       {"scores", show_scores ? Json(*result.scores) : Json()},
                                       {"overwritten", result.overwritten}});
         }},
        {"GET", std::regex("/api/waves/" + id + "/responses"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             return json_response(Json(svc.responses(caller(), m[1], query(r, "respondent"))));
         }},
        {"GET", std::regex("/api/waves/" + id + "/scores"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token) {
             return json_response(Json(svc.scores(caller(), m[1], query(r, "respondent"))));
         }},
        {"GET", std::regex("/api/waves/" + id + "/network"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token st) {
             return json_response(svc.network(caller(), m[1], query(r, "relation"), st));
         }},
        {"GET", std::regex("/api/waves/" + id + "/group-report"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token st) {
             const std::string format = query(r, "format", "json");
             return ApiResponse{200, report_content_type(format),
                                svc.group_report(caller(), m[1], format, query(r, "relation"), st)};
         }},
        {"GET", std::regex("/api/waves/" + id + "/export"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token st) {
             const std::string format = query(r, "format", "scores-csv");
             return ApiResponse{200, export_content_type(format),
                                svc.export_wave(caller(), m[1], format, query(r, "relation"), st)};
         }},
        {"GET", std::regex("/api/respondents/" + id + "/report"),
         [&](const ApiRequest& r, const std::smatch& m, std::stop_token st) {
             const std::string format = query(r, "format", "json");
             return ApiResponse{200, report_content_type(format),
                                svc.respondent_report(caller(), m[1], query(r, "wave"), format,
                                                      query(r, "relation"), st)};
         }},
        {"GET", std::regex("/api/churn"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             return json_response(svc.churn(caller(), query(r, "before"), query(r, "after"), query(r, "relation")));
         }},
        {"POST", std::regex("/api/import/csv"),
         [&](const ApiRequest& r, const std::smatch&, std::stop_token) {
             const Json b = parse_body(r);
             const auto summary =
                 svc.import_csv(caller(), b.at("csv").get<std::string>(), b.at("mapping").get<ImportMapping>());
             return json_response(Json(summary), 201);
         }},
        {"GET", std::regex("/api/pseudonyms"),
         [&](const ApiRequest&, const std::smatch&, std::stop_token) {
             return json_response(Json(svc.pseudonym_map(caller())));
         }},
        {"GET", std::regex("/api/audit"),
         [&](const ApiRequest&, const std::smatch&, std::stop_token) {
             Json out = Json::array();
             for (const auto& e : svc.audit_log(caller()))
                 out.push_back(Json{{"sequence", e.sequence},
                                    {"timestamp", e.timestamp},
                                    {"actor", e.actor},
                                    {"action", e.action},
                                    {"target", e.target},
                                    {"detail", e.detail}});
             return json_response(out);
         }},
    };

    try {
        bool path_known = false;
        for (const auto& route : routes) {
            std::smatch m;
            if (!std::regex_match(request.path, m, route.pattern))
                continue;
            path_known = true;
            if (route.method == request.method)
                return route.run(request, m, stop);
        }
        if (path_known)
            return error_response(405, "MethodNotAllowed", request.method + " is not supported on " + request.path);
        return error_response(404, "NotFound", "no endpoint " + request.path);
    } catch (const AccessDenied& e) {
        return error_response(403, to_string(e.code()), e.what(), Json{{"rule", e.rule()}});
    } catch (const PublishRejected& e) {
        return error_response(422, to_string(e.code()), e.what(), Json{{"findings", e.findings()}});
    } catch (const MissingRequired& e) {
        return error_response(422, to_string(e.code()), e.what(), Json{{"missing", e.items()}});
    } catch (const ImportRejected& e) {
        return error_response(422, to_string(e.code()), e.what(), Json{{"rows", e.errors()}});
    } catch (const Error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return error_response(400, "InvalidArgument", e.what());
    } catch (const std::invalid_argument& e) {
        return error_response(400, "InvalidArgument", e.what());
    } catch (const std::out_of_range& e) {
        return error_response(400, "InvalidArgument", e.what());
    }
}

void HttpApi::mount(httplib::Server& server) const {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [key, value] : req.params)
            request.query[key] = value;
        request.body = req.body;
        request.authorization = req.get_header_value("Authorization");
        const ApiResponse response = handle(request, stop_.get_token());
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    const std::string pattern = "/api/.*";
    server.Get(pattern, forward);
    server.Post(pattern, forward);
    server.Put(pattern, forward);
}

} // namespace surveynet::service
