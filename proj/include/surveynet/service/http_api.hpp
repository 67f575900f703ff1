#pragma once

#include <map>
#include <stop_token>
#include <string>

#include <surveynet/service/service.hpp>

namespace httplib {
class Server;
}

namespace surveynet::service {

struct ApiRequest {
    std::string method; // GET, POST, PUT
    std::string path;   // without query string
    std::map<std::string, std::string> query;
    std::string body;
    std::string authorization; // value of the Authorization header
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// JSON-over-HTTP front of a SurveyService. `handle` is transport independent; `mount`
/// registers it on a cpp-httplib server.
class HttpApi {
public:
    explicit HttpApi(SurveyService& service) : service_(service) {}

    ApiResponse handle(const ApiRequest& request, std::stop_token stop = {}) const;
    /// Requests through the mounted server use a shared stop token, cancelled by `cancel()`.
    void mount(httplib::Server& server) const;
    /// Running and future analyses of mounted requests fail with Cancelled (503).
    void cancel() noexcept { stop_.request_stop(); }

    /// HTTP status for an error code.
    static int status_for(ErrorCode code);

private:
    SurveyService& service_;
    std::stop_source stop_;
};

} // namespace surveynet::service
