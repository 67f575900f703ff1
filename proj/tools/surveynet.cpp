#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include <surveynet/catalog.hpp>
#include <surveynet/formula.hpp>
#include <surveynet/instruments.hpp>
#include <surveynet/json_io.hpp>
#include <surveynet/sna.hpp>
#include <surveynet/service/http_api.hpp>

using namespace surveynet;
using namespace surveynet::service;

namespace {

httplib::Server* g_server = nullptr;
HttpApi* g_api = nullptr;

void on_signal(int) {
    if (g_api != nullptr)
        g_api->cancel();
    if (g_server != nullptr)
        g_server->stop();
}

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream out;
        out << std::cin.rdbuf();
        return out.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value != nullptr && *value != '\0' ? value : fallback;
}

struct StoreConfig {
    std::string data_dir = env_or("SURVEYNET_DATA_DIR", "./surveynet-data");
    std::string key_file = env_or("SURVEYNET_STUDY_KEY_FILE", "");

    void add_to(CLI::App& cmd) {
        cmd.add_option("--data-dir", data_dir, "directory holding surveynet.db (env SURVEYNET_DATA_DIR)");
        cmd.add_option("--study-key-file", key_file, "file with the pseudonym key (env SURVEYNET_STUDY_KEY_FILE)");
    }

    ServiceOptions options() const {
        if (key_file.empty())
            throw std::runtime_error("a study key file is required (--study-key-file or SURVEYNET_STUDY_KEY_FILE)");
        std::string key = read_file(key_file);
        while (!key.empty() && (key.back() == '\n' || key.back() == '\r' || key.back() == ' '))
            key.pop_back();
        if (key.empty())
            throw std::runtime_error("study key file " + key_file + " is empty");
        std::filesystem::create_directories(data_dir);
        ServiceOptions o;
        o.database = (std::filesystem::path(data_dir) / "surveynet.db").string();
        o.study_key = key;
        return o;
    }
};

int cmd_validate(const std::string& path) {
    const auto doc = parse_definition_document(read_file(path));
    Catalog catalog = Catalog::with_builtins();
    for (const auto& [id, inst] : doc.elements.instruments)
        catalog.instruments[id] = inst;
    catalog.questions = doc.elements.questions;
    catalog.groups = doc.elements.groups;
    catalog.templates = doc.elements.templates;
    const auto findings = validate_questionnaire(doc.questionnaire, catalog);
    for (const auto& f : findings)
        std::cout << f.rule << "\t" << f.element << "\t" << f.message << "\n";
    if (findings.empty())
        std::cout << "ok: " << doc.questionnaire.id << " has no findings\n";
    return findings.empty() ? 0 : 1;
}

int cmd_eval(const std::string& formula, const std::vector<std::string>& bindings) {
    AnswerMap answers;
    for (const auto& b : bindings) {
        const auto eq = b.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("answer binding must look like ITEM=VALUE: " + b);
        answers[b.substr(0, eq)] = parse_rational(b.substr(eq + 1));
    }
    const auto parsed = parse_formula(formula);
    std::cout << to_string(evaluate(parsed, answers)) << "\n";
    return 0;
}

int cmd_instruments(bool as_json) {
    InstrumentLibrary library;
    if (as_json) {
        Json out = Json::array();
        for (const auto* inst : library.list())
            out.push_back(*inst);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    for (const auto* inst : library.list()) {
        std::cout << inst->id << "\t" << inst->items.size() << " items\t";
        for (std::size_t i = 0; i < inst->scales.size(); ++i)
            std::cout << (i ? "," : "") << inst->scales[i].name;
        std::cout << "\t" << inst->name << "\n";
    }
    return 0;
}

int cmd_analyze(const std::string& path, const std::string& relation, const std::string& wave) {
    EdgeList edges = edges_from_csv(read_file(path));
    if (!relation.empty())
        edges.relation = relation;
    std::set<std::string> names;
    for (const auto& e : edges.edges) {
        names.insert(e.source);
        names.insert(e.target);
    }
    const std::vector<std::string> nodes(names.begin(), names.end());
    const auto matrix = build_matrix(edges, nodes);
    std::cout << Json(analyze(matrix, edges.relation, wave)).dump(2) << "\n";
    return 0;
}

int cmd_user_add(const StoreConfig& config, const std::string& login, const std::string& password,
                 const std::string& role, const std::string& respondent) {
    SurveyService svc(config.options());
    const Role r = role_from_string(role);
    UserAccount created;
    if (!svc.has_accounts()) {
        if (r != Role::SuperAdmin)
            throw std::runtime_error("the first account must be a super-admin");
        created = svc.bootstrap_admin(login, password);
    } else {
        // Offline administration runs with super-admin rights under the actor name "cli".
        created = svc.create_user(UserAccount{"", "cli", "", Role::SuperAdmin, "", ""}, login, password, r, respondent);
    }
    std::cout << created.id << "\t" << created.login << "\t" << to_string(created.role) << "\n";
    return 0;
}

int cmd_import(const StoreConfig& config, const std::string& login, const std::string& password,
               const std::string& csv_path, const std::string& mapping_path) {
    SurveyService svc(config.options());
    const auto caller = svc.session(svc.login(login, password));
    const auto mapping = Json::parse(read_file(mapping_path)).get<ImportMapping>();
    const auto summary = svc.import_csv(caller, read_file(csv_path), mapping);
    std::cout << Json(summary).dump(2) << "\n";
    return 0;
}

int cmd_serve(const StoreConfig& config, const std::string& host, int port) {
    SurveyService svc(config.options());
    if (!svc.has_accounts()) {
        const std::string password = env_or("SURVEYNET_ADMIN_PASSWORD", "");
        if (password.empty())
            throw std::runtime_error("no accounts yet: run `surveynet user add --role super-admin ...` or set "
                                     "SURVEYNET_ADMIN_PASSWORD to create the 'admin' account");
        svc.bootstrap_admin("admin", password);
    }
    HttpApi api(svc);
    httplib::Server server;
    api.mount(server);
    g_server = &server;
    g_api = &api;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << host << ":" << port << std::endl;
    if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 1;
    }
    g_server = nullptr;
    g_api = nullptr;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"surveynet: survey scoring and social network analysis"};
    app.require_subcommand(1);

    StoreConfig store;
    std::string host = env_or("SURVEYNET_HOST", "127.0.0.1");
    int port = std::stoi(env_or("SURVEYNET_PORT", "8080"));
    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    serve->add_option("--host", host, "bind address (env SURVEYNET_HOST)");
    serve->add_option("--port", port, "port (env SURVEYNET_PORT)");
    store.add_to(*serve);

    std::string doc_path;
    auto* validate = app.add_subcommand("validate", "check a questionnaire definition document");
    validate->add_option("document", doc_path, "JSON file or - for stdin")->required();

    std::string formula;
    std::vector<std::string> bindings;
    auto* eval = app.add_subcommand("eval-formula", "evaluate a scoring formula");
    eval->add_option("formula", formula)->required();
    eval->add_option("answers", bindings, "ITEM=VALUE bindings");

    bool as_json = false;
    auto* instruments = app.add_subcommand("instruments", "list the builtin instrument catalog");
    instruments->add_flag("--json", as_json, "print full definitions");

    std::string edges_path, relation, wave = "cli";
    auto* analyze_cmd = app.add_subcommand("analyze", "centralities and communities of an edge list");
    analyze_cmd->add_option("edges", edges_path, "CSV with source,target,weight,relation columns")->required();
    analyze_cmd->add_option("--relation", relation);
    analyze_cmd->add_option("--wave", wave);

    auto* user = app.add_subcommand("user", "manage accounts");
    user->require_subcommand(1);
    std::string login, password, role = "interviewer", respondent;
    auto* user_add = user->add_subcommand("add", "create an account");
    user_add->add_option("login", login)->required();
    user_add->add_option("--password", password)->required();
    user_add->add_option("--role", role, "super-admin, interviewer or respondent");
    user_add->add_option("--respondent", respondent, "respondent id for respondent accounts");
    store.add_to(*user_add);

    std::string csv_path, mapping_path;
    auto* import = app.add_subcommand("import", "import a legacy spreadsheet as a new wave");
    import->add_option("csv", csv_path)->required();
    import->add_option("--mapping", mapping_path, "JSON column mapping")->required();
    import->add_option("--login", login)->required();
    import->add_option("--password", password)->required();
    store.add_to(*import);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*serve)
            return cmd_serve(store, host, port);
        if (*validate)
            return cmd_validate(doc_path);
        if (*eval)
            return cmd_eval(formula, bindings);
        if (*instruments)
            return cmd_instruments(as_json);
        if (*analyze_cmd)
            return cmd_analyze(edges_path, relation, wave);
        if (*user_add)
            return cmd_user_add(store, login, password, role, respondent);
        if (*import)
            return cmd_import(store, login, password, csv_path, mapping_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
