#include <surveynet/service/service.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

#include <surveynet/instruments.hpp>

namespace surveynet::service {

namespace {

using surveynet::to_string;

using Kind = PseudonymMap::Kind;

constexpr const char* kAccount = "account";
constexpr const char* kQuestionnaire = "questionnaire";
constexpr const char* kPublished = "published";
constexpr const char* kInstrument = "instrument";
constexpr const char* kGroup = "group";
constexpr const char* kRespondent = "respondent";
constexpr const char* kWave = "wave";
constexpr const char* kResponse = "response";
constexpr const char* kScore = "score";
constexpr const char* kRetired = "retired";
constexpr const char* kPseudonym = "pseudonym";
constexpr const char* kCounter = "counter";

std::string response_key(const std::string& wave, const std::string& respondent) { return wave + "/" + respondent; }

std::string published_key(const std::string& id, std::int64_t version) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "@%08lld", static_cast<long long>(version));
    return id + buf;
}

Json account_json(const UserAccount& a) {
    return Json{{"id", a.id},     {"login", a.login},         {"credential", a.credential},
                {"role", to_string(a.role)}, {"respondent_id", a.respondent_id}, {"owner", a.owner}};
}

UserAccount account_from(const Json& j) {
    return UserAccount{j.at("id").get<std::string>(),
                       j.at("login").get<std::string>(),
                       j.at("credential").get<std::string>(),
                       role_from_string(j.at("role").get<std::string>()),
                       j.value("respondent_id", std::string()),
                       j.value("owner", std::string())};
}

bool in_roster(const Wave& wave, const std::string& id) {
    return std::find(wave.roster.begin(), wave.roster.end(), id) != wave.roster.end();
}

std::string padded(const char* prefix, std::uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%04llu", prefix, static_cast<unsigned long long>(n));
    return buf;
}

} // namespace

AccessDenied::AccessDenied(std::string rule, const std::string& what)
    : Error(ErrorCode::Denied, what + " denied by rule " + rule), rule_(std::move(rule)) {}

MissingRequired::MissingRequired(std::vector<std::string> items)
    : Error(ErrorCode::MissingRequired,
            [&] {
                std::string m = "missing required answers:";
                for (const auto& i : items)
                    m += " " + i;
                return m;
            }()),
      items_(std::move(items)) {}

struct WaveState {
    Wave wave;
    std::vector<RelationalInstance> instances;
    std::map<std::string, ResponseSet> responses;
    std::map<std::string, ScoreReport> scores;
    std::string owner;
};

struct SurveyService::State {
    explicit State(const std::string& key) : pseudonyms(key) {}

    std::map<std::string, UserAccount> accounts; // by id
    std::map<std::string, std::string> logins;   // login -> id
    std::map<std::string, std::string> sessions; // token -> id
    std::map<std::string, QuestionnaireInfo> drafts;
    QuestionnaireRegistry registry;
    InstrumentLibrary library;
    std::map<std::string, std::pair<RespondentGroup, std::string>> groups;
    std::map<std::string, std::pair<Respondent, std::string>> respondents;
    std::map<std::string, WaveState> waves;
    PseudonymMap pseudonyms;
    std::set<std::pair<Kind, std::string>> persisted_tokens;
    std::uint64_t counter = 0;

    std::uint64_t next() { return ++counter; }

    Catalog catalog_for(const DefinitionDocument& doc) const {
        Catalog catalog;
        for (const auto* inst : library.list())
            catalog.instruments[inst->id] = *inst;
        catalog.questions = doc.elements.questions;
        catalog.groups = doc.elements.groups;
        catalog.templates = doc.elements.templates;
        return catalog;
    }

    WaveState& wave(const std::string& id) {
        auto it = waves.find(id);
        if (it == waves.end())
            throw Error(ErrorCode::NotFound, "unknown wave " + id);
        return it->second;
    }
    const WaveState& wave(const std::string& id) const { return const_cast<State*>(this)->wave(id); }

    const PublishedQuestionnaire& published_of(const Wave& w) const {
        const auto* p = registry.find(w.questionnaire_id, w.questionnaire_version);
        if (p == nullptr)
            throw Error(ErrorCode::NotFound, "questionnaire version of wave " + w.id + " is missing");
        return *p;
    }
};

SurveyService::SurveyService(ServiceOptions options)
    : options_(std::move(options)), store_(std::make_unique<Store>(options_.database)),
      state_(std::make_unique<State>(options_.study_key)) {
    auto& s = *state_;
    for (const auto& [id, body] : store_->list(kAccount)) {
        auto a = account_from(Json::parse(body));
        s.logins[a.login] = a.id;
        s.accounts[a.id] = a;
    }
    for (const auto& [id, body] : store_->list(kInstrument))
        s.library.restore(Json::parse(body).get<Instrument>());
    for (const auto& [id, body] : store_->list(kQuestionnaire)) {
        const Json j = Json::parse(body);
        QuestionnaireInfo info;
        info.draft = parse_definition_document(j.at("document").dump());
        info.owner = j.at("owner").get<std::string>();
        s.drafts[id] = std::move(info);
    }
    for (const auto& [id, body] : store_->list(kPublished)) {
        auto p = Json::parse(body).get<PublishedQuestionnaire>();
        s.drafts[p.def.id].latest_version = std::max(s.drafts[p.def.id].latest_version, p.def.version);
        s.registry.restore(std::move(p));
    }
    for (const auto& [id, body] : store_->list(kGroup)) {
        const Json j = Json::parse(body);
        s.groups[id] = {j.at("group").get<RespondentGroup>(), j.at("owner").get<std::string>()};
    }
    for (const auto& [id, body] : store_->list(kRespondent)) {
        const Json j = Json::parse(body);
        s.respondents[id] = {j.at("respondent").get<Respondent>(), j.at("owner").get<std::string>()};
    }
    for (const auto& [id, body] : store_->list(kWave)) {
        const Json j = Json::parse(body);
        WaveState w;
        w.wave = j.at("wave").get<Wave>();
        w.instances = j.at("instances").get<std::vector<RelationalInstance>>();
        w.owner = j.at("owner").get<std::string>();
        s.waves[id] = std::move(w);
    }
    for (const auto& [key, body] : store_->list(kResponse)) {
        auto r = Json::parse(body).get<ResponseSet>();
        if (auto it = s.waves.find(r.wave_id); it != s.waves.end())
            it->second.responses[r.respondent_id] = std::move(r);
    }
    for (const auto& [key, body] : store_->list(kScore)) {
        auto r = Json::parse(body).get<ScoreReport>();
        if (auto it = s.waves.find(r.wave_id); it != s.waves.end())
            it->second.scores[r.respondent_id] = std::move(r);
    }
    for (const auto& [key, body] : store_->list(kPseudonym)) {
        const Json j = Json::parse(body);
        const Kind kind = PseudonymMap::kind_from_string(j.at("kind").get<std::string>());
        const std::string value = j.at("value").get<std::string>();
        s.pseudonyms.restore(kind, value, j.at("token").get<std::string>());
        s.persisted_tokens.insert({kind, value});
    }
    if (auto c = store_->get(kCounter, "ids"))
        s.counter = std::stoull(*c);
}

SurveyService::~SurveyService() = default;

void SurveyService::require(const UserAccount& caller, Action action, Relation relation,
                            const std::string& target) const {
    const Decision d = authorize(caller.role, action, relation);
    if (!d.allowed)
        throw AccessDenied(d.rule, std::string(to_string(action)) + " on " + target + " by " + caller.login);
    if (d.audited)
        store_->audit(caller.login, std::string(to_string(action)), target, d.rule);
}

Relation SurveyService::questionnaire_relation(const UserAccount& caller, const std::string& id) const {
    auto it = state_->drafts.find(id);
    if (it == state_->drafts.end())
        throw Error(ErrorCode::NotFound, "unknown questionnaire " + id);
    if (caller.role == Role::Respondent)
        return Relation::Other;
    return it->second.owner == caller.id ? Relation::Own : Relation::Other;
}

Relation SurveyService::wave_relation(const UserAccount& caller, const std::string& wave_id,
                                      const std::string& respondent_id) const {
    const auto& w = state_->wave(wave_id);
    if (caller.role == Role::Respondent) {
        if (respondent_id.empty() || respondent_id != caller.respondent_id || !in_roster(w.wave, respondent_id))
            return Relation::Other;
        return Relation::Own;
    }
    return w.owner == caller.id ? Relation::Own : Relation::Other;
}

void SurveyService::persist_pseudonyms() {
    auto& s = *state_;
    for (const auto& [key, token] : s.pseudonyms.entries()) {
        if (s.persisted_tokens.count(key))
            continue;
        const std::string kind(PseudonymMap::to_string(key.first));
        store_->put(kPseudonym, kind + ":" + key.second,
                    Json{{"kind", kind}, {"value", key.second}, {"token", token}}.dump());
        s.persisted_tokens.insert(key);
    }
}

// ------------------------------------------------------------------ accounts

bool SurveyService::has_accounts() const {
    std::lock_guard lock(mutex_);
    return !state_->accounts.empty();
}

UserAccount SurveyService::bootstrap_admin(const std::string& login, const std::string& password) {
    std::lock_guard lock(mutex_);
    if (!state_->accounts.empty())
        throw Error(ErrorCode::InvalidArgument, "accounts already exist");
    UserAccount system{"", "system", "", Role::SuperAdmin, "", ""};
    return create_user(system, login, password, Role::SuperAdmin);
}

UserAccount SurveyService::create_user(const UserAccount& caller, const std::string& login,
                                       const std::string& password, Role role, const std::string& respondent_id) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    require(caller, Action::UserCreate, Relation::None, "user " + login);
    if (login.empty() || password.empty())
        throw Error(ErrorCode::InvalidArgument, "login and password are required");
    if (s.logins.count(login))
        throw Error(ErrorCode::InvalidArgument, "login " + login + " is taken");
    if (role == Role::Respondent) {
        if (respondent_id.empty())
            throw Error(ErrorCode::InvalidArgument, "respondent accounts need a respondent id");
        for (const auto& [id, a] : s.accounts)
            if (a.role == Role::Respondent && a.respondent_id == respondent_id)
                throw Error(ErrorCode::InvalidArgument, "respondent " + respondent_id + " already has an account");
    }
    UserAccount account{padded("U", s.next()), login, hash_password(password), role,
                        role == Role::Respondent ? respondent_id : "", caller.id};
    Store::Transaction tx(*store_);
    store_->put(kAccount, account.id, account_json(account).dump());
    store_->put(kCounter, "ids", std::to_string(s.counter));
    store_->audit(caller.login, "user.create", account.login, std::string(to_string(role)));
    tx.commit();
    s.accounts[account.id] = account;
    s.logins[login] = account.id;
    return account;
}

std::string SurveyService::login(const std::string& login, const std::string& password) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    auto it = s.logins.find(login);
    if (it == s.logins.end() || !verify_password(password, s.accounts.at(it->second).credential))
        throw Error(ErrorCode::Unauthenticated, "bad login or password");
    std::string token = random_token();
    s.sessions[token] = it->second;
    return token;
}

UserAccount SurveyService::session(const std::string& token) const {
    std::lock_guard lock(mutex_);
    auto it = state_->sessions.find(token);
    if (it == state_->sessions.end())
        throw Error(ErrorCode::Unauthenticated, "unknown or expired session");
    return state_->accounts.at(it->second);
}

// ------------------------------------------------------------------ instruments

std::vector<Instrument> SurveyService::instruments(const UserAccount& caller) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::InstrumentRead, Relation::None, "instrument catalog");
    std::vector<Instrument> out;
    for (const auto* inst : state_->library.list())
        out.push_back(*inst);
    return out;
}

std::string SurveyService::register_instrument(const UserAccount& caller, Instrument instrument) {
    std::lock_guard lock(mutex_);
    require(caller, Action::InstrumentRegister, Relation::None, "instrument " + instrument.id);
    InstrumentLibrary trial = state_->library;
    const std::string id = trial.register_instrument(instrument, caller.role);
    Store::Transaction tx(*store_);
    store_->put(kInstrument, id, Json(instrument).dump());
    store_->audit(caller.login, "instrument.register", id, "");
    tx.commit();
    state_->library = std::move(trial);
    return id;
}

// ------------------------------------------------------------------ questionnaires

QuestionnaireInfo SurveyService::save_questionnaire(const UserAccount& caller, const DefinitionDocument& doc) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    const std::string& id = doc.questionnaire.id;
    if (id.empty())
        throw Error(ErrorCode::InvalidArgument, "questionnaire id is required");
    const bool exists = s.drafts.count(id) > 0;
    if (exists)
        require(caller, Action::QuestionnaireUpdate, questionnaire_relation(caller, id), "questionnaire " + id);
    else
        require(caller, Action::QuestionnaireCreate, Relation::None, "questionnaire " + id);
    if (!doc.elements.instruments.empty())
        throw Error(ErrorCode::InvalidArgument, "instruments are added through the instrument catalog");
    QuestionnaireInfo info = exists ? s.drafts.at(id) : QuestionnaireInfo{{}, caller.id, 0};
    info.draft = doc;
    info.draft.questionnaire.version = 0;
    Store::Transaction tx(*store_);
    store_->put(kQuestionnaire, id,
                Json{{"document", Json::parse(write_definition_document(info.draft))}, {"owner", info.owner}}.dump());
    tx.commit();
    s.drafts[id] = info;
    return info;
}

QuestionnaireInfo SurveyService::questionnaire(const UserAccount& caller, const std::string& id) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::QuestionnaireRead, questionnaire_relation(caller, id), "questionnaire " + id);
    return state_->drafts.at(id);
}

std::vector<QuestionnaireInfo> SurveyService::questionnaires(const UserAccount& caller) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::QuestionnaireRead, Relation::None, "questionnaire list");
    std::vector<QuestionnaireInfo> out;
    for (const auto& [id, info] : state_->drafts)
        if (caller.role == Role::SuperAdmin || info.owner == caller.id)
            out.push_back(info);
    return out;
}

std::int64_t SurveyService::publish(const UserAccount& caller, const std::string& id) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    require(caller, Action::QuestionnairePublish, questionnaire_relation(caller, id), "questionnaire " + id);
    auto& info = s.drafts.at(id);
    QuestionnaireRegistry trial = s.registry;
    const std::int64_t version = trial.publish(info.draft.questionnaire, s.catalog_for(info.draft));
    Store::Transaction tx(*store_);
    store_->put(kPublished, published_key(id, version), Json(*trial.find(id, version)).dump());
    store_->audit(caller.login, "questionnaire.publish", id, "version " + std::to_string(version));
    tx.commit();
    s.registry = std::move(trial);
    info.latest_version = version;
    return version;
}

PublishedQuestionnaire SurveyService::published(const UserAccount& caller, const std::string& id,
                                                std::int64_t version) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::QuestionnaireRead, questionnaire_relation(caller, id), "questionnaire " + id);
    if (version == 0)
        version = state_->registry.latest_version(id);
    const auto* p = state_->registry.find(id, version);
    if (p == nullptr)
        throw Error(ErrorCode::NotPublished, "questionnaire " + id + " has no version " + std::to_string(version));
    return *p;
}

// ------------------------------------------------------------------ groups

RespondentGroup SurveyService::save_group(const UserAccount& caller, const RespondentGroup& group,
                                          const std::vector<Respondent>& respondents) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    if (group.id.empty())
        throw Error(ErrorCode::InvalidArgument, "group id is required");
    Relation relation = Relation::None;
    if (auto it = s.groups.find(group.id); it != s.groups.end())
        relation = it->second.second == caller.id ? Relation::Own : Relation::Other;
    if (caller.role == Role::Respondent)
        relation = Relation::Other;
    require(caller, Action::GroupWrite, relation, "group " + group.id);
    for (const auto& r : respondents)
        if (auto it = s.respondents.find(r.id); it != s.respondents.end() && it->second.second != caller.id &&
                                                caller.role != Role::SuperAdmin)
            throw AccessDenied("I2-other-interviewers-hidden", "respondent " + r.id);
    std::set<std::string> known;
    for (const auto& r : respondents)
        known.insert(r.id);
    for (const auto& m : group.members)
        if (!known.count(m) && !s.respondents.count(m))
            throw Error(ErrorCode::NotFound, "group member " + m + " is not a known respondent");
    const std::string owner = relation == Relation::None ? caller.id : s.groups.at(group.id).second;
    Store::Transaction tx(*store_);
    for (const auto& r : respondents) {
        const std::string r_owner = s.respondents.count(r.id) ? s.respondents.at(r.id).second : caller.id;
        store_->put(kRespondent, r.id, Json{{"respondent", r}, {"owner", r_owner}}.dump());
    }
    store_->put(kGroup, group.id, Json{{"group", group}, {"owner", owner}}.dump());
    tx.commit();
    for (const auto& r : respondents) {
        const std::string r_owner = s.respondents.count(r.id) ? s.respondents.at(r.id).second : caller.id;
        s.respondents[r.id] = {r, r_owner};
    }
    s.groups[group.id] = {group, owner};
    return group;
}

// ------------------------------------------------------------------ waves

Wave SurveyService::open_wave(const UserAccount& caller, const std::string& questionnaire_id,
                              const std::string& group_id, const std::string& label, std::int64_t timestamp,
                              std::int64_t version, const std::string& wave_id) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    require(caller, Action::WaveOpen, questionnaire_relation(caller, questionnaire_id),
            "questionnaire " + questionnaire_id);
    auto g = s.groups.find(group_id);
    if (g == s.groups.end())
        throw Error(ErrorCode::NotFound, "unknown group " + group_id);
    if (caller.role != Role::SuperAdmin && g->second.second != caller.id)
        throw AccessDenied("I2-other-interviewers-hidden", "group " + group_id);
    if (version == 0)
        version = s.registry.latest_version(questionnaire_id);
    const auto* published = s.registry.find(questionnaire_id, version);
    if (published == nullptr)
        throw Error(ErrorCode::NotPublished, "questionnaire " + questionnaire_id + " is not published");
    std::string id = wave_id;
    const auto saved_counter = s.counter;
    if (id.empty())
        do
            id = padded("W", s.next());
        while (s.waves.count(id));
    else if (s.waves.count(id)) {
        throw Error(ErrorCode::InvalidArgument, "wave " + id + " already exists");
    }
    std::map<std::string, std::string> names;
    for (const auto& m : g->second.first.members)
        if (auto r = s.respondents.find(m); r != s.respondents.end() && !r->second.first.display_name.empty())
            names[m] = r->second.first.display_name;
    OpenedWave opened;
    try {
        opened = surveynet::open_wave(*published, g->second.first, id, label, timestamp, names);
    } catch (...) {
        s.counter = saved_counter;
        throw;
    }
    WaveState w{opened.wave, opened.instances, {}, {}, s.drafts.at(questionnaire_id).owner};
    Store::Transaction tx(*store_);
    store_->put(kWave, id, Json{{"wave", w.wave}, {"instances", w.instances}, {"owner", w.owner}}.dump());
    store_->put(kCounter, "ids", std::to_string(s.counter));
    store_->audit(caller.login, "wave.open", id, questionnaire_id + " v" + std::to_string(version));
    tx.commit();
    s.waves[id] = std::move(w);
    return opened.wave;
}

Wave SurveyService::close_wave(const UserAccount& caller, const std::string& wave_id) {
    std::lock_guard lock(mutex_);
    require(caller, Action::WaveManage, wave_relation(caller, wave_id, {}), "wave " + wave_id);
    auto& w = state_->wave(wave_id);
    Wave closed = w.wave;
    closed.closed = true;
    Store::Transaction tx(*store_);
    store_->put(kWave, wave_id, Json{{"wave", closed}, {"instances", w.instances}, {"owner", w.owner}}.dump());
    store_->audit(caller.login, "wave.close", wave_id, "");
    tx.commit();
    w.wave = closed;
    return closed;
}

Wave SurveyService::edit_roster(const UserAccount& caller, const std::string& wave_id, const RosterEdit& edit) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    require(caller, Action::WaveManage, wave_relation(caller, wave_id, {}), "wave " + wave_id);
    auto& w = s.wave(wave_id);
    if (w.wave.closed)
        throw Error(ErrorCode::WaveClosed, "wave " + wave_id + " is closed; the roster is frozen");
    WaveState next = w;
    std::vector<ResponseSet> retired;
    const auto& published = s.published_of(w.wave);
    for (auto& inst : next.instances) {
        const auto& tmpl = published.elements.templates.at(inst.template_id);
        auto result = apply_roster_edit(tmpl, inst, next.responses, edit, false);
        inst = std::move(result.instance);
        next.responses = std::move(result.responses);
        for (auto& r : result.retired)
            retired.push_back(std::move(r));
    }
    const bool present = in_roster(next.wave, edit.respondent_id);
    switch (edit.kind) {
    case RosterEdit::Kind::Add:
        if (present)
            throw Error(ErrorCode::InvalidArgument, edit.respondent_id + " is already in the roster");
        next.wave.roster.push_back(edit.respondent_id);
        break;
    case RosterEdit::Kind::Remove:
        if (!present)
            throw Error(ErrorCode::NotInRoster, edit.respondent_id + " is not in the roster");
        std::erase(next.wave.roster, edit.respondent_id);
        if (auto it = next.responses.find(edit.respondent_id); it != next.responses.end()) {
            retired.push_back(it->second);
            next.responses.erase(it);
        }
        next.scores.erase(edit.respondent_id);
        break;
    case RosterEdit::Kind::Rename:
        if (!present)
            throw Error(ErrorCode::NotInRoster, edit.respondent_id + " is not in the roster");
        break;
    }
    std::optional<Respondent> respondent;
    if (edit.kind != RosterEdit::Kind::Remove) {
        auto r = s.respondents.find(edit.respondent_id);
        respondent = r == s.respondents.end() ? Respondent{edit.respondent_id, edit.respondent_id, {}} : r->second.first;
        if (!edit.display_name.empty())
            respondent->display_name = edit.display_name;
    }
    Store::Transaction tx(*store_);
    store_->put(kWave, wave_id, Json{{"wave", next.wave}, {"instances", next.instances}, {"owner", next.owner}}.dump());
    for (const auto& [id, r] : next.responses)
        if (!(w.responses.count(id) && w.responses.at(id) == r))
            store_->put(kResponse, response_key(wave_id, id), Json(r).dump());
    for (const auto& r : retired) {
        store_->put(kRetired, response_key(wave_id, r.respondent_id), Json(r).dump());
        store_->remove(kResponse, response_key(wave_id, r.respondent_id));
        store_->remove(kScore, response_key(wave_id, r.respondent_id));
    }
    if (respondent) {
        const std::string owner = s.respondents.count(respondent->id) ? s.respondents.at(respondent->id).second : caller.id;
        store_->put(kRespondent, respondent->id, Json{{"respondent", *respondent}, {"owner", owner}}.dump());
    }
    const char* kind = edit.kind == RosterEdit::Kind::Add ? "add" : edit.kind == RosterEdit::Kind::Remove ? "remove" : "rename";
    store_->audit(caller.login, std::string("wave.roster.") + kind, wave_id, edit.respondent_id);
    tx.commit();
    if (respondent) {
        const std::string owner = s.respondents.count(respondent->id) ? s.respondents.at(respondent->id).second : caller.id;
        s.respondents[respondent->id] = {*respondent, owner};
    }
    w = std::move(next);
    return w.wave;
}

Json SurveyService::wave_form(const UserAccount& caller, const std::string& wave_id,
                              const std::string& respondent_id) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::WaveForm, wave_relation(caller, wave_id, respondent_id), "wave " + wave_id);
    const auto& w = state_->wave(wave_id);
    const auto& published = state_->published_of(w.wave);
    Json items = Json::array();
    for (const auto& item : questionnaire_items(published))
        items.push_back(Json{{"id", item.instance_id}, {"question", item.question}, {"source", item.source}});
    Json alters = Json::array();
    for (const auto& inst : w.instances) {
        const auto& tmpl = published.elements.templates.at(inst.template_id);
        auto it = inst.items.find(respondent_id);
        if (it == inst.items.end())
            continue;
        for (const auto& a : it->second)
            alters.push_back(Json{{"id", a.instance_id},
                                  {"template", tmpl.id},
                                  {"alter", a.alter_id},
                                  {"prompt", render_prompt(tmpl, inst, a.alter_id)},
                                  {"options", tmpl.tie_scale}});
    }
    Json answers = Json::object();
    if (auto r = w.responses.find(respondent_id); r != w.responses.end())
        answers = r->second.answers;
    return Json{{"wave", w.wave}, {"title", published.def.title}, {"items", items}, {"relational", alters},
                {"answers", answers}};
}

std::vector<WaveTab> SurveyService::wave_tabs(const UserAccount& caller, const std::string& questionnaire_id,
                                              const std::string& group_id) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::QuestionnaireRead, questionnaire_relation(caller, questionnaire_id),
            "questionnaire " + questionnaire_id);
    std::vector<WaveTab> out;
    for (const auto& [id, w] : state_->waves) {
        if (w.wave.questionnaire_id != questionnaire_id || (!group_id.empty() && w.wave.group_id != group_id))
            continue;
        WaveTab tab{w.wave, 0, std::nullopt};
        Rational total = 0;
        std::size_t scored = 0;
        for (const auto& [rid, r] : w.responses)
            if (r.status == CompletionStatus::Submitted)
                ++tab.submitted;
        for (const auto& [rid, sr] : w.scores)
            if (const auto* e = sr.find(audit_scale_name())) {
                total += e->score;
                ++scored;
            }
        if (scored)
            tab.mean_audit = total / Rational(static_cast<long long>(scored));
        out.push_back(std::move(tab));
    }
    std::sort(out.begin(), out.end(), [](const WaveTab& a, const WaveTab& b) {
        return std::tie(a.wave.timestamp, a.wave.id) < std::tie(b.wave.timestamp, b.wave.id);
    });
    return out;
}

// ------------------------------------------------------------------ responses

SubmitResult SurveyService::submit_response(const UserAccount& caller, const std::string& wave_id,
                                            const std::string& respondent_id,
                                            const std::map<std::string, Answer>& answers, CompletionStatus status) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    auto& w = s.wave(wave_id);
    require(caller, Action::ResponseSubmit, wave_relation(caller, wave_id, respondent_id),
            "response " + response_key(wave_id, respondent_id));
    if (w.wave.closed)
        throw Error(ErrorCode::WaveClosed, "wave " + wave_id + " is closed");
    if (!in_roster(w.wave, respondent_id))
        throw AccessDenied("W1-not-in-roster", "respondent " + respondent_id + " in wave " + wave_id);

    const auto& published = s.published_of(w.wave);
    std::map<std::string, const Question*> questions;
    const auto items = questionnaire_items(published);
    for (const auto& item : items)
        questions[item.instance_id] = &item.question;
    std::map<std::string, const RelationalTemplate*> alter_items;
    for (const auto& inst : w.instances)
        if (auto it = inst.items.find(respondent_id); it != inst.items.end())
            for (const auto& a : it->second)
                alter_items[a.instance_id] = &published.elements.templates.at(inst.template_id);

    for (const auto& [id, answer] : answers) {
        if (auto q = questions.find(id); q != questions.end()) {
            const Question& question = *q->second;
            const auto* selected = answer.selected();
            bool ok = false;
            switch (question.kind) {
            case QuestionKind::SingleChoice:
                ok = selected && selected->size() == 1 && selected->front() < question.options.size();
                break;
            case QuestionKind::MultiChoice:
                ok = selected && std::all_of(selected->begin(), selected->end(),
                                             [&](std::size_t i) { return i < question.options.size(); });
                break;
            case QuestionKind::Numeric:
                ok = answer.number() != nullptr;
                break;
            case QuestionKind::FreeText:
                ok = answer.free_text() != nullptr;
                break;
            case QuestionKind::RelationalTemplate:
                break;
            }
            if (!ok)
                throw Error(ErrorCode::InvalidArgument, "answer to " + id + " does not fit the question");
        } else if (auto t = alter_items.find(id); t != alter_items.end()) {
            const auto* selected = answer.selected();
            if (!selected || selected->size() != 1 || selected->front() >= t->second->tie_scale.size())
                throw Error(ErrorCode::InvalidArgument, "answer to " + id + " must pick one tie option");
        } else {
            throw Error(ErrorCode::UnknownItem, "item " + id + " is not part of this form");
        }
    }
    if (status == CompletionStatus::Submitted) {
        std::vector<std::string> missing;
        for (const auto& item : items)
            if (item.question.required && !answers.count(item.instance_id))
                missing.push_back(item.instance_id);
        if (!missing.empty())
            throw MissingRequired(std::move(missing));
    }

    SubmitResult result;
    result.response = ResponseSet{wave_id, respondent_id, answers, status};
    auto existing = w.responses.find(respondent_id);
    if (existing != w.responses.end() && existing->second.status == CompletionStatus::Submitted) {
        if (!options_.allow_resubmission)
            throw Error(ErrorCode::InvalidArgument, "response already submitted");
        if (status == CompletionStatus::Partial)
            throw Error(ErrorCode::InvalidArgument, "a submitted response cannot go back to partial");
        result.overwritten = true;
    }
    if (status == CompletionStatus::Submitted)
        result.scores = score_response(published, result.response);

    const std::string key = response_key(wave_id, respondent_id);
    Store::Transaction tx(*store_);
    store_->put(kResponse, key, Json(result.response).dump());
    if (result.scores)
        store_->put(kScore, key, Json(*result.scores).dump());
    if (result.overwritten)
        store_->audit(caller.login, "response.overwrite", key, Json(existing->second).dump());
    else
        store_->audit(caller.login, "response.save", key, std::string(to_string(status)));
    tx.commit();
    w.responses[respondent_id] = result.response;
    if (result.scores)
        w.scores[respondent_id] = *result.scores;
    return result;
}

std::vector<ResponseSet> SurveyService::responses(const UserAccount& caller, const std::string& wave_id,
                                                  const std::string& respondent_id) {
    std::lock_guard lock(mutex_);
    const std::string target = respondent_id.empty() ? "wave " + wave_id : response_key(wave_id, respondent_id);
    require(caller, Action::ResponseRead, wave_relation(caller, wave_id, respondent_id), target);
    const auto& w = state_->wave(wave_id);
    std::vector<ResponseSet> out;
    for (const auto& id : w.wave.roster)
        if (respondent_id.empty() || id == respondent_id)
            if (auto it = w.responses.find(id); it != w.responses.end())
                out.push_back(it->second);
    return out;
}

std::vector<ScoreReport> SurveyService::scores(const UserAccount& caller, const std::string& wave_id,
                                               const std::string& respondent_id) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::ScoresRead, wave_relation(caller, wave_id, respondent_id), "scores of " + wave_id);
    const auto& w = state_->wave(wave_id);
    std::vector<ScoreReport> out;
    for (const auto& id : w.wave.roster)
        if (respondent_id.empty() || id == respondent_id)
            if (auto it = w.scores.find(id); it != w.scores.end())
                out.push_back(it->second);
    return out;
}

// ------------------------------------------------------------------ analysis and exports

WaveSnapshot SurveyService::snapshot(const std::string& wave_id) const {
    const auto& s = *state_;
    const auto& w = s.wave(wave_id);
    WaveSnapshot snap;
    snap.wave = w.wave;
    snap.published = s.published_of(w.wave);
    snap.instances = w.instances;
    snap.responses = w.responses;
    snap.scores = w.scores;
    for (const auto& id : w.wave.roster)
        if (auto r = s.respondents.find(id); r != s.respondents.end())
            snap.respondents[id] = r->second.first;
    return snap;
}

namespace {

/// Assigns every token an export of `snap` can need, so exports can run on a copy of the map.
void assign_tokens(const WaveSnapshot& snap, PseudonymMap& pseudonyms) {
    for (const auto& id : snap.wave.roster)
        pseudonyms.token(Kind::Respondent, id);
    std::map<std::string, const Question*> flagged;
    for (const auto& item : questionnaire_items(snap.published))
        if (item.question.anonymize)
            flagged[item.instance_id] = &item.question;
    for (const auto& [rid, r] : snap.responses)
        for (const auto& [item, answer] : r.answers)
            if (auto q = flagged.find(item); q != flagged.end())
                pseudonyms.token(Kind::Field, cell_text(*q->second, answer));
}

} // namespace

Json SurveyService::network(const UserAccount& caller, const std::string& wave_id, const std::string& relation,
                            std::stop_token stop) {
    WaveSnapshot snap;
    std::optional<PseudonymMap> tokens;
    {
        std::lock_guard lock(mutex_);
        require(caller, Action::AnalysisRead, wave_relation(caller, wave_id, {}), "network of " + wave_id);
        snap = snapshot(wave_id);
        assign_tokens(snap, state_->pseudonyms);
        persist_pseudonyms();
        tokens = state_->pseudonyms;
    }
    const auto view = analyse_network(snap, relation, stop);
    return network_document(snap, view, *tokens);
}

std::string SurveyService::respondent_report(const UserAccount& caller, const std::string& respondent_id,
                                             const std::string& wave_id, const std::string& format,
                                             const std::string& relation, std::stop_token stop) {
    const ReportFormat fmt = report_format_from_string(format);
    WaveSnapshot snap;
    std::optional<PseudonymMap> tokens;
    {
        std::lock_guard lock(mutex_);
        require(caller, Action::AnalysisRead, wave_relation(caller, wave_id, {}), "report of " + respondent_id);
        snap = snapshot(wave_id);
        if (!in_roster(snap.wave, respondent_id))
            throw Error(ErrorCode::NotFound, respondent_id + " is not in wave " + wave_id);
        assign_tokens(snap, state_->pseudonyms);
        persist_pseudonyms();
        tokens = state_->pseudonyms;
    }
    const auto view = analyse_network(snap, relation, stop);
    return render_report(pseudonymous_report(snap, view, respondent_id, *tokens), fmt);
}

std::string SurveyService::group_report(const UserAccount& caller, const std::string& wave_id,
                                        const std::string& format, const std::string& relation,
                                        std::stop_token stop) {
    const ReportFormat fmt = report_format_from_string(format);
    WaveSnapshot snap;
    {
        std::lock_guard lock(mutex_);
        require(caller, Action::AnalysisRead, wave_relation(caller, wave_id, {}), "group report of " + wave_id);
        snap = snapshot(wave_id);
    }
    const auto view = analyse_network(snap, relation, stop);
    const auto report = wave_group_report(snap, view);
    if (!report)
        throw Error(ErrorCode::InsufficientData, "a group report needs at least two submitted responses");
    return render_report(*report, fmt);
}

Json SurveyService::churn(const UserAccount& caller, const std::string& before_wave, const std::string& after_wave,
                          const std::string& relation) {
    WaveSnapshot a, b;
    std::optional<PseudonymMap> tokens;
    {
        std::lock_guard lock(mutex_);
        require(caller, Action::AnalysisRead, wave_relation(caller, before_wave, {}), "wave " + before_wave);
        require(caller, Action::AnalysisRead, wave_relation(caller, after_wave, {}), "wave " + after_wave);
        a = snapshot(before_wave);
        b = snapshot(after_wave);
        assign_tokens(a, state_->pseudonyms);
        assign_tokens(b, state_->pseudonyms);
        persist_pseudonyms();
        tokens = state_->pseudonyms;
    }
    auto rel = relation;
    if (rel.empty()) {
        const auto relations = wave_relations(a);
        if (relations.empty())
            throw Error(ErrorCode::NoData, "wave " + before_wave + " has no relational items");
        rel = relations.front();
    }
    auto edges_of = [&](const WaveSnapshot& snap) {
        const auto view = analyse_network(snap, rel);
        return view.edges;
    };
    auto report = wave_churn(edges_of(a), edges_of(b));
    auto rename = [&](std::vector<std::pair<std::string, std::string>>& pairs) {
        for (auto& [x, y] : pairs) {
            x = *tokens->find(Kind::Respondent, x);
            if (const auto* t = tokens->find(Kind::Respondent, y))
                y = *t;
        }
    };
    rename(report.added);
    rename(report.removed);
    return Json{{"before", before_wave}, {"after", after_wave}, {"relation", rel}, {"churn", report}};
}

std::string SurveyService::export_wave(const UserAccount& caller, const std::string& wave_id,
                                       const std::string& format, const std::string& relation, std::stop_token stop) {
    const Artifact artifact = artifact_from_string(format);
    WaveSnapshot snap;
    std::optional<PseudonymMap> tokens;
    {
        std::lock_guard lock(mutex_);
        require(caller, Action::Export, wave_relation(caller, wave_id, {}), "wave " + wave_id);
        snap = snapshot(wave_id);
        assign_tokens(snap, state_->pseudonyms);
        persist_pseudonyms();
        tokens = state_->pseudonyms;
    }
    return export_artifact(snap, artifact, *tokens, relation, stop);
}

ImportSummary SurveyService::import_csv(const UserAccount& caller, const std::string& csv_text,
                                        const ImportMapping& mapping) {
    std::lock_guard lock(mutex_);
    auto& s = *state_;
    require(caller, Action::ImportCsv, questionnaire_relation(caller, mapping.questionnaire_id),
            "questionnaire " + mapping.questionnaire_id);
    if (mapping.group_id.empty())
        throw Error(ErrorCode::InvalidArgument, "the mapping needs a group id");
    const std::int64_t version =
        mapping.version ? mapping.version : s.registry.latest_version(mapping.questionnaire_id);
    const auto* published = s.registry.find(mapping.questionnaire_id, version);
    if (published == nullptr)
        throw Error(ErrorCode::NotPublished, "questionnaire " + mapping.questionnaire_id + " is not published");
    if (auto g = s.groups.find(mapping.group_id);
        g != s.groups.end() && g->second.second != caller.id && caller.role != Role::SuperAdmin)
        throw AccessDenied("I2-other-interviewers-hidden", "group " + mapping.group_id);

    ImportPlan plan = plan_import(*published, csv_text, mapping);
    for (const auto& r : plan.respondents)
        if (auto it = s.respondents.find(r.id);
            it != s.respondents.end() && it->second.second != caller.id && caller.role != Role::SuperAdmin)
            plan.row_errors.push_back({plan.lines.at(r.id), "respondent " + r.id + " belongs to another interviewer"});

    // Scores are computed before anything is stored; a scoring failure is a row error.
    std::map<std::string, ScoreReport> scored;
    for (auto& [id, response] : plan.responses) {
        if (response.status != CompletionStatus::Submitted)
            continue;
        try {
            scored[id] = score_response(*published, response);
        } catch (const Error& e) {
            plan.row_errors.push_back({plan.lines.at(id), e.what()});
        }
    }
    std::sort(plan.row_errors.begin(), plan.row_errors.end(),
              [](const RowError& a, const RowError& b) { return a.line < b.line; });
    if (mapping.strict && !plan.row_errors.empty())
        throw ImportRejected(plan.row_errors);
    std::set<std::string> rejected;
    for (const auto& e : plan.row_errors)
        for (const auto& [id, line] : plan.lines)
            if (line == e.line)
                rejected.insert(id);
    std::erase_if(plan.respondents, [&](const Respondent& r) { return rejected.count(r.id) > 0; });
    if (plan.respondents.empty())
        throw ImportRejected(plan.row_errors.empty() ? std::vector<RowError>{{1, "no data rows"}} : plan.row_errors);

    RespondentGroup group{mapping.group_id, mapping.group_name.empty() ? mapping.group_id : mapping.group_name, {}};
    std::map<std::string, std::string> names;
    for (const auto& r : plan.respondents) {
        group.members.push_back(r.id);
        names[r.id] = r.display_name;
    }
    std::string wave_id = mapping.wave_id;
    const auto saved_counter = s.counter;
    if (wave_id.empty())
        do
            wave_id = padded("W", s.next());
        while (s.waves.count(wave_id));
    else if (s.waves.count(wave_id))
        throw Error(ErrorCode::InvalidArgument, "wave " + wave_id + " already exists");

    OpenedWave opened;
    try {
        opened = surveynet::open_wave(*published, group, wave_id, mapping.wave_label, mapping.timestamp, names);
    } catch (...) {
        s.counter = saved_counter;
        throw;
    }
    WaveState w{opened.wave, opened.instances, {}, {}, s.drafts.at(mapping.questionnaire_id).owner};
    ImportSummary summary;
    summary.wave_id = wave_id;
    summary.cells_skipped = plan.cells_skipped;
    summary.skipped_columns = plan.skipped_columns;
    summary.row_errors = plan.row_errors;
    for (const auto& r : plan.respondents) {
        ResponseSet response = plan.responses.at(r.id);
        response.wave_id = wave_id;
        w.responses[r.id] = response;
        if (auto sc = scored.find(r.id); sc != scored.end()) {
            sc->second.wave_id = wave_id;
            w.scores[r.id] = sc->second;
        }
        if (response.status == CompletionStatus::Partial)
            summary.incomplete.push_back(r.id);
        if (!s.respondents.count(r.id))
            ++summary.respondents_created;
    }
    summary.rows_imported = plan.respondents.size();
    summary.scored = w.scores.size();

    const std::string group_owner = s.groups.count(group.id) ? s.groups.at(group.id).second : caller.id;
    try {
        Store::Transaction tx(*store_);
        for (const auto& r : plan.respondents) {
            const std::string owner = s.respondents.count(r.id) ? s.respondents.at(r.id).second : caller.id;
            store_->put(kRespondent, r.id, Json{{"respondent", r}, {"owner", owner}}.dump());
        }
        store_->put(kGroup, group.id, Json{{"group", group}, {"owner", group_owner}}.dump());
        store_->put(kWave, wave_id, Json{{"wave", w.wave}, {"instances", w.instances}, {"owner", w.owner}}.dump());
        for (const auto& [id, r] : w.responses)
            store_->put(kResponse, response_key(wave_id, id), Json(r).dump());
        for (const auto& [id, sc] : w.scores)
            store_->put(kScore, response_key(wave_id, id), Json(sc).dump());
        store_->put(kCounter, "ids", std::to_string(s.counter));
        store_->audit(caller.login, "import.csv", wave_id,
                      std::to_string(summary.rows_imported) + " rows, " + std::to_string(summary.row_errors.size()) +
                          " row errors");
        tx.commit();
    } catch (...) {
        s.counter = saved_counter;
        throw;
    }
    for (const auto& r : plan.respondents) {
        const std::string owner = s.respondents.count(r.id) ? s.respondents.at(r.id).second : caller.id;
        s.respondents[r.id] = {r, owner};
    }
    s.groups[group.id] = {group, group_owner};
    s.waves[wave_id] = std::move(w);
    return summary;
}

std::map<std::string, std::string> SurveyService::pseudonym_map(const UserAccount& caller) {
    std::lock_guard lock(mutex_);
    require(caller, Action::PseudonymMapRead, Relation::None, "pseudonym map");
    std::map<std::string, std::string> out;
    for (const auto& [key, token] : state_->pseudonyms.entries())
        out[std::string(PseudonymMap::to_string(key.first)) + ":" + key.second] = token;
    return out;
}

std::vector<AuditEntry> SurveyService::audit_log(const UserAccount& caller) const {
    std::lock_guard lock(mutex_);
    require(caller, Action::AuditLogRead, Relation::None, "audit log");
    return store_->audit_log();
}

std::string SurveyService::respondent_token(const std::string& respondent_id) {
    std::lock_guard lock(mutex_);
    std::string token = state_->pseudonyms.token(Kind::Respondent, respondent_id);
    persist_pseudonyms();
    return token;
}

} // namespace surveynet::service
