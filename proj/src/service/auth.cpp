#include <surveynet/service/auth.hpp>

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <stdexcept>

#include <surveynet/error.hpp>

namespace surveynet::service {

namespace {

constexpr int kIterations = 60000;

std::string hex(const unsigned char* data, std::size_t size) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(size * 2);
    for (std::size_t i = 0; i < size; ++i) {
        out += digits[data[i] >> 4];
        out += digits[data[i] & 0xf];
    }
    return out;
}

std::string pbkdf2(const std::string& password, const std::string& salt, int iterations) {
    unsigned char out[32];
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                          reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                          iterations, EVP_sha256(), sizeof out, out) != 1)
        throw Error(ErrorCode::Storage, "PBKDF2 failed");
    return hex(out, sizeof out);
}

Decision allow(std::string rule, bool audited = false) { return {true, std::move(rule), audited}; }
Decision deny(std::string rule) { return {false, std::move(rule), false}; }

} // namespace

std::string_view to_string(Action action) {
    switch (action) {
    case Action::InstrumentRead: return "instrument.read";
    case Action::InstrumentRegister: return "instrument.register";
    case Action::QuestionnaireCreate: return "questionnaire.create";
    case Action::QuestionnaireRead: return "questionnaire.read";
    case Action::QuestionnaireUpdate: return "questionnaire.update";
    case Action::QuestionnairePublish: return "questionnaire.publish";
    case Action::GroupWrite: return "group.write";
    case Action::WaveOpen: return "wave.open";
    case Action::WaveManage: return "wave.manage";
    case Action::WaveForm: return "wave.form";
    case Action::ResponseSubmit: return "response.submit";
    case Action::ResponseRead: return "response.read";
    case Action::ScoresRead: return "scores.read";
    case Action::AnalysisRead: return "analysis.read";
    case Action::Export: return "export";
    case Action::ImportCsv: return "import.csv";
    case Action::PseudonymMapRead: return "pseudonym-map.read";
    case Action::UserCreate: return "user.create";
    case Action::AuditLogRead: return "audit-log.read";
    }
    return "?";
}

std::vector<Action> all_actions() {
    return {Action::InstrumentRead,     Action::InstrumentRegister, Action::QuestionnaireCreate,
            Action::QuestionnaireRead,  Action::QuestionnaireUpdate, Action::QuestionnairePublish,
            Action::GroupWrite,         Action::WaveOpen,            Action::WaveManage,
            Action::WaveForm,           Action::ResponseSubmit,      Action::ResponseRead,
            Action::ScoresRead,         Action::AnalysisRead,        Action::Export,
            Action::ImportCsv,          Action::PseudonymMapRead,    Action::UserCreate,
            Action::AuditLogRead};
}

std::string_view to_string(Relation relation) {
    switch (relation) {
    case Relation::None: return "none";
    case Relation::Own: return "own";
    case Relation::Other: return "other";
    }
    return "?";
}

Decision authorize(Role role, Action action, Relation relation) {
    switch (role) {
    case Role::SuperAdmin:
        if (action == Action::ResponseRead || action == Action::PseudonymMapRead)
            return allow("A2-superadmin-raw-read-audited", true);
        return allow("A1-superadmin-full");

    case Role::Interviewer:
        switch (action) {
        case Action::InstrumentRead:
            return allow("I3-catalog-read-only");
        case Action::InstrumentRegister:
            return deny("I3-catalog-read-only");
        case Action::QuestionnaireCreate:
            return allow("I1-own-resources");
        case Action::QuestionnaireRead:
        case Action::QuestionnaireUpdate:
        case Action::QuestionnairePublish:
        case Action::GroupWrite:
        case Action::WaveOpen:
        case Action::WaveManage:
        case Action::WaveForm:
        case Action::ResponseSubmit:
        case Action::ResponseRead:
        case Action::ScoresRead:
        case Action::AnalysisRead:
        case Action::Export:
        case Action::ImportCsv:
            return relation == Relation::Other ? deny("I2-other-interviewers-hidden") : allow("I1-own-resources");
        case Action::PseudonymMapRead:
        case Action::UserCreate:
        case Action::AuditLogRead:
            return deny("S1-superadmin-only");
        }
        break;

    case Role::Respondent:
        switch (action) {
        case Action::WaveForm:
        case Action::ResponseSubmit:
        case Action::ResponseRead:
            return relation == Relation::Own ? allow("P1-respondent-own-data") : deny("P2-respondent-others-data");
        default:
            return deny("P3-respondent-fill-only");
        }
    }
    return deny("D0-default-deny");
}

std::string hash_password(const std::string& password) {
    unsigned char salt[16];
    if (RAND_bytes(salt, sizeof salt) != 1)
        throw Error(ErrorCode::Storage, "no randomness for the password salt");
    const std::string salt_hex = hex(salt, sizeof salt);
    return "pbkdf2-sha256$" + std::to_string(kIterations) + "$" + salt_hex + "$" +
           pbkdf2(password, salt_hex, kIterations);
}

bool verify_password(const std::string& password, const std::string& record) {
    const auto a = record.find('$');
    const auto b = record.find('$', a + 1);
    const auto c = record.find('$', b + 1);
    if (a == std::string::npos || b == std::string::npos || c == std::string::npos ||
        record.substr(0, a) != "pbkdf2-sha256")
        return false;
    int iterations = 0;
    try {
        iterations = std::stoi(record.substr(a + 1, b - a - 1));
    } catch (const std::exception&) {
        return false;
    }
    const std::string expected = record.substr(c + 1);
    const std::string actual = pbkdf2(password, record.substr(b + 1, c - b - 1), iterations);
    return expected.size() == actual.size() && CRYPTO_memcmp(expected.data(), actual.data(), actual.size()) == 0;
}

std::string random_token() {
    unsigned char bytes[32];
    if (RAND_bytes(bytes, sizeof bytes) != 1)
        throw Error(ErrorCode::Storage, "no randomness for a session token");
    return hex(bytes, sizeof bytes);
}

} // namespace surveynet::service
