#include <surveynet/service/pseudonym.hpp>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <surveynet/error.hpp>

namespace surveynet::service {

PseudonymMap::PseudonymMap(std::string study_key) : key_(std::move(study_key)) {
    if (key_.empty())
        throw Error(ErrorCode::InvalidArgument, "the study key must not be empty");
}

std::string PseudonymMap::keyed_token(const std::string& key, Kind kind, const std::string& value, unsigned salt) {
    std::string message = std::string(to_string(kind)) + ":" + value;
    if (salt > 0)
        message += "#" + std::to_string(salt);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             reinterpret_cast<const unsigned char*>(message.data()), message.size(), digest, &length) == nullptr)
        throw Error(ErrorCode::Storage, "HMAC failed");
    static const char* digits = "0123456789abcdef";
    std::string out = kind == Kind::Respondent ? "R-" : "A-";
    for (int i = 0; i < 4; ++i) {
        out += digits[digest[i] >> 4];
        out += digits[digest[i] & 0xf];
    }
    return out;
}

const std::string& PseudonymMap::token(Kind kind, const std::string& value) {
    if (auto it = forward_.find({kind, value}); it != forward_.end())
        return it->second;
    for (unsigned salt = 0;; ++salt) {
        std::string candidate = keyed_token(key_, kind, value, salt);
        if (reverse_.emplace(std::pair{kind, candidate}, value).second)
            return forward_.emplace(std::pair{kind, value}, std::move(candidate)).first->second;
    }
}

const std::string* PseudonymMap::find(Kind kind, const std::string& value) const {
    auto it = forward_.find({kind, value});
    return it == forward_.end() ? nullptr : &it->second;
}

void PseudonymMap::restore(Kind kind, const std::string& value, const std::string& token) {
    forward_[{kind, value}] = token;
    reverse_[{kind, token}] = value;
}

std::string_view PseudonymMap::to_string(Kind kind) {
    return kind == Kind::Respondent ? "respondent" : "field";
}

PseudonymMap::Kind PseudonymMap::kind_from_string(std::string_view text) {
    if (text == "respondent")
        return Kind::Respondent;
    if (text == "field")
        return Kind::Field;
    throw Error(ErrorCode::InvalidArgument, "unknown pseudonym kind " + std::string(text));
}

} // namespace surveynet::service
