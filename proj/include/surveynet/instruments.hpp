#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <surveynet/model.hpp>
#include <surveynet/role.hpp>

namespace surveynet {

struct InstrumentScale {
    std::string name;
    std::string formula; // over instrument-local item ids
    std::optional<BandTable> bands;

    bool operator==(const InstrumentScale&) const = default;
};

/// A validated questionnaire shipped as data. Item prompts are placeholders keyed by item code.
struct Instrument {
    std::string id;
    std::string name;
    std::string citation;
    std::vector<Question> items;
    std::vector<InstrumentScale> scales;

    const Question* find_item(const std::string& item_id) const;

    bool operator==(const Instrument&) const = default;
};

inline constexpr const char* kAuditId = "AUDIT";
inline constexpr const char* kFasId = "FAS-II";
inline constexpr const char* kKidscreenId = "KIDSCREEN-27";
inline constexpr const char* kSelfEfficacyId = "GSE";
inline constexpr const char* kEstudesId = "ESTUDES-SUBSTANCES";

/// AUDIT, FAS-II, KIDSCREEN-27, GSE and ESTUDES-SUBSTANCES, in that order.
std::vector<Instrument> builtin_instruments();

/// The four AUDIT risk zones over [0, 40].
BandTable audit_band_table();

struct ZoneAdvice {
    std::string zone;
    std::string intervention;

    bool operator==(const ZoneAdvice&) const = default;
};

/// Risk zone and recommended intervention for an AUDIT total in [0, 40].
ZoneAdvice audit_zone(const Rational& total);

/// Rejections as InvalidArgument/MissingCitation/UnknownItem errors; empty citation first.
void check_instrument(const Instrument& instrument);

/// Built-in catalog plus instruments registered by super-admins.
class InstrumentLibrary {
public:
    InstrumentLibrary();

    const Instrument* find(const std::string& id) const;
    std::vector<const Instrument*> list() const;

    /// Super-admin only. Returns the stored id.
    std::string register_instrument(Instrument instrument, Role caller);

    /// Restores a previously registered instrument without the role check (storage reload).
    void restore(Instrument instrument);

private:
    std::map<std::string, Instrument> instruments_;
    std::vector<std::string> order_;
};

} // namespace surveynet
