#include <surveynet/instruments.hpp>

#include <set>

#include <surveynet/bands.hpp>
#include <surveynet/error.hpp>
#include <surveynet/formula.hpp>
#include <surveynet/validation.hpp>

namespace surveynet {

namespace {

std::vector<AnswerOption> graded_options(int lo, int hi) {
    std::vector<AnswerOption> options;
    for (int v = lo; v <= hi; ++v)
        options.push_back({"Level " + std::to_string(v), Rational(v)});
    return options;
}

Question placeholder_item(const std::string& instrument, int index, std::vector<AnswerOption> options,
                          const std::string& topic = {}) {
    Question q;
    q.id = "Q" + std::to_string(index);
    q.prompt = "[" + instrument + " item " + std::to_string(index) + "]";
    if (!topic.empty())
        q.prompt += " " + topic;
    q.kind = QuestionKind::SingleChoice;
    q.options = std::move(options);
    return q;
}

std::string item_range(int first, int last) {
    return "Q" + std::to_string(first) + "..Q" + std::to_string(last);
}

Instrument make_audit() {
    Instrument inst;
    inst.id = kAuditId;
    inst.name = "Alcohol Use Disorders Identification Test";
    inst.citation = "T. F. Babor, J. C. Higgins-Biddle, J. B. Saunders, M. G. Monteiro. The Alcohol Use "
                    "Disorders Identification Test: Guidelines for Use in Primary Care, 2nd ed. World Health "
                    "Organization, 2001.";
    static const char* topics[] = {"frequency of drinking",      "typical quantity",
                                   "frequency of heavy drinking", "impaired control",
                                   "failed expectations",         "morning drinking",
                                   "guilt after drinking",        "blackouts",
                                   "alcohol-related injuries",    "others concerned"};
    for (int i = 1; i <= 10; ++i)
        inst.items.push_back(placeholder_item(inst.id, i, graded_options(0, 4), topics[i - 1]));
    inst.scales.push_back({"total", "sum(" + item_range(1, 10) + ")", audit_band_table()});
    return inst;
}

Instrument make_fas() {
    Instrument inst;
    inst.id = kFasId;
    inst.name = "Family Affluence Scale II";
    inst.citation = "C. E. Currie, R. A. Elton, J. Todd, S. Platt. Indicators of socioeconomic status for "
                    "adolescents: the WHO Health Behaviour in School-aged Children survey. Health Education "
                    "Research 12(3):385-397, 1997.";
    inst.items.push_back(placeholder_item(inst.id, 1, graded_options(0, 2), "family vehicles"));
    inst.items.push_back(placeholder_item(inst.id, 2, graded_options(0, 1), "own bedroom"));
    inst.items.push_back(placeholder_item(inst.id, 3, graded_options(0, 3), "holidays in the past year"));
    inst.items.push_back(placeholder_item(inst.id, 4, graded_options(0, 3), "computers at home"));
    BandTable bands;
    bands.bands = {{Rational(0), Rational(2), "Low affluence", "Editable default cut-point"},
                   {Rational(3), Rational(5), "Medium affluence", "Editable default cut-point"},
                   {Rational(6), Rational(9), "High affluence", "Editable default cut-point"}};
    inst.scales.push_back({"total", "sum(" + item_range(1, 4) + ")", bands});
    return inst;
}

Instrument make_kidscreen() {
    Instrument inst;
    inst.id = kKidscreenId;
    inst.name = "KIDSCREEN-27 Health Related Quality of Life Questionnaire";
    inst.citation = "The KIDSCREEN Group Europe. The KIDSCREEN Questionnaires: Quality of life questionnaires "
                    "for children and adolescents. Pabst Science Publishers, 2006.";
    for (int i = 1; i <= 27; ++i)
        inst.items.push_back(placeholder_item(inst.id, i, graded_options(1, 5)));
    struct Span {
        const char* name;
        int first;
        int last;
    };
    static const Span spans[] = {{"physical_wellbeing", 1, 5},
                                 {"psychological_wellbeing", 6, 12},
                                 {"autonomy_parent_relation", 13, 19},
                                 {"peers_social_support", 20, 23},
                                 {"school_environment", 24, 27}};
    for (const auto& span : spans) {
        const int n = span.last - span.first + 1;
        // raw sum over items valued 1..5, rescaled linearly to 0..100
        std::string formula = "(sum(" + item_range(span.first, span.last) + ") - " + std::to_string(n) +
                              ") * 100 / " + std::to_string(4 * n);
        inst.scales.push_back({span.name, formula, std::nullopt});
    }
    return inst;
}

Instrument make_self_efficacy() {
    Instrument inst;
    inst.id = kSelfEfficacyId;
    inst.name = "General Self-Efficacy Scale";
    inst.citation = "R. Schwarzer, M. Jerusalem. Generalized Self-Efficacy scale. In J. Weinman, S. Wright, "
                    "M. Johnston (Eds.), Measures in health psychology: A user's portfolio. Causal and control "
                    "beliefs, pp. 35-37. NFER-NELSON, 1995.";
    for (int i = 1; i <= 10; ++i)
        inst.items.push_back(placeholder_item(inst.id, i, graded_options(1, 4)));
    inst.scales.push_back({"total", "sum(" + item_range(1, 10) + ")", std::nullopt});
    return inst;
}

Instrument make_estudes() {
    Instrument inst;
    inst.id = kEstudesId;
    inst.name = "ESTUDES substance-use items (alcohol items excluded)";
    inst.citation = "Ministerio de Sanidad. Encuesta sobre el uso de drogas en ensenanzas secundarias en "
                    "Espana (ESTUDES), 2016.";
    static const char* substances[] = {"tobacco", "cannabis", "cocaine", "ecstasy", "hypnotics", "inhalants"};
    const std::vector<AnswerOption> frequency = {{"Never", Rational(0)},
                                                 {"Once or more in lifetime", Rational(1)},
                                                 {"In the last 12 months", Rational(2)},
                                                 {"In the last 30 days", Rational(3)},
                                                 {"Daily in the last 30 days", Rational(4)}};
    for (int i = 1; i <= 6; ++i)
        inst.items.push_back(placeholder_item(inst.id, i, frequency, std::string("use of ") + substances[i - 1]));
    return inst;
}

} // namespace

const Question* Instrument::find_item(const std::string& item_id) const {
    for (const auto& item : items)
        if (item.id == item_id)
            return &item;
    return nullptr;
}

BandTable audit_band_table() {
    BandTable table;
    table.bands = {
        {Rational(0), Rational(7), "Zone I", "Alcohol education"},
        {Rational(8), Rational(15), "Zone II", "Simple advice"},
        {Rational(16), Rational(19), "Zone III", "Simple advice plus brief counseling and continued monitoring"},
        {Rational(20), Rational(40), "Zone IV", "Referral to specialist for diagnostic evaluation and treatment"},
    };
    return table;
}

ZoneAdvice audit_zone(const Rational& total) {
    static const BandTable table = audit_band_table();
    if (total < 0 || total > 40)
        throw Error(ErrorCode::OutOfRange, "AUDIT total " + to_string(total) + " outside [0, 40]");
    const Band& band = band_of(table, total);
    return {band.label, band.guidance};
}

std::vector<Instrument> builtin_instruments() {
    return {make_audit(), make_fas(), make_kidscreen(), make_self_efficacy(), make_estudes()};
}

void check_instrument(const Instrument& inst) {
    if (inst.id.empty())
        throw Error(ErrorCode::InvalidArgument, "instrument without id");
    if (inst.citation.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(ErrorCode::MissingCitation, "instrument " + inst.id + " has no citation");
    std::set<std::string> ids;
    std::set<std::string> scoreable;
    std::set<std::string> free_text;
    std::map<std::string, ValueRange> ranges;
    for (const auto& item : inst.items) {
        if (!ids.insert(item.id).second)
            throw Error(ErrorCode::InvalidArgument, "instrument " + inst.id + " repeats item " + item.id);
        if (auto findings = validate_question(item); !findings.empty())
            throw Error(ErrorCode::InvalidArgument, findings.front().message);
        if (item.kind == QuestionKind::RelationalTemplate)
            throw Error(ErrorCode::InvalidArgument, "instrument items cannot be relational");
        if (item.kind == QuestionKind::FreeText) {
            free_text.insert(item.id);
            continue;
        }
        scoreable.insert(item.id);
        if (auto r = question_value_range(item))
            ranges[item.id] = *r;
    }
    std::set<std::string> scale_names;
    for (const auto& scale : inst.scales) {
        if (!scale_names.insert(scale.name).second)
            throw Error(ErrorCode::InvalidArgument, "instrument " + inst.id + " repeats scale " + scale.name);
        Formula formula;
        try {
            formula = parse_formula(scale.formula, scoreable, free_text);
        } catch (const FormulaError& e) {
            if (e.code() == ErrorCode::UnknownItem || e.code() == ErrorCode::FreeTextReference)
                throw Error(ErrorCode::UnknownItem, "instrument " + inst.id + " scale " + scale.name + ": " + e.what());
            throw;
        }
        if (scale.bands) {
            auto range = attainable_range(*formula.root, ranges);
            auto findings = validate_band_table(inst.id + "." + scale.name, *scale.bands,
                                                range ? &range->lower : nullptr, range ? &range->upper : nullptr);
            if (!findings.empty())
                throw Error(ErrorCode::InvalidArgument, findings.front().message);
        }
    }
}

InstrumentLibrary::InstrumentLibrary() {
    for (auto& inst : builtin_instruments())
        restore(std::move(inst));
}

const Instrument* InstrumentLibrary::find(const std::string& id) const {
    auto it = instruments_.find(id);
    return it == instruments_.end() ? nullptr : &it->second;
}

std::vector<const Instrument*> InstrumentLibrary::list() const {
    std::vector<const Instrument*> out;
    for (const auto& id : order_)
        out.push_back(&instruments_.at(id));
    return out;
}

std::string InstrumentLibrary::register_instrument(Instrument instrument, Role caller) {
    if (caller != Role::SuperAdmin)
        throw Error(ErrorCode::Denied, "only super-admins register instruments");
    check_instrument(instrument);
    if (instruments_.count(instrument.id) != 0)
        throw Error(ErrorCode::DuplicateInstrument, "instrument " + instrument.id + " already exists");
    std::string id = instrument.id;
    restore(std::move(instrument));
    return id;
}

void InstrumentLibrary::restore(Instrument instrument) {
    std::string id = instrument.id;
    if (instruments_.count(id) == 0)
        order_.push_back(id);
    instruments_[id] = std::move(instrument);
}

} // namespace surveynet
