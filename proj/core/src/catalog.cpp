#include "sepsikit/catalog.hpp"

#include "sepsikit/errors.hpp"

#include <sstream>

namespace sepsikit {

namespace {

struct Row {
    const char* name;
    const char* unit;
    Aggregation agg;
    bool sofa;
};

constexpr Aggregation kMin = Aggregation::MinWorst;
constexpr Aggregation kMax = Aggregation::MaxWorst;
constexpr Aggregation kSum = Aggregation::Sum;
constexpr Aggregation kNone = Aggregation::None;

// 131 dynamic variables, ASCII-sorted. The 15 SOFA-relevant ones carry the
// aggregation direction the scoring pipeline uses; "Mechanically ventilated"
// additionally gates the respiratory subscore and Weight normalizes
// vasopressor doses, but neither counts as SOFA-relevant.
const Row kFeatures[] = {
    {"ALP", "IU/l", kNone, false},
    {"ALT", "IU/l", kNone, false},
    {"AST", "IU/l", kNone, false},
    {"Albumin", "g/dl", kNone, false},
    {"Albumin 25%", "ml", kNone, false},
    {"Albumin 5%", "ml", kNone, false},
    {"Amiodarone", "mg", kNone, false},
    {"Anion Gap", "mEq/l", kNone, false},
    {"BUN", "mg/dl", kNone, false},
    {"Base Excess", "mEq/l", kNone, false},
    {"Basophils", "%", kNone, false},
    {"Bicarbonate", "mEq/l", kNone, false},
    {"Bilirubin (Direct)", "mg/dl", kNone, false},
    {"Bilirubin (Indirect)", "mg/dl", kNone, false},
    {"Bilirubin (Total)", "mg/dl", kMax, true},
    {"CRR", "s", kNone, false},
    {"Calcium Free", "mmol/l", kNone, false},
    {"Calcium Gluconate", "g", kNone, false},
    {"Calcium Total", "mg/dl", kNone, false},
    {"Cefazolin", "g", kNone, false},
    {"Chest Tube", "ml", kNone, false},
    {"Chloride", "mEq/l", kNone, false},
    {"Colloid", "ml", kNone, false},
    {"Creatinine Blood", "mg/dl", kMax, true},
    {"Creatinine Urine", "mg/dl", kNone, false},
    {"D5W", "ml", kNone, false},
    {"DBP", "mmHg", kMin, true},
    {"Dextrose Other", "ml", kNone, false},
    {"Dobutamine", "ug/kg/min", kMax, true},
    {"Dopamine", "ug/kg/min", kMax, true},
    {"EBL", "ml", kNone, false},
    {"Emesis", "ml", kNone, false},
    {"Eoisinophils", "%", kNone, false},
    {"Epinephrine", "ug/kg/min", kMax, true},
    {"EtCO2", "mmHg", kNone, false},
    {"Famotidine", "mg", kNone, false},
    {"Fentanyl", "ug", kNone, false},
    {"FiO2", "fraction", kMin, true},
    {"Fiber", "ml", kNone, false},
    {"Free Water", "ml", kNone, false},
    {"Fresh Frozen Plasma", "ml", kNone, false},
    {"Furosemide", "mg", kNone, false},
    {"GCS_eye", "score", kMin, true},
    {"GCS_motor", "score", kMin, true},
    {"GCS_verbal", "score", kMin, true},
    {"GT Flush", "ml", kNone, false},
    {"Gastric", "ml", kNone, false},
    {"Gastric Meds", "ml", kNone, false},
    {"Glucose (Blood)", "mg/dl", kNone, false},
    {"Glucose (Serum)", "mg/dl", kNone, false},
    {"Glucose (Whole Blood)", "mg/dl", kNone, false},
    {"HR", "bpm", kNone, false},
    {"Half Normal Saline", "ml", kNone, false},
    {"Hct", "%", kNone, false},
    {"Heparin", "units", kNone, false},
    {"Hgb", "g/dl", kNone, false},
    {"Hydralazine", "mg", kNone, false},
    {"Hydromorphone", "mg", kNone, false},
    {"INR", "ratio", kNone, false},
    {"Insulin Humalog", "units", kNone, false},
    {"Insulin NPH", "units", kNone, false},
    {"Insulin Regular", "units", kNone, false},
    {"Insulin largine", "units", kNone, false},
    {"Intubated", "flag", kNone, false},
    {"Jackson-Pratt", "ml", kNone, false},
    {"KCl", "mEq", kNone, false},
    {"KCl (Bolus)", "mEq", kNone, false},
    {"LDH", "IU/l", kNone, false},
    {"Lactate", "mmol/l", kNone, false},
    {"Lactated Ringers", "ml", kNone, false},
    {"Levofloxacin", "mg", kNone, false},
    {"Lorazepam", "mg", kNone, false},
    {"Lymphocytes", "%", kNone, false},
    {"Lymphocytes (Absolute)", "x10^3/ul", kNone, false},
    {"MBP", "mmHg", kNone, false},
    {"MCH", "pg", kNone, false},
    {"MCHC", "g/dl", kNone, false},
    {"MCV", "fl", kNone, false},
    {"Magnesium", "mg/dl", kNone, false},
    {"Magnesium Sulfate (Bolus)", "g", kNone, false},
    {"Magnesium Sulphate", "g", kNone, false},
    {"Mechanically ventilated", "flag", kMax, false},
    {"Metoprolol", "mg", kNone, false},
    {"Midazolam", "mg", kNone, false},
    {"Milrinone", "ug/kg/min", kNone, false},
    {"Monocytes", "%", kNone, false},
    {"Morphine Sulfate", "mg", kNone, false},
    {"Neosynephrine", "ug/kg/min", kNone, false},
    {"Neutrophils", "%", kNone, false},
    {"Nitroglycerine", "ug/kg/min", kNone, false},
    {"Nitroprusside", "ug/kg/min", kNone, false},
    {"Norepinephrine", "ug/kg/min", kMax, true},
    {"Normal Saline", "ml", kNone, false},
    {"O2 Saturation", "%", kNone, false},
    {"OR/PACU Crystalloid", "ml", kNone, false},
    {"PCO2", "mmHg", kNone, false},
    {"PO intake", "ml", kNone, false},
    {"PaO2", "mmHg", kMin, true},
    {"PT", "s", kNone, false},
    {"PTT", "s", kNone, false},
    {"Packed RBC", "ml", kNone, false},
    {"Pantoprazole", "mg", kNone, false},
    {"Phosphate", "mg/dl", kNone, false},
    {"Piggyback", "ml", kNone, false},
    {"Piperacillin", "g", kNone, false},
    {"Platelet Count", "x10^3/ul", kMin, true},
    {"Potassium", "mEq/l", kNone, false},
    {"Pre-admission Intake", "ml", kNone, false},
    {"Pre-admission Output", "ml", kNone, false},
    {"Propofol", "mg", kNone, false},
    {"RBC", "x10^6/ul", kNone, false},
    {"RDW", "%", kNone, false},
    {"RR", "breaths/min", kNone, false},
    {"Residual", "ml", kNone, false},
    {"SBP", "mmHg", kMin, true},
    {"SG Urine", "ratio", kNone, false},
    {"Sodium", "mEq/l", kNone, false},
    {"Solution", "ml", kNone, false},
    {"Sterile Water", "ml", kNone, false},
    {"Stool", "ml", kNone, false},
    {"TPN", "ml", kNone, false},
    {"Temperature", "degC", kNone, false},
    {"Total CO2", "mEq/l", kNone, false},
    {"Ultrafiltrate", "ml", kNone, false},
    {"Urine", "ml", kSum, true},
    {"Vancomycin", "g", kNone, false},
    {"Vasopressin", "units/h", kNone, false},
    {"WBC", "x10^3/ul", kNone, false},
    {"Weight", "kg", kNone, false},
    {"pH Blood", "pH", kNone, false},
    {"pH Urine", "pH", kNone, false},
};

const char* aggregation_name(Aggregation a) {
    switch (a) {
    case Aggregation::MinWorst: return "min";
    case Aggregation::MaxWorst: return "max";
    case Aggregation::Sum: return "sum";
    case Aggregation::None: return "-";
    }
    return "-";
}

} // namespace

FeatureCatalog::FeatureCatalog() {
    entries_.reserve(std::size(kFeatures));
    for (const Row& row : kFeatures) {
        FeatureId id = static_cast<FeatureId>(entries_.size());
        entries_.push_back(FeatureInfo{row.name, row.unit, row.agg, row.sofa});
        index_.emplace(row.name, id);
    }
}

const FeatureCatalog& FeatureCatalog::builtin() {
    static const FeatureCatalog catalog;
    return catalog;
}

std::optional<FeatureId> FeatureCatalog::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

FeatureId FeatureCatalog::require(std::string_view name) const {
    auto id = find(name);
    if (!id) throw InputError("unknown feature: '" + std::string(name) + "'");
    return *id;
}

std::size_t FeatureCatalog::sofa_relevant_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_)
        if (e.sofa_relevant) ++n;
    return n;
}

std::string FeatureCatalog::reference_listing() const {
    std::ostringstream out;
    out << "feature,unit,aggregation,sofa_relevant\n";
    for (const auto& e : entries_) {
        out << e.name << ',' << e.unit << ',' << aggregation_name(e.aggregation)
            << ',' << (e.sofa_relevant ? 1 : 0) << '\n';
    }
    return out.str();
}

const SofaFeatures& SofaFeatures::builtin() {
    static const SofaFeatures ids = [] {
        const auto& c = FeatureCatalog::builtin();
        SofaFeatures f{};
        f.dbp = c.require("DBP");
        f.sbp = c.require("SBP");
        f.gcs_eye = c.require("GCS_eye");
        f.gcs_motor = c.require("GCS_motor");
        f.gcs_verbal = c.require("GCS_verbal");
        f.dopamine = c.require("Dopamine");
        f.dobutamine = c.require("Dobutamine");
        f.epinephrine = c.require("Epinephrine");
        f.norepinephrine = c.require("Norepinephrine");
        f.pao2 = c.require("PaO2");
        f.fio2 = c.require("FiO2");
        f.platelets = c.require("Platelet Count");
        f.bilirubin_total = c.require("Bilirubin (Total)");
        f.creatinine_blood = c.require("Creatinine Blood");
        f.urine = c.require("Urine");
        f.mech_vent = c.require("Mechanically ventilated");
        f.weight = c.require("Weight");
        return f;
    }();
    return ids;
}

} // namespace sepsikit
