#include "sepsikit/sofa.hpp"

#include "sepsikit/errors.hpp"
#include "sepsikit/textfmt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace sepsikit {

std::string_view to_string(Organ o) {
    switch (o) {
    case Organ::Cns: return "cns";
    case Organ::Cardio: return "cardio";
    case Organ::Resp: return "resp";
    case Organ::Coag: return "coag";
    case Organ::Liver: return "liver";
    case Organ::Renal: return "renal";
    }
    return "";
}

std::optional<Organ> organ_from_string(std::string_view s) {
    for (Organ o : kOrgans)
        if (to_string(o) == s) return o;
    return std::nullopt;
}

std::string_view to_string(PreconditionOrgan o) {
    switch (o) {
    case PreconditionOrgan::Lung: return "lung";
    case PreconditionOrgan::Kidney: return "kidney";
    case PreconditionOrgan::Coagulation: return "coagulation";
    case PreconditionOrgan::Liver: return "liver";
    case PreconditionOrgan::Cardiovascular: return "cardiovascular";
    }
    return "";
}

std::optional<PreconditionOrgan> precondition_organ_from_string(std::string_view s) {
    for (auto o : {PreconditionOrgan::Lung, PreconditionOrgan::Kidney, PreconditionOrgan::Coagulation,
                   PreconditionOrgan::Liver, PreconditionOrgan::Cardiovascular})
        if (to_string(o) == s) return o;
    return std::nullopt;
}

std::string_view to_string(CodeDistribution d) {
    return d == CodeDistribution::InDistribution ? "ID" : "OOD";
}

Organ excluded_organ(PreconditionOrgan o) {
    switch (o) {
    case PreconditionOrgan::Lung: return Organ::Resp;
    case PreconditionOrgan::Kidney: return Organ::Renal;
    case PreconditionOrgan::Coagulation: return Organ::Coag;
    case PreconditionOrgan::Liver: return Organ::Liver;
    case PreconditionOrgan::Cardiovascular: return Organ::Cardio;
    }
    return Organ::Renal;
}

namespace {

constexpr CodeDistribution kId = CodeDistribution::InDistribution;
constexpr CodeDistribution kOod = CodeDistribution::OutOfDistribution;

const PreconditionCode kPreconditionCodes[] = {
    {"J40", PreconditionOrgan::Lung, kId},
    {"J41", PreconditionOrgan::Lung, kId},
    {"J42", PreconditionOrgan::Lung, kId},
    {"J44.9", PreconditionOrgan::Lung, kOod},
    {"N18.9", PreconditionOrgan::Kidney, kId},
    {"N28", PreconditionOrgan::Kidney, kId},
    {"N19", PreconditionOrgan::Kidney, kOod},
    {"D68.4", PreconditionOrgan::Coagulation, kId},
    {"D68.5", PreconditionOrgan::Coagulation, kId},
    {"D68.6", PreconditionOrgan::Coagulation, kOod},
    {"K70.0", PreconditionOrgan::Liver, kId},
    {"K70.41", PreconditionOrgan::Liver, kId},
    {"K70.3", PreconditionOrgan::Liver, kOod},
    {"I50.0", PreconditionOrgan::Cardiovascular, kId},
    {"I50.9", PreconditionOrgan::Cardiovascular, kId},
    {"I50.1", PreconditionOrgan::Cardiovascular, kOod},
};

} // namespace

std::span<const PreconditionCode> precondition_codes() {
    return kPreconditionCodes;
}

std::optional<Precondition> precondition_from_code(std::string_view icd_code) {
    for (const auto& c : kPreconditionCodes)
        if (c.icd_code == icd_code)
            return Precondition{std::string(c.icd_code), c.organ, c.distribution};
    return std::nullopt;
}

double mean_arterial_pressure(double sbp, double dbp) {
    if (!(sbp >= dbp) || !(dbp > 0.0))
        throw InputError("mean_arterial_pressure: requires sbp >= dbp > 0");
    return (sbp + 2.0 * dbp) / 3.0;
}

double horowitz(double pao2, double fio2) {
    if (!(fio2 > 0.0)) throw InputError("horowitz: FiO2 must be positive");
    return pao2 / fio2;
}

double vasopressor_rate(double total_dose_ug, double duration_min, double weight_kg) {
    if (!(weight_kg > 0.0)) throw InputError("vasopressor_rate: weight must be positive");
    if (!(duration_min > 0.0)) throw InputError("vasopressor_rate: duration must be positive");
    return total_dose_ug / (weight_kg * duration_min);
}

int score_cns(double gcs_sum) {
    if (!(gcs_sum >= 3.0 && gcs_sum <= 15.0))
        throw InputError("score_cns: GCS sum outside [3, 15]");
    if (gcs_sum < 6.0) return 4;
    if (gcs_sum < 10.0) return 3;
    if (gcs_sum < 13.0) return 2;
    if (gcs_sum < 15.0) return 1;
    return 0;
}

int score_cardio(std::optional<double> map_min, std::optional<double> dopamine,
                 std::optional<double> dobutamine, std::optional<double> epinephrine,
                 std::optional<double> norepinephrine) {
    const double dopa = dopamine.value_or(0.0);
    const double dobu = dobutamine.value_or(0.0);
    const double epi = epinephrine.value_or(0.0);
    const double norepi = norepinephrine.value_or(0.0);
    // Severity ladder: the highest matching row wins.
    if (dopa > 15.0 || epi > 0.1 || norepi > 0.1) return 4;
    if (dopa > 5.0 || epi > 0.0 || norepi > 0.0) return 3;
    if (dopa > 0.0 || dobu > 0.0) return 2;
    if (map_min && *map_min < 70.0) return 1;
    return 0;
}

int score_resp(std::optional<double> pao2_fio2, bool mech_vent, bool mv_gating) {
    if (!pao2_fio2) return 0;
    const double r = *pao2_fio2;
    const bool severe_ok = !mv_gating || mech_vent;
    if (r < 100.0 && severe_ok) return 4;
    if (r < 200.0 && severe_ok) return 3;
    if (r < 300.0) return 2;
    if (r < 400.0) return 1;
    return 0;
}

int score_coag(std::optional<double> platelets_min) {
    if (!platelets_min) return 0;
    const double p = *platelets_min;
    if (p < 20.0) return 4;
    if (p < 50.0) return 3;
    if (p < 100.0) return 2;
    if (p < 150.0) return 1;
    return 0;
}

int score_liver(std::optional<double> bilirubin_max) {
    if (!bilirubin_max) return 0;
    const double b = *bilirubin_max;
    if (b < 1.2) return 0;
    if (b < 2.0) return 1;
    if (b < 6.0) return 2;
    if (b < 12.0) return 3;
    return 4;
}

int score_renal(std::optional<double> creatinine_max, std::optional<double> urine_total) {
    int creatinine_score = 0;
    if (creatinine_max) {
        const double c = *creatinine_max;
        creatinine_score = c < 1.2 ? 0 : c < 2.0 ? 1 : c < 3.5 ? 2 : c < 5.0 ? 3 : 4;
    }
    int urine_score = 0;
    if (urine_total) {
        const double u = *urine_total;
        urine_score = u < 200.0 ? 4 : u < 500.0 ? 3 : 0;
    }
    return std::max(creatinine_score, urine_score);
}

int SofaSnapshot::score(Organ o) const {
    switch (o) {
    case Organ::Cns: return cns;
    case Organ::Cardio: return cardio;
    case Organ::Resp: return resp;
    case Organ::Coag: return coag;
    case Organ::Liver: return liver;
    case Organ::Renal: return renal;
    }
    return 0;
}

int total_sofa(const std::array<int, 6>& subscores, std::optional<Organ> excluded) {
    int total = 0;
    for (std::size_t i = 0; i < kOrgans.size(); ++i) {
        if (subscores[i] < 0 || subscores[i] > 4)
            throw InputError("total_sofa: subscore outside 0..4");
        if (excluded && kOrgans[i] == *excluded) continue;
        total += subscores[i];
    }
    return total;
}

SofaSnapshot score_sofa(const WorstValues& worst, const std::optional<Precondition>& exception,
                        const SofaConfig& config) {
    SofaSnapshot s;
    s.inputs = worst;

    if (worst.gcs_eye && worst.gcs_motor && worst.gcs_verbal)
        s.cns = score_cns(textfmt::round3(*worst.gcs_eye + *worst.gcs_motor + *worst.gcs_verbal));

    s.cardio = score_cardio(worst.map_min, worst.dopamine_max, worst.dobutamine_max,
                            worst.epinephrine_max, worst.norepinephrine_max);

    std::optional<double> ratio;
    if (worst.pao2_min && worst.fio2_min && *worst.fio2_min > 0.0)
        ratio = textfmt::round3(horowitz(*worst.pao2_min, *worst.fio2_min));
    s.resp = score_resp(ratio, worst.mech_vent.value_or(false), config.mv_gating);

    s.coag = score_coag(worst.platelets_min);
    s.liver = score_liver(worst.bilirubin_max);
    s.renal = score_renal(worst.creatinine_max, worst.urine_total);

    if (exception) s.excluded = excluded_organ(exception->organ);
    s.total = total_sofa({s.cns, s.cardio, s.resp, s.coag, s.liver, s.renal}, s.excluded);
    return s;
}

bool sofa_diff(int current_total, int future_total) {
    return future_total - current_total >= 2;
}

SepsisVerdict sepsis_label(bool diff, bool infection) {
    SepsisVerdict v;
    v.sofa_diff = diff;
    v.suspected_infection = infection;
    v.septic = diff && infection;
    return v;
}

SepsisVerdict sepsis_label(int current_total, int future_total, bool infection) {
    SepsisVerdict v = sepsis_label(sofa_diff(current_total, future_total), infection);
    v.delta = future_total - current_total;
    return v;
}

namespace {

void keep_min(std::optional<double>& slot, double v) {
    if (!slot || v < *slot) slot = v;
}

void keep_max(std::optional<double>& slot, double v) {
    if (!slot || v > *slot) slot = v;
}

void add_to(std::optional<double>& slot, double v) {
    slot = slot.value_or(0.0) + v;
}

} // namespace

WorstValues worst_values(std::span<const Observation> day, const Demographics& demographics,
                         const std::optional<WorstValues>& prior, const FeatureCatalog& catalog) {
    (void)catalog;
    const SofaFeatures& f = SofaFeatures::builtin();
    WorstValues w;

    // Per hour bucket, SBP/DBP readings sorted by time; zipped into pairs below.
    std::map<int, std::pair<std::vector<std::pair<double, double>>, std::vector<std::pair<double, double>>>>
        pressure_buckets;

    std::optional<double> weight_time;
    bool saw_mv_obs = false;
    bool mv_positive = false;

    for (const Observation& obs : day) {
        const FeatureId id = obs.feature;
        const double v = obs.value;
        if (id == f.gcs_eye) keep_min(w.gcs_eye, v);
        else if (id == f.gcs_motor) keep_min(w.gcs_motor, v);
        else if (id == f.gcs_verbal) keep_min(w.gcs_verbal, v);
        else if (id == f.dopamine) keep_max(w.dopamine_max, v);
        else if (id == f.dobutamine) keep_max(w.dobutamine_max, v);
        else if (id == f.epinephrine) keep_max(w.epinephrine_max, v);
        else if (id == f.norepinephrine) keep_max(w.norepinephrine_max, v);
        else if (id == f.pao2) keep_min(w.pao2_min, v);
        else if (id == f.fio2) keep_min(w.fio2_min, v);
        else if (id == f.platelets) keep_min(w.platelets_min, v);
        else if (id == f.bilirubin_total) keep_max(w.bilirubin_max, v);
        else if (id == f.creatinine_blood) keep_max(w.creatinine_max, v);
        else if (id == f.urine) add_to(w.urine_total, v);
        else if (id == f.sbp || id == f.dbp) {
            auto& bucket = pressure_buckets[static_cast<int>(std::floor(obs.time_h))];
            auto& series = (id == f.sbp) ? bucket.first : bucket.second;
            series.emplace_back(obs.time_h, v);
        } else if (id == f.mech_vent) {
            saw_mv_obs = true;
            if (v > 0.0) mv_positive = true;
        } else if (id == f.weight) {
            if (!weight_time || obs.time_h >= *weight_time) {
                weight_time = obs.time_h;
                w.weight_kg = v;
            }
        }
    }

    for (auto& [hour, bucket] : pressure_buckets) {
        auto& [sbp, dbp] = bucket;
        auto by_time = [](const auto& a, const auto& b) { return a.first < b.first; };
        std::stable_sort(sbp.begin(), sbp.end(), by_time);
        std::stable_sort(dbp.begin(), dbp.end(), by_time);
        const std::size_t pairs = std::min(sbp.size(), dbp.size());
        for (std::size_t i = 0; i < pairs; ++i) {
            const double s = sbp[i].second, d = dbp[i].second;
            if (s < d || d <= 0.0) continue; // sensor artifact, skip the pair
            keep_min(w.map_min, mean_arterial_pressure(s, d));
        }
    }

    if (saw_mv_obs) w.mech_vent = mv_positive;
    if (!w.weight_kg) w.weight_kg = demographics.weight_kg;

    // keep every field on the verbalizer's 3-decimal grid so scores
    // re-derived from rendered text match the engine on rule boundaries
    for (auto* slot : {&w.gcs_eye, &w.gcs_motor, &w.gcs_verbal, &w.map_min, &w.dopamine_max,
                       &w.dobutamine_max, &w.epinephrine_max, &w.norepinephrine_max, &w.pao2_min,
                       &w.fio2_min, &w.platelets_min, &w.bilirubin_max, &w.creatinine_max,
                       &w.urine_total, &w.weight_kg}) {
        if (*slot) *slot = textfmt::round3(**slot);
    }

    if (prior) w = merge_carry_forward(std::move(w), *prior);
    return w;
}

WorstValues merge_carry_forward(WorstValues primary, const WorstValues& fallback) {
    auto fill = [](auto& slot, const auto& from) {
        if (!slot) slot = from;
    };
    fill(primary.gcs_eye, fallback.gcs_eye);
    fill(primary.gcs_motor, fallback.gcs_motor);
    fill(primary.gcs_verbal, fallback.gcs_verbal);
    fill(primary.map_min, fallback.map_min);
    fill(primary.dopamine_max, fallback.dopamine_max);
    fill(primary.dobutamine_max, fallback.dobutamine_max);
    fill(primary.epinephrine_max, fallback.epinephrine_max);
    fill(primary.norepinephrine_max, fallback.norepinephrine_max);
    fill(primary.pao2_min, fallback.pao2_min);
    fill(primary.fio2_min, fallback.fio2_min);
    fill(primary.mech_vent, fallback.mech_vent);
    fill(primary.platelets_min, fallback.platelets_min);
    fill(primary.bilirubin_max, fallback.bilirubin_max);
    fill(primary.creatinine_max, fallback.creatinine_max);
    fill(primary.urine_total, fallback.urine_total);
    fill(primary.weight_kg, fallback.weight_kg);
    return primary;
}

} // namespace sepsikit
