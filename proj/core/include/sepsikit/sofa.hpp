#pragma once

#include "sepsikit/catalog.hpp"
#include "sepsikit/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace sepsikit {

// Worst values of the SOFA-relevant variables over one 24h day. A missing
// field contributes 0 to its organ subscore.
struct WorstValues {
    std::optional<double> gcs_eye, gcs_motor, gcs_verbal;
    std::optional<double> map_min;
    std::optional<double> dopamine_max, dobutamine_max, epinephrine_max, norepinephrine_max;
    std::optional<double> pao2_min, fio2_min;
    std::optional<bool> mech_vent;
    std::optional<double> platelets_min;
    std::optional<double> bilirubin_max;
    std::optional<double> creatinine_max;
    std::optional<double> urine_total;
    std::optional<double> weight_kg;
};

enum class Organ { Cns, Cardio, Resp, Coag, Liver, Renal };

inline constexpr std::array<Organ, 6> kOrgans = {Organ::Cns,  Organ::Cardio, Organ::Resp,
                                                 Organ::Coag, Organ::Liver,  Organ::Renal};

std::string_view to_string(Organ o);
std::optional<Organ> organ_from_string(std::string_view s);

enum class PreconditionOrgan { Lung, Kidney, Coagulation, Liver, Cardiovascular };
enum class CodeDistribution { InDistribution, OutOfDistribution };

std::string_view to_string(PreconditionOrgan o);
std::optional<PreconditionOrgan> precondition_organ_from_string(std::string_view s);
std::string_view to_string(CodeDistribution d);

// A chronic-condition exception: the named organ system is disregarded when
// summing the total SOFA score.
struct Precondition {
    std::string icd_code;
    PreconditionOrgan organ = PreconditionOrgan::Kidney;
    CodeDistribution distribution = CodeDistribution::InDistribution;
};

Organ excluded_organ(PreconditionOrgan o);

struct PreconditionCode {
    std::string_view icd_code;
    PreconditionOrgan organ;
    CodeDistribution distribution;
};

// The 15 supported ICD-10 precondition codes.
std::span<const PreconditionCode> precondition_codes();
std::optional<Precondition> precondition_from_code(std::string_view icd_code);

struct SofaConfig {
    // Require mechanical ventilation for respiratory scores 3 and 4.
    bool mv_gating = true;
};

// Derived clinical quantities.
double mean_arterial_pressure(double sbp, double dbp); // (sbp + 2*dbp) / 3
double horowitz(double pao2, double fio2);             // pao2 / fio2
double vasopressor_rate(double total_dose_ug, double duration_min, double weight_kg);

// Organ step functions. Missing inputs score 0.
int score_cns(double gcs_sum); // throws InputError outside [3, 15]
int score_cardio(std::optional<double> map_min, std::optional<double> dopamine,
                 std::optional<double> dobutamine, std::optional<double> epinephrine,
                 std::optional<double> norepinephrine);
int score_resp(std::optional<double> pao2_fio2, bool mech_vent, bool mv_gating = true);
int score_coag(std::optional<double> platelets_min);
int score_liver(std::optional<double> bilirubin_max);
int score_renal(std::optional<double> creatinine_max, std::optional<double> urine_total);

struct SofaSnapshot {
    int cns = 0, cardio = 0, resp = 0, coag = 0, liver = 0, renal = 0;
    int total = 0;
    WorstValues inputs;
    std::optional<Organ> excluded;

    int score(Organ o) const;
};

// Sum of the six subscores, skipping `excluded`. Throws InputError when a
// subscore is outside 0..4.
int total_sofa(const std::array<int, 6>& subscores, std::optional<Organ> excluded = {});

SofaSnapshot score_sofa(const WorstValues& worst,
                        const std::optional<Precondition>& exception = {},
                        const SofaConfig& config = {});

// True iff the total rose by at least 2 points.
bool sofa_diff(int current_total, int future_total);

struct SepsisVerdict {
    bool sofa_diff = false;
    bool suspected_infection = false;
    bool septic = false;
    int delta = 0; // future total - current total
};

SepsisVerdict sepsis_label(bool diff, bool infection);
SepsisVerdict sepsis_label(int current_total, int future_total, bool infection);

// Worst-value extraction over one day of window-relative observations.
// MAP is minimized over co-timed SBP/DBP pairs inside the same hour bucket;
// unpaired readings are skipped. Fields absent in the window are filled from
// `prior` (the previous day's raw worst values) when present there.
WorstValues worst_values(std::span<const Observation> day, const Demographics& demographics,
                         const std::optional<WorstValues>& prior = {},
                         const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Field-wise carry-forward: primary wins, fallback fills gaps.
WorstValues merge_carry_forward(WorstValues primary, const WorstValues& fallback);

// Ground truth for one stay window: both snapshots plus the verdict.
struct WindowLabel {
    SofaSnapshot current;
    SofaSnapshot future;
    SepsisVerdict verdict;
};

} // namespace sepsikit
