#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sepsikit {

using FeatureId = std::uint32_t;

// How a feature's 24h worst value is derived. None means the feature does not
// participate in worst-value extraction (Weight is read as last-observed).
enum class Aggregation { MinWorst, MaxWorst, Sum, None };

struct FeatureInfo {
    std::string name;
    std::string unit;
    Aggregation aggregation = Aggregation::None;
    bool sofa_relevant = false;
};

// The closed set of 131 dynamic clinical variables. 15 of them feed the SOFA
// subscores directly (sofa_relevant).
class FeatureCatalog {
public:
    static const FeatureCatalog& builtin();

    std::size_t size() const { return entries_.size(); }
    const FeatureInfo& at(FeatureId id) const { return entries_.at(id); }
    const std::vector<FeatureInfo>& entries() const { return entries_; }

    std::optional<FeatureId> find(std::string_view name) const;
    // Throws InputError when the name is not in the catalog.
    FeatureId require(std::string_view name) const;

    std::size_t sofa_relevant_count() const;

    // Plain-text reference listing (name, unit, aggregation, SOFA flag).
    std::string reference_listing() const;

private:
    FeatureCatalog();

    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::vector<FeatureInfo> entries_;
    std::unordered_map<std::string, FeatureId, StringHash, std::equal_to<>> index_;
};

// Catalog ids the scoring pipeline reads directly, resolved once.
struct SofaFeatures {
    FeatureId dbp, sbp;
    FeatureId gcs_eye, gcs_motor, gcs_verbal;
    FeatureId dopamine, dobutamine, epinephrine, norepinephrine;
    FeatureId pao2, fio2;
    FeatureId platelets, bilirubin_total, creatinine_blood, urine;
    FeatureId mech_vent, weight;

    static const SofaFeatures& builtin();
};

} // namespace sepsikit
