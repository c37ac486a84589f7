#pragma once

#include "sepsikit/forecast.hpp"
#include "sepsikit/ingest.hpp"
#include "sepsikit/sofa.hpp"
#include "sepsikit/verbalize.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sepsikit {

enum class Split { Train, Dev, TestId, TestOod };

std::string_view to_string(Split s);
std::optional<Split> split_from_string(std::string_view s);

enum class PreconditionPool { None, Id, IdOod };
enum class ForecastSource { GroundTruth, Persistence, External };

// Deterministic RNG with explicit sampling so corpora are byte-identical for
// a given seed regardless of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    std::size_t index(std::size_t n); // uniform in [0, n)

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            using std::swap;
            swap(items[i - 1], items[index(i)]);
        }
    }

private:
    std::uint64_t state_;
};

// One of six outcomes with equal probability: five organ categories or no
// precondition. Within the drawn organ the code is uniform over the pool
// (ID codes, or ID plus OOD when include_ood is set).
std::optional<Precondition> assign_precondition(Rng& rng, bool include_ood);

struct SplitSizes {
    std::size_t train = 0, dev = 0, test_id = 0, test_ood = 0;
    std::size_t total() const { return train + dev + test_id + test_ood; }
};

struct CorpusRecord {
    std::string stay;
    int day = 0;
    Split split = Split::Train;
    std::string prompt;
    std::string gold_answer;
    std::optional<Precondition> precondition;
    WindowLabel truth;
};

// Ground truth for one window: worst values with one-day carry-forward,
// scored under the window's precondition.
WindowLabel label_window(const StayWindow& window, const SofaConfig& config = {},
                         const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Like label_window, but the future side of the chain comes from a
// forecaster instead of the real prediction day (the returned label's
// `current`/`future` describe the chain to verbalize; callers that need real
// ground truth keep label_window's result).
WindowLabel label_window_with_forecast(const StayWindow& window, const ForecastGrid& forecast,
                                       const SofaConfig& config = {},
                                       const FeatureCatalog& catalog = FeatureCatalog::builtin());

struct CorpusOptions {
    std::uint64_t seed = 0;
    SplitSizes splits;
    PreconditionPool pool = PreconditionPool::Id;
    ForecastSource forecast_source = ForecastSource::GroundTruth;
    SofaConfig sofa;
    // required when forecast_source is External; keyed by (stay, day)
    const std::map<std::pair<std::string, int>, ForecastGrid>* external_forecasts = nullptr;
};

// Deterministically shuffles the windows, assigns splits and preconditions,
// and renders prompt plus gold answer for each record. The record's `truth`
// always reflects the real prediction day; with a forecast source other than
// GroundTruth the rendered chain uses forecasted values instead.
std::vector<CorpusRecord> build_corpus(std::span<const StayWindow> windows,
                                       const CorpusOptions& options,
                                       const FeatureCatalog& catalog = FeatureCatalog::builtin());

void write_corpus(std::ostream& out, std::span<const CorpusRecord> records);
std::vector<CorpusRecord> read_corpus(std::istream& in);

// Window label serialization shared by the corpus and the label command.
std::string label_to_json(const WindowLabel& label);

} // namespace sepsikit
