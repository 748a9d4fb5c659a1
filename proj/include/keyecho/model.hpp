#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "keyecho/keys.hpp"

namespace keyecho {

struct PairStats {
    KeyPair pair;
    double mean_ms{};
    double std_ms{};  // sample standard deviation, 0 for a single observation
    std::size_t count{};

    bool operator==(const PairStats&) const = default;
};

struct Candidate {
    KeyPair pair;
    double mean_ms{};

    bool operator==(const Candidate&) const = default;
};

/// Per-user timing model: the raw observations and the per-pair summary
/// derived from them. The summary is always a pure function of the
/// observations, which are kept in canonical (sorted) order so that the
/// derivation is independent of input order.
class TimingModel {
public:
    TimingModel() = default;

    const std::vector<PairObservation>& observations() const noexcept { return observations_; }
    const std::map<KeyPair, PairStats>& stats() const noexcept { return stats_; }
    /// Mean of std_ms over pairs seen at least twice; 0 when there are none.
    double asd_ms() const noexcept { return asd_ms_; }

    const PairStats* find(KeyPair pair) const;
    bool empty() const noexcept { return stats_.empty(); }

    bool operator==(const TimingModel&) const = default;

private:
    friend TimingModel train(std::span<const PairObservation> pairs);

    std::vector<PairObservation> observations_;
    std::map<KeyPair, PairStats> stats_;
    double asd_ms_{};
};

/// Throws NonPositiveDelta on any delta <= 0 and InvalidArgument on a
/// non-letter key.
TimingModel train(std::span<const PairObservation> pairs);

/// pct * delta_ms + std_coeff * asd_ms.
double tolerance(const TimingModel& model, double delta_ms, double pct, double std_coeff);

/// Every pair with a in `allowed_first` and mean - t_f <= delta <= mean + t_f,
/// ordered by (a, b).
std::vector<Candidate> candidates(const TimingModel& model, double delta_ms, double t_f,
                                  const LetterSet& allowed_first);

inline constexpr int kModelVersion = 1;

nlohmann::json model_to_json(const TimingModel& model);
/// Throws SchemaMismatch for a missing/ill-typed field or wrong version and
/// ConsistencyFailure when the stored analysis or ASD differ from what the
/// observations produce.
TimingModel model_from_json(const nlohmann::json& doc);

void save_model(const TimingModel& model, const std::filesystem::path& path);
TimingModel load_model(const std::filesystem::path& path);

} // namespace keyecho
