#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyecho/audio.hpp"
#include "keyecho/lexicon.hpp"
#include "keyecho/model.hpp"
#include "keyecho/predictor.hpp"
#include "keyecho/synth.hpp"

namespace keyecho {

struct Trial {
    AudioSignal audio;
    std::string true_word;
};

enum class TrialOutcome { Predicted, NotEnoughPeaks, NoCandidates, CandidateExplosion };

const char* to_string(TrialOutcome outcome) noexcept;

struct TrialRecord {
    std::string true_word;
    TrialOutcome outcome = TrialOutcome::Predicted;
    std::size_t words_all_count{};
    std::vector<std::string> words_dict;
    bool truth_in_all{};  // true word among the unfiltered paths
    bool hit{};           // true word among the dictionary survivors
};

struct EvalReport {
    std::vector<TrialRecord> per_trial;
    double success_rate{};
    std::map<std::size_t, double> by_length;
    std::map<std::size_t, std::size_t> trials_by_length;
    double asd_ms{};
    double ambiguity{};  // mean |words_dict| over all trials
    std::size_t not_enough_peaks{};
    std::size_t no_candidates{};
    std::size_t explosions{};
    PredictSettings settings;
    std::string lexicon_hash;
};

/// Predicts every trial (k = word length) and aggregates. Pipeline failures
/// are recorded as misses, never raised. `jobs` workers pull trials from a
/// shared index; aggregation runs afterwards in trial order.
EvalReport run_eval(const TimingModel& model, const Lexicon& lexicon, std::span<const Trial> trials,
                    const PredictSettings& settings, unsigned jobs = 1);

nlohmann::json report_to_json(const EvalReport& report);
void write_by_length_csv(std::ostream& out, const EvalReport& report);

/// Pearson correlation. NaN when x has no variance (or fewer than two
/// points); 0 when only y is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct SweepConfig {
    std::vector<std::string> words;
    std::size_t train_reps = 30;  // times each word is typed for training
    std::size_t test_reps = 10;   // test recordings per word
    std::uint32_t sample_rate = 16000;
};

struct SweepPoint {
    double profile_std_ms{};  // largest std in the profile
    double asd_ms{};
    double success_rate{};
};

struct SweepResult {
    std::vector<SweepPoint> points;  // ascending asd_ms
    double correlation{};
};

/// For each profile: train a model on synthetic sessions, evaluate it on
/// fresh synthetic recordings, and collect (ASD, success rate).
SweepResult asd_sweep(std::span<const TypistProfile> profiles, const Lexicon& lexicon,
                      const PredictSettings& settings, const SweepConfig& config,
                      unsigned jobs = 1);

nlohmann::json sweep_to_json(const SweepResult& sweep);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

/// Words used throughout the synthetic evaluations: common English words of
/// three to seven letters.
std::vector<std::string> study_words();

} // namespace keyecho
