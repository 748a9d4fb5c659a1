#include "keyecho/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "keyecho/error.hpp"
#include "keyecho/keylog.hpp"

namespace keyecho {

using nlohmann::json;

const char* to_string(TrialOutcome outcome) noexcept {
    switch (outcome) {
    case TrialOutcome::Predicted: return "predicted";
    case TrialOutcome::NotEnoughPeaks: return "not_enough_peaks";
    case TrialOutcome::NoCandidates: return "no_candidates";
    case TrialOutcome::CandidateExplosion: return "candidate_explosion";
    }
    return "unknown";
}

std::vector<std::string> study_words() {
    return {"work",  "love", "life", "like",  "night",  "world",  "table",
            "they",  "have", "teacher", "book", "buy",  "credit", "paper",
            "order", "mobile", "mother", "cat", "run",  "house",  "bill"};
}

namespace {

TrialRecord run_trial(const TimingModel& model, const Lexicon& lexicon, const Trial& trial,
                      const PredictSettings& settings) {
    TrialRecord rec;
    rec.true_word = trial.true_word;
    try {
        const auto result = predict(model, trial.audio, trial.true_word.size(), settings, lexicon);
        rec.words_all_count = result.words_all.size();
        rec.words_dict = result.words_dict;
        rec.truth_in_all = std::binary_search(result.words_all.begin(), result.words_all.end(),
                                              trial.true_word);
        rec.hit = std::find(rec.words_dict.begin(), rec.words_dict.end(), trial.true_word) !=
                  rec.words_dict.end();
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::NotEnoughPeaks:
        case ErrorCode::FrameTooLong:  // recording shorter than one window
            rec.outcome = TrialOutcome::NotEnoughPeaks;
            break;
        case ErrorCode::NoCandidates:
            rec.outcome = TrialOutcome::NoCandidates;
            break;
        case ErrorCode::CandidateExplosion:
            rec.outcome = TrialOutcome::CandidateExplosion;
            break;
        default:
            throw;
        }
    }
    return rec;
}

} // namespace

EvalReport run_eval(const TimingModel& model, const Lexicon& lexicon, std::span<const Trial> trials,
                    const PredictSettings& settings, unsigned jobs) {
    settings.validate();
    for (const auto& t : trials) {
        if (t.true_word.size() < 2) {
            throw Error(ErrorCode::InvalidArgument, "trial word '" + t.true_word + "' is shorter than 2");
        }
    }

    EvalReport report;
    report.settings = settings;
    report.asd_ms = model.asd_ms();
    report.lexicon_hash = lexicon.source_hash();
    report.per_trial.resize(trials.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < trials.size(); i = next++) {
            try {
                report.per_trial[i] = run_trial(model, lexicon, trials[i], settings);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned workers = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(1, trials.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::size_t hits = 0;
    std::size_t dict_total = 0;
    std::map<std::size_t, std::size_t> hits_by_length;
    for (const auto& rec : report.per_trial) {
        const auto len = rec.true_word.size();
        ++report.trials_by_length[len];
        hits_by_length[len] += rec.hit ? 1 : 0;
        hits += rec.hit ? 1 : 0;
        dict_total += rec.words_dict.size();
        switch (rec.outcome) {
        case TrialOutcome::NotEnoughPeaks: ++report.not_enough_peaks; break;
        case TrialOutcome::NoCandidates: ++report.no_candidates; break;
        case TrialOutcome::CandidateExplosion: ++report.explosions; break;
        case TrialOutcome::Predicted: break;
        }
    }
    if (!trials.empty()) {
        const auto n = static_cast<double>(trials.size());
        report.success_rate = static_cast<double>(hits) / n;
        report.ambiguity = static_cast<double>(dict_total) / n;
    }
    for (const auto& [len, count] : report.trials_by_length) {
        report.by_length[len] = static_cast<double>(hits_by_length[len]) / static_cast<double>(count);
    }
    return report;
}

json report_to_json(const EvalReport& report) {
    json trials = json::array();
    for (const auto& rec : report.per_trial) {
        trials.push_back({{"true_word", rec.true_word},
                          {"outcome", to_string(rec.outcome)},
                          {"words_all_count", rec.words_all_count},
                          {"words_dict", rec.words_dict},
                          {"truth_in_all", rec.truth_in_all},
                          {"hit", rec.hit}});
    }
    json by_length = json::array();
    for (const auto& [len, rate] : report.by_length) {
        by_length.push_back({{"length", len},
                             {"trials", report.trials_by_length.at(len)},
                             {"success", rate}});
    }
    return {{"success_rate", report.success_rate},
            {"trials", report.per_trial.size()},
            {"by_length", std::move(by_length)},
            {"asd_ms", report.asd_ms},
            {"ambiguity", report.ambiguity},
            {"failures",
             {{"not_enough_peaks", report.not_enough_peaks},
              {"no_candidates", report.no_candidates},
              {"candidate_explosion", report.explosions}}},
            {"settings", settings_to_json(report.settings)},
            {"lexicon_sha256", report.lexicon_hash},
            {"per_trial", std::move(trials)}};
}

void write_by_length_csv(std::ostream& out, const EvalReport& report) {
    out << "length,success\n";
    for (const auto& [len, rate] : report.by_length) out << len << ',' << rate << '\n';
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double mx = std::accumulate(x.begin(), x.begin() + n, 0.0) / n;
    const double my = std::accumulate(y.begin(), y.begin() + n, 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

SweepResult asd_sweep(std::span<const TypistProfile> profiles, const Lexicon& lexicon,
                      const PredictSettings& settings, const SweepConfig& config, unsigned jobs) {
    if (config.words.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs words");

    std::vector<std::string> training;
    for (std::size_t r = 0; r < config.train_reps; ++r) {
        training.insert(training.end(), config.words.begin(), config.words.end());
    }

    SweepResult result;
    for (const auto& profile : profiles) {
        const auto session = synth_session(profile, training, 0);
        const auto model = train(session_to_pairs(session.session));

        std::vector<Trial> trials;
        std::uint64_t stream = 1;
        for (std::size_t r = 0; r < config.test_reps; ++r) {
            for (const auto& word : config.words) {
                const std::string one[] = {word};
                const auto typed = synth_session(profile, one, stream);
                trials.push_back(
                    {synth_word_audio(typed.word_onsets_ms.front(), profile, config.sample_rate, stream),
                     word});
                ++stream;
            }
        }
        const auto report = run_eval(model, lexicon, trials, settings, jobs);

        double max_std = 0.0;
        for (const auto& [pair, sd] : profile.pair_stds) max_std = std::max(max_std, sd);
        result.points.push_back({max_std, model.asd_ms(), report.success_rate});
    }
    std::stable_sort(result.points.begin(), result.points.end(),
                     [](const SweepPoint& a, const SweepPoint& b) { return a.asd_ms < b.asd_ms; });

    std::vector<double> xs, ys;
    for (const auto& p : result.points) {
        xs.push_back(p.asd_ms);
        ys.push_back(p.success_rate);
    }
    result.correlation = pearson(xs, ys);
    return result;
}

json sweep_to_json(const SweepResult& sweep) {
    json points = json::array();
    for (const auto& p : sweep.points) {
        points.push_back({{"profile_std_ms", p.profile_std_ms},
                          {"asd_ms", p.asd_ms},
                          {"success_rate", p.success_rate}});
    }
    json corr = std::isnan(sweep.correlation) ? json(nullptr) : json(sweep.correlation);
    return {{"points", std::move(points)}, {"pearson", std::move(corr)}};
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "asd_ms,success_rate\n";
    for (const auto& p : sweep.points) out << p.asd_ms << ',' << p.success_rate << '\n';
}

} // namespace keyecho
