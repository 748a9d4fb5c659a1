#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "keyecho/audio.hpp"
#include "keyecho/error.hpp"
#include "keyecho/eval.hpp"
#include "keyecho/keylog.hpp"
#include "keyecho/lexicon.hpp"
#include "keyecho/model.hpp"
#include "keyecho/predictor.hpp"
#include "keyecho/segmenter.hpp"
#include "keyecho/synth.hpp"

namespace keyecho::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint32_t kSynthSampleRate = 44100;
constexpr std::size_t kSynthTrainReps = 20;
constexpr double kSynthNoiseStd = 0.002;
constexpr double kSweepStds[] = {0.0, 10.0, 20.0, 40.0};

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument:
        return kExitUsage;
    case ErrorCode::FrameTooLong:
    case ErrorCode::NotEnoughPeaks:
    case ErrorCode::TooFewOnsets:
    case ErrorCode::NoCandidates:
    case ErrorCode::CandidateExplosion:
    case ErrorCode::UnknownPair:
    case ErrorCode::OnsetOutOfRange:
        return kExitPipeline;
    default:
        return kExitIo;
    }
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("keyecho", sink);
    logger->set_pattern("keyecho: %l: %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("KEYECHO_LOG"); env != nullptr && *env != '\0') {
        level = spdlog::level::from_str(env);
    }
    logger->set_level(level);
    return logger;
}

PredictSettings settings_of(const RunConfig& c) {
    PredictSettings s;
    s.frame_ms = c.frame_ms;
    s.min_gap_ms = c.min_gap_ms;
    s.tolerance_pct = c.tolerance_pct;
    s.std_coeff = c.std_coeff;
    return s;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorCode::Io, "short write to " + path.string());
}

class Runner {
public:
    Runner(RunConfig config, std::ostream& out, std::shared_ptr<spdlog::logger> log)
        : c_(std::move(config)), out_(out), log_(std::move(log)) {}

    int dispatch() {
        log_->info("config: {}", config_to_json(c_).dump());
        if (c_.command == "train") return train_cmd();
        if (c_.command == "segment") return segment_cmd();
        if (c_.command == "predict") return predict_cmd();
        if (c_.command == "synth") return synth_cmd();
        if (c_.command == "eval") return eval_cmd();
        if (c_.command == "model-inspect") return inspect_cmd();
        throw Error(ErrorCode::InvalidArgument, "unknown command " + c_.command);
    }

private:
    int train_cmd() {
        std::vector<PairObservation> pairs;
        for (const auto& path : c_.inputs) {
            const auto session = parse_keylog(fs::path(path));
            const auto more = session_to_pairs(session);
            log_->info("{}: {} events, {} pairs", path, session.events.size(), more.size());
            pairs.insert(pairs.end(), more.begin(), more.end());
        }
        const auto model = train(pairs);
        if (model.empty()) log_->warn("no letter pairs found; writing an empty model");
        save_model(model, c_.out);

        if (c_.json) {
            out_ << json{{"config", config_to_json(c_)},
                         {"pairs", model.stats().size()},
                         {"observations", model.observations().size()},
                         {"asd_ms", model.asd_ms()}}
                        .dump(2)
                 << '\n';
        } else {
            out_ << "pairs: " << model.stats().size() << '\n'
                 << "observations: " << model.observations().size() << '\n'
                 << "asd_ms: " << model.asd_ms() << '\n';
        }
        return kExitOk;
    }

    int segment_cmd() {
        const auto signal = load_wav(c_.inputs.front());
        const auto frame_len = ms_to_samples(c_.frame_ms, signal.sample_rate());
        if (frame_len == 0) throw Error(ErrorCode::InvalidArgument, "frame shorter than one sample");
        const auto onsets =
            pick_onsets(energy(signal, frame_len), c_.k, ms_to_samples(c_.min_gap_ms, signal.sample_rate()));

        json doc{{"config", config_to_json(c_)},
                 {"sample_rate", signal.sample_rate()},
                 {"frame_len", frame_len},
                 {"onsets", onsets.onsets},
                 {"deltas_ms", onsets.onsets.size() >= 2 ? json(intervals(onsets).deltas_ms) : json::array()}};

        if (!c_.out.empty()) {
            const fs::path dir = c_.out;
            ensure_dir(dir);
            std::ostringstream csv;
            write_onsets_csv(csv, onsets);
            write_text(dir / "onsets.csv", csv.str());
            const auto ranges = extract_segments(signal, onsets);
            const auto files = write_segments(signal, ranges, dir / "segments");
            write_text(dir / "segment.json", doc.dump(2) + "\n");
            log_->info("wrote {} segment files to {}", files.size(), (dir / "segments").string());
        }
        if (c_.json) {
            out_ << doc.dump(2) << '\n';
        } else if (c_.out.empty()) {
            write_onsets_csv(out_, onsets);
        } else {
            out_ << "onsets: " << onsets.onsets.size() << '\n';
        }
        return kExitOk;
    }

    int predict_cmd() {
        const auto model = load_model(c_.model);
        const auto lexicon = load_lexicon(c_.lexicon);
        const auto signal = load_wav(c_.inputs.front());
        const auto result = predict(model, signal, c_.k, settings_of(c_), lexicon);
        log_->info("{} paths, {} in lexicon", result.words_all.size(), result.words_dict.size());

        if (c_.json) {
            auto doc = result_to_json(result);
            doc["config"] = config_to_json(c_);
            doc["lexicon_sha256"] = lexicon.source_hash();
            out_ << doc.dump(2) << '\n';
        } else {
            for (const auto& w : result.words_dict) out_ << w << '\n';
        }
        return result.words_dict.empty() ? kExitEmpty : kExitOk;
    }

    TypistProfile synth_profile(const std::vector<std::string>& words) const {
        TypistProfile profile;
        if (!c_.model.empty()) {
            const auto model = load_model(c_.model);
            for (const auto& [pair, st] : model.stats()) {
                profile.pair_means[pair] = st.mean_ms;
                profile.pair_stds[pair] = st.std_ms;
            }
            profile.seed = c_.seed;
        } else {
            profile = random_profile(words, 300.0, 900.0, 0.0, c_.seed);
        }
        profile.burst_ms = c_.frame_ms;
        profile.noise_std = kSynthNoiseStd;
        return profile;
    }

    int synth_cmd() {
        const auto words = c_.inputs.empty() ? study_words() : c_.inputs;
        const auto profile = synth_profile(words);
        const fs::path dir = c_.out;
        ensure_dir(dir / "trials");

        std::vector<std::string> training;
        for (std::size_t r = 0; r < kSynthTrainReps; ++r) training.insert(training.end(), words.begin(), words.end());
        const auto train_session = synth_session(profile, training, 0);
        write_keylog(dir / "train_keylog.csv", train_session.session);

        json trials = json::array();
        std::size_t truncated = train_session.truncated;
        std::size_t drawn = train_session.intervals;
        for (std::size_t i = 0; i < words.size(); ++i) {
            const std::uint64_t stream = i + 1;
            const std::string one[] = {words[i]};
            const auto typed = synth_session(profile, one, stream);
            truncated += typed.truncated;
            drawn += typed.intervals;
            const auto audio = synth_word_audio(typed.word_onsets_ms.front(), profile, kSynthSampleRate, stream);
            char name[64];
            std::snprintf(name, sizeof name, "%03zu_%s.wav", i + 1, words[i].c_str());
            write_wav16(dir / "trials" / name, audio);

            std::vector<double> onsets = typed.word_onsets_ms.front();
            for (double& t : onsets) t += kWordPaddingMs;
            trials.push_back({{"audio", std::string("trials/") + name}, {"word", words[i]}, {"onsets_ms", onsets}});
        }

        const json truth{{"config", config_to_json(c_)},
                         {"profile",
                          {{"burst_ms", profile.burst_ms},
                           {"burst_amp", profile.burst_amp},
                           {"noise_std", profile.noise_std},
                           {"seed", profile.seed},
                           {"sample_rate", kSynthSampleRate},
                           {"source", c_.model.empty() ? "random" : "model"}}},
                         {"truncation_rate", drawn == 0 ? 0.0 : static_cast<double>(truncated) / drawn},
                         {"trials", std::move(trials)}};
        write_text(dir / "truth.json", truth.dump(2) + "\n");

        if (c_.json) {
            out_ << truth.dump(2) << '\n';
        } else {
            out_ << "words: " << words.size() << '\n' << "out: " << dir.string() << '\n';
        }
        return kExitOk;
    }

    int eval_cmd() {
        if (c_.lexicon.empty()) throw Error(ErrorCode::InvalidArgument, "eval needs --lexicon");
        const auto lexicon = load_lexicon(c_.lexicon);
        const fs::path dir = c_.out.empty() ? fs::path(".") : fs::path(c_.out);
        ensure_dir(dir);
        return c_.inputs.empty() ? sweep(lexicon, dir) : fixture_eval(lexicon, dir);
    }

    int fixture_eval(const Lexicon& lexicon, const fs::path& dir) {
        if (c_.model.empty()) throw Error(ErrorCode::InvalidArgument, "eval on a fixture needs --model");
        const auto model = load_model(c_.model);

        fs::path truth_path = c_.inputs.front();
        if (fs::is_directory(truth_path)) truth_path /= "truth.json";
        std::ifstream in(truth_path);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + truth_path.string());
        json truth;
        try {
            truth = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::SchemaMismatch, truth_path.string() + ": " + e.what());
        }
        if (!truth.contains("trials") || !truth["trials"].is_array()) {
            throw Error(ErrorCode::SchemaMismatch, truth_path.string() + ": missing 'trials' array");
        }
        std::vector<Trial> trials;
        for (const auto& t : truth["trials"]) {
            if (!t.contains("audio") || !t.contains("word") || !t["audio"].is_string() || !t["word"].is_string()) {
                throw Error(ErrorCode::SchemaMismatch, truth_path.string() + ": trial needs 'audio' and 'word'");
            }
            trials.push_back({load_wav(truth_path.parent_path() / t["audio"].get<std::string>()),
                              t["word"].get<std::string>()});
        }

        const auto report = run_eval(model, lexicon, trials, settings_of(c_), c_.jobs);
        auto doc = report_to_json(report);
        doc["config"] = config_to_json(c_);
        write_text(dir / "report.json", doc.dump(2) + "\n");
        std::ostringstream csv;
        write_by_length_csv(csv, report);
        write_text(dir / "by_length.csv", csv.str());

        if (c_.json) {
            out_ << doc.dump(2) << '\n';
        } else {
            out_ << "trials: " << report.per_trial.size() << '\n'
                 << "success_rate: " << report.success_rate << '\n'
                 << "ambiguity: " << report.ambiguity << '\n'
                 << "asd_ms: " << report.asd_ms << '\n';
        }
        return kExitOk;
    }

    int sweep(const Lexicon& lexicon, const fs::path& dir) {
        SweepConfig config;
        config.words = study_words();
        std::vector<TypistProfile> profiles;
        for (double sd : kSweepStds) {
            profiles.push_back(random_profile(config.words, 300.0, 900.0, sd, c_.seed));
            profiles.back().noise_std = kSynthNoiseStd;
            profiles.back().burst_ms = c_.frame_ms;
        }
        const auto result = asd_sweep(profiles, lexicon, settings_of(c_), config, c_.jobs);

        auto doc = sweep_to_json(result);
        doc["config"] = config_to_json(c_);
        write_text(dir / "sweep.json", doc.dump(2) + "\n");
        std::ostringstream csv;
        write_sweep_csv(csv, result);
        write_text(dir / "asd_sweep.csv", csv.str());

        if (c_.json) {
            out_ << doc.dump(2) << '\n';
        } else {
            for (const auto& p : result.points) {
                out_ << "asd_ms " << p.asd_ms << " success_rate " << p.success_rate << '\n';
            }
            out_ << "pearson " << result.correlation << '\n';
        }
        return kExitOk;
    }

    int inspect_cmd() {
        const auto model = load_model(c_.model);
        if (c_.json) {
            auto doc = model_to_json(model);
            doc.erase("observations");
            doc["config"] = config_to_json(c_);
            out_ << doc.dump(2) << '\n';
            return kExitOk;
        }
        out_ << "pair  mean_ms    std_ms     count\n";
        for (const auto& [pair, st] : model.stats()) {
            out_ << pair.str() << "    " << std::fixed << std::setprecision(3) << std::setw(9) << st.mean_ms
                 << "  " << std::setw(9) << st.std_ms << "  " << std::setw(5) << st.count << '\n';
        }
        out_ << "asd_ms: " << model.asd_ms() << '\n';
        out_.unsetf(std::ios::floatfield);
        return kExitOk;
    }

    RunConfig c_;
    std::ostream& out_;
    std::shared_ptr<spdlog::logger> log_;
};

} // namespace

json config_to_json(const RunConfig& c) {
    return {{"command", c.command},
            {"frame_ms", c.frame_ms},
            {"min_gap_ms", c.min_gap_ms},
            {"tolerance_pct", c.tolerance_pct},
            {"std_coeff", c.std_coeff},
            {"k", c.k},
            {"model", c.model},
            {"lexicon", c.lexicon},
            {"out", c.out},
            {"inputs", c.inputs},
            {"seed", c.seed},
            {"jobs", c.jobs},
            {"json", c.json}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);

    RunConfig config;
    config.jobs = std::max(1u, std::thread::hardware_concurrency());

    CLI::App app{"Recover typed words from keystroke audio using a per-user timing model", "keyecho"};
    app.require_subcommand(1);

    auto add_json = [&](CLI::App* cmd) { cmd->add_flag("--json", config.json, "Machine-readable output"); };
    auto add_segmentation = [&](CLI::App* cmd) {
        cmd->add_option("--frame-ms", config.frame_ms, "Sliding window length (ms)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--min-gap-ms", config.min_gap_ms, "Extra zeroing margin around each peak (ms)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    };
    auto add_tolerance = [&](CLI::App* cmd) {
        cmd->add_option("--tolerance-pct", config.tolerance_pct, "Relative interval tolerance")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        cmd->add_option("--std-coeff", config.std_coeff, "Multiplier on the model's average std")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    };

    auto* train_cmd = app.add_subcommand("train", "Build a timing model from keylog CSV files");
    train_cmd->add_option("keylogs", config.inputs, "Keylog CSV files")->required();
    train_cmd->add_option("--out", config.out, "Model JSON to write")->required();
    add_json(train_cmd);

    auto* segment_cmd = app.add_subcommand("segment", "Locate keystroke onsets in a recording");
    segment_cmd->add_option("audio", config.inputs, "WAV recording")->required()->expected(1);
    segment_cmd->add_option("--k", config.k, "Number of keystrokes")->required()->check(CLI::PositiveNumber);
    segment_cmd->add_option("--out", config.out, "Directory for onsets.csv and segment WAVs");
    add_segmentation(segment_cmd);
    add_json(segment_cmd);

    auto* predict_cmd = app.add_subcommand("predict", "Predict the typed word in a recording");
    predict_cmd->add_option("audio", config.inputs, "WAV recording of one word")->required()->expected(1);
    predict_cmd->add_option("--model", config.model, "Model JSON")->required();
    predict_cmd->add_option("--lexicon", config.lexicon, "Word list")->required();
    predict_cmd->add_option("--k", config.k, "Number of keystrokes")->required()->check(CLI::Range(2, 64));
    add_segmentation(predict_cmd);
    add_tolerance(predict_cmd);
    add_json(predict_cmd);

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic keylog and word recordings");
    synth_cmd->add_option("words", config.inputs, "Words to type (default: built-in study words)");
    synth_cmd->add_option("--out", config.out, "Output directory")->required();
    synth_cmd->add_option("--seed", config.seed, "RNG seed")->capture_default_str();
    synth_cmd->add_option("--model", config.model, "Take pair means/stds from this model");
    synth_cmd->add_option("--frame-ms", config.frame_ms, "Click burst length (ms)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_json(synth_cmd);

    auto* eval_cmd = app.add_subcommand(
        "eval", "Score a synth fixture, or run the ASD sweep when no fixture is given");
    eval_cmd->add_option("fixture", config.inputs, "Directory (or truth.json) written by synth")->expected(0, 1);
    eval_cmd->add_option("--model", config.model, "Model JSON (fixture mode)");
    eval_cmd->add_option("--lexicon", config.lexicon, "Word list")->required();
    eval_cmd->add_option("--out", config.out, "Report directory")->capture_default_str();
    eval_cmd->add_option("--seed", config.seed, "RNG seed (sweep mode)")->capture_default_str();
    eval_cmd->add_option("--jobs", config.jobs, "Worker threads")->check(CLI::PositiveNumber);
    add_segmentation(eval_cmd);
    add_tolerance(eval_cmd);
    add_json(eval_cmd);

    auto* inspect_cmd = app.add_subcommand("model-inspect", "Print a model's analysis table");
    inspect_cmd->add_option("--model", config.model, "Model JSON")->required();
    add_json(inspect_cmd);

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("keyecho");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "keyecho: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }
    config.command = app.get_subcommands().front()->get_name();

    try {
        return Runner(config, out, log).dispatch();
    } catch (const Error& e) {
        log->error("{}", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        log->error("internal error: {}", e.what());
        return 1;
    }
}

} // namespace keyecho::cli
