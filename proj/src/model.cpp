#include "keyecho/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "keyecho/error.hpp"

namespace keyecho {

using nlohmann::json;

const PairStats* TimingModel::find(KeyPair pair) const {
    const auto it = stats_.find(pair);
    return it == stats_.end() ? nullptr : &it->second;
}

TimingModel train(std::span<const PairObservation> pairs) {
    TimingModel model;
    model.observations_.assign(pairs.begin(), pairs.end());
    for (const auto& obs : model.observations_) {
        if (!is_letter(obs.pair.a) || !is_letter(obs.pair.b)) {
            throw Error(ErrorCode::InvalidArgument, "pair '" + obs.pair.str() + "' is not two letters");
        }
        if (!(obs.delta_ms > 0.0)) {
            throw Error(ErrorCode::NonPositiveDelta,
                        "pair " + obs.pair.str() + " has delta " + std::to_string(obs.delta_ms));
        }
    }
    std::sort(model.observations_.begin(), model.observations_.end());

    const auto& obs = model.observations_;
    double std_total = 0.0;
    std::size_t std_pairs = 0;
    for (std::size_t lo = 0; lo < obs.size();) {
        std::size_t hi = lo;
        double sum = 0.0;
        while (hi < obs.size() && obs[hi].pair == obs[lo].pair) sum += obs[hi++].delta_ms;

        const auto n = hi - lo;
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = obs[i].delta_ms - mean;
            sq += d * d;
        }
        const double std_ms = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0.0;
        model.stats_.emplace(obs[lo].pair, PairStats{obs[lo].pair, mean, std_ms, n});
        if (n > 1) {
            std_total += std_ms;
            ++std_pairs;
        }
        lo = hi;
    }
    model.asd_ms_ = std_pairs > 0 ? std_total / static_cast<double>(std_pairs) : 0.0;
    return model;
}

double tolerance(const TimingModel& model, double delta_ms, double pct, double std_coeff) {
    if (!(delta_ms > 0.0) || !(pct >= 0.0) || !(std_coeff >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance needs delta > 0, pct >= 0, coeff >= 0");
    }
    return pct * delta_ms + std_coeff * model.asd_ms();
}

std::vector<Candidate> candidates(const TimingModel& model, double delta_ms, double t_f,
                                  const LetterSet& allowed_first) {
    if (!(t_f >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
    std::vector<Candidate> out;
    if (allowed_first.empty()) return out;
    for (const auto& [pair, st] : model.stats()) {
        if (!allowed_first.contains(pair.a)) continue;
        if (st.mean_ms - t_f <= delta_ms && delta_ms <= st.mean_ms + t_f) {
            out.push_back({pair, st.mean_ms});
        }
    }
    return out;
}

json model_to_json(const TimingModel& model) {
    json observations = json::array();
    for (const auto& o : model.observations()) {
        observations.push_back({{"a", std::string(1, o.pair.a)},
                                {"b", std::string(1, o.pair.b)},
                                {"delta_ms", o.delta_ms}});
    }
    json analysis = json::array();
    for (const auto& [pair, st] : model.stats()) {
        analysis.push_back({{"a", std::string(1, pair.a)},
                            {"b", std::string(1, pair.b)},
                            {"mean_ms", st.mean_ms},
                            {"std_ms", st.std_ms},
                            {"count", st.count}});
    }
    return {{"version", kModelVersion},
            {"observations", std::move(observations)},
            {"analysis", std::move(analysis)},
            {"asd_ms", model.asd_ms()}};
}

namespace {

const json& field(const json& obj, const char* name) {
    if (!obj.is_object() || !obj.contains(name)) {
        throw Error(ErrorCode::SchemaMismatch, std::string("missing field '") + name + "'");
    }
    return obj.at(name);
}

double number_field(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_number()) throw Error(ErrorCode::SchemaMismatch, std::string("'") + name + "' is not a number");
    return v.get<double>();
}

char letter_field(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_string() || v.get_ref<const std::string&>().size() != 1 ||
        !is_letter(v.get_ref<const std::string&>()[0])) {
        throw Error(ErrorCode::SchemaMismatch, std::string("'") + name + "' is not a lowercase letter");
    }
    return v.get_ref<const std::string&>()[0];
}

} // namespace

TimingModel model_from_json(const json& doc) {
    const auto& version = field(doc, "version");
    if (!version.is_number_integer() || version.get<int>() != kModelVersion) {
        throw Error(ErrorCode::SchemaMismatch, "unsupported model version " + version.dump());
    }
    const auto& observations = field(doc, "observations");
    const auto& analysis = field(doc, "analysis");
    if (!observations.is_array() || !analysis.is_array()) {
        throw Error(ErrorCode::SchemaMismatch, "'observations' and 'analysis' must be arrays");
    }
    const double asd = number_field(doc, "asd_ms");

    std::vector<PairObservation> obs;
    obs.reserve(observations.size());
    for (const auto& row : observations) {
        obs.push_back({{letter_field(row, "a"), letter_field(row, "b")}, number_field(row, "delta_ms")});
    }
    TimingModel model;
    try {
        model = train(obs);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConsistencyFailure, "observations invalid: " + e.detail());
    }

    if (analysis.size() != model.stats().size()) {
        throw Error(ErrorCode::ConsistencyFailure,
                    "analysis lists " + std::to_string(analysis.size()) + " pairs, observations give " +
                        std::to_string(model.stats().size()));
    }
    for (const auto& row : analysis) {
        const KeyPair pair{letter_field(row, "a"), letter_field(row, "b")};
        const auto& count_field = field(row, "count");
        if (!count_field.is_number_unsigned()) {
            throw Error(ErrorCode::SchemaMismatch, "'count' is not a non-negative integer");
        }
        const PairStats stored{pair, number_field(row, "mean_ms"), number_field(row, "std_ms"),
                               count_field.get<std::size_t>()};
        const auto* derived = model.find(pair);
        if (derived == nullptr || !(*derived == stored)) {
            throw Error(ErrorCode::ConsistencyFailure,
                        "analysis row for '" + pair.str() + "' does not match its observations");
        }
    }
    if (asd != model.asd_ms()) {
        throw Error(ErrorCode::ConsistencyFailure, "asd_ms does not match the analysis");
    }
    return model;
}

void save_model(const TimingModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

TimingModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaMismatch, path.string() + ": " + e.what());
    }
    try {
        return model_from_json(doc);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

} // namespace keyecho
