#include "keyecho/predictor.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "keyecho/error.hpp"

namespace keyecho {

using nlohmann::json;

CandidateTree::CandidateTree() { nodes_.push_back(Node{}); }

CandidateTree::NodeId CandidateTree::find_child(NodeId parent, char letter) const {
    for (NodeId c = nodes_.at(parent).first_child; c != kNone; c = nodes_[c].next_sibling) {
        if (nodes_[c].value == letter) return c;
    }
    return kNone;
}

CandidateTree::NodeId CandidateTree::add_child(NodeId parent, char letter) {
    if (const NodeId existing = find_child(parent, letter); existing != kNone) return existing;
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{letter, nodes_[parent].depth + 1, kNone, nodes_[parent].first_child});
    nodes_[parent].first_child = id;
    return id;
}

std::vector<CandidateTree::NodeId> CandidateTree::children(NodeId parent) const {
    std::vector<NodeId> out;
    for (NodeId c = nodes_.at(parent).first_child; c != kNone; c = nodes_[c].next_sibling) {
        out.push_back(c);
    }
    return out;
}

void CandidateTree::prune(std::size_t depth) {
    // Children always have larger ids than their parent, so a reverse sweep
    // sees every subtree before its root.
    std::vector<char> alive(nodes_.size(), 0);
    for (std::size_t id = nodes_.size(); id-- > 1;) {
        if (nodes_[id].depth == depth) {
            alive[id] = 1;
            continue;
        }
        for (NodeId c = nodes_[id].first_child; c != kNone; c = nodes_[c].next_sibling) {
            if (alive[c]) {
                alive[id] = 1;
                break;
            }
        }
    }

    std::vector<Node> kept;
    kept.reserve(nodes_.size());
    kept.push_back(Node{});
    // (old id, new parent id)
    std::vector<std::pair<NodeId, NodeId>> stack;
    for (NodeId c = nodes_[kRoot].first_child; c != kNone; c = nodes_[c].next_sibling) {
        if (alive[c]) stack.emplace_back(c, kRoot);
    }
    while (!stack.empty()) {
        const auto [old_id, parent] = stack.back();
        stack.pop_back();
        const auto id = static_cast<NodeId>(kept.size());
        const Node& src = nodes_[old_id];
        kept.push_back(Node{src.value, src.depth, kNone, kept[parent].first_child});
        kept[parent].first_child = id;
        for (NodeId c = src.first_child; c != kNone; c = nodes_[c].next_sibling) {
            if (alive[c]) stack.emplace_back(c, id);
        }
    }
    nodes_ = std::move(kept);
    depth_ = depth;
}

CandidateTree build_tree(const TimingModel& model, const IntervalSequence& deltas, double pct,
                         double std_coeff, std::size_t max_live_paths) {
    if (deltas.deltas_ms.empty()) {
        throw Error(ErrorCode::InvalidArgument, "need at least one interval");
    }
    using NodeId = CandidateTree::NodeId;
    CandidateTree tree;
    std::array<std::vector<NodeId>, kAlphabetSize> frontier;
    LetterSet allowed = LetterSet::all();

    for (std::size_t i = 0; i < deltas.deltas_ms.size(); ++i) {
        const double delta = deltas.deltas_ms[i];
        const double t_f = tolerance(model, delta, pct, std_coeff);
        const auto step = candidates(model, delta, t_f, allowed);
        if (step.empty()) {
            throw Error(ErrorCode::NoCandidates, "no model pair within " + std::to_string(t_f) +
                                                     " ms of interval " + std::to_string(i + 1) +
                                                     " (" + std::to_string(delta) + " ms)");
        }

        std::array<std::vector<NodeId>, kAlphabetSize> next;
        std::size_t live = 0;
        for (const auto& c : step) {
            if (i == 0) {
                const NodeId first = tree.add_child(CandidateTree::kRoot, c.pair.a);
                next[letter_index(c.pair.b)].push_back(tree.add_child(first, c.pair.b));
                ++live;
                continue;
            }
            const auto& parents = frontier[letter_index(c.pair.a)];
            if (live + parents.size() > max_live_paths) {
                throw Error(ErrorCode::CandidateExplosion,
                            "more than " + std::to_string(max_live_paths) + " partial words at letter " +
                                std::to_string(i + 2));
            }
            for (NodeId parent : parents) {
                next[letter_index(c.pair.b)].push_back(tree.add_child(parent, c.pair.b));
            }
            live += parents.size();
        }

        allowed = LetterSet{};
        for (int l = 0; l < kAlphabetSize; ++l) {
            if (!next[l].empty()) allowed.insert(letter_at(l));
        }
        frontier = std::move(next);
    }
    tree.prune(deltas.deltas_ms.size() + 1);
    return tree;
}

std::vector<std::string> enumerate_words(const CandidateTree& tree) {
    std::vector<std::string> words;
    if (tree.empty()) return words;

    std::string prefix;
    auto walk = [&](auto&& self, CandidateTree::NodeId id) -> void {
        const auto& node = tree.node(id);
        if (id != CandidateTree::kRoot) prefix.push_back(node.value);
        if (node.first_child == CandidateTree::kNone) {
            if (node.depth == tree.depth()) words.push_back(prefix);
        } else {
            for (auto c = node.first_child; c != CandidateTree::kNone; c = tree.node(c).next_sibling) {
                self(self, c);
            }
        }
        if (id != CandidateTree::kRoot) prefix.pop_back();
    };
    walk(walk, CandidateTree::kRoot);

    std::sort(words.begin(), words.end());
    if (std::adjacent_find(words.begin(), words.end()) != words.end()) {
        throw std::logic_error("candidate tree holds a duplicate path");
    }
    return words;
}

std::vector<std::string> filter_dictionary(std::span<const std::string> words,
                                           const Lexicon& lexicon) {
    std::vector<std::string> out;
    std::copy_if(words.begin(), words.end(), std::back_inserter(out),
                 [&](const std::string& w) { return lexicon.contains(w); });
    return out;
}

void PredictSettings::validate() const {
    if (!(frame_ms > 0.0)) throw Error(ErrorCode::InvalidArgument, "frame_ms must be > 0");
    if (!(min_gap_ms >= 0.0)) throw Error(ErrorCode::InvalidArgument, "min_gap_ms must be >= 0");
    if (!(tolerance_pct >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance_pct must be >= 0");
    if (!(std_coeff >= 0.0)) throw Error(ErrorCode::InvalidArgument, "std_coeff must be >= 0");
    if (max_live_paths == 0) throw Error(ErrorCode::InvalidArgument, "max_live_paths must be > 0");
}

json settings_to_json(const PredictSettings& s) {
    return {{"frame_ms", s.frame_ms},
            {"min_gap_ms", s.min_gap_ms},
            {"tolerance_pct", s.tolerance_pct},
            {"std_coeff", s.std_coeff},
            {"max_live_paths", s.max_live_paths}};
}

json result_to_json(const PredictionResult& r) {
    json params = settings_to_json(r.params.settings);
    params["k"] = r.params.k;
    params["sample_rate"] = r.params.sample_rate;
    params["frame_len"] = r.params.frame_len;
    params["min_gap"] = r.params.min_gap;
    params["tolerances_ms"] = r.params.tolerances_ms;
    return {{"words_all", r.words_all},
            {"words_dict", r.words_dict},
            {"params", std::move(params)},
            {"onsets_ms", r.onsets_ms},
            {"deltas_ms", r.deltas_ms}};
}

std::vector<std::string> predict_words(const TimingModel& model, const IntervalSequence& deltas,
                                       const PredictSettings& settings) {
    settings.validate();
    const auto tree = build_tree(model, deltas, settings.tolerance_pct, settings.std_coeff,
                                 settings.max_live_paths);
    return enumerate_words(tree);
}

PredictionResult predict(const TimingModel& model, const AudioSignal& signal, std::size_t k,
                         const PredictSettings& settings, const Lexicon& lexicon) {
    settings.validate();
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");

    PredictionResult result;
    auto& p = result.params;
    p.k = k;
    p.settings = settings;
    p.sample_rate = signal.sample_rate();
    p.frame_len = ms_to_samples(settings.frame_ms, signal.sample_rate());
    p.min_gap = ms_to_samples(settings.min_gap_ms, signal.sample_rate());
    if (p.frame_len == 0) {
        throw Error(ErrorCode::InvalidArgument, "frame_ms is shorter than one sample");
    }

    const auto onsets = pick_onsets(energy(signal, p.frame_len), k, p.min_gap);
    const auto deltas = intervals(onsets);
    for (std::size_t i = 0; i < onsets.onsets.size(); ++i) result.onsets_ms.push_back(onsets.onset_ms(i));
    result.deltas_ms = deltas.deltas_ms;
    for (double d : deltas.deltas_ms) {
        p.tolerances_ms.push_back(tolerance(model, d, settings.tolerance_pct, settings.std_coeff));
    }

    result.words_all = predict_words(model, deltas, settings);
    result.words_dict = filter_dictionary(result.words_all, lexicon);
    return result;
}

} // namespace keyecho
