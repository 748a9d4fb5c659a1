#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyecho/audio.hpp"
#include "keyecho/lexicon.hpp"
#include "keyecho/model.hpp"
#include "keyecho/segmenter.hpp"

namespace keyecho {

/// Letter tree rooted at an empty node. Nodes live in one arena and are
/// linked first-child / next-sibling; a node's children have distinct
/// letters.
class CandidateTree {
public:
    using NodeId = std::uint32_t;
    static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
    static constexpr NodeId kRoot = 0;

    struct Node {
        char value{};
        std::uint32_t depth{};
        NodeId first_child = kNone;
        NodeId next_sibling = kNone;
    };

    CandidateTree();

    const Node& node(NodeId id) const { return nodes_.at(id); }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.front().first_child == kNone; }

    /// Word length once built: number of letters on a root-to-leaf path.
    std::size_t depth() const noexcept { return depth_; }

    NodeId find_child(NodeId parent, char letter) const;
    /// Returns the existing child with this letter, or appends a new one.
    NodeId add_child(NodeId parent, char letter);

    std::vector<NodeId> children(NodeId parent) const;

    /// Drops every branch with no leaf at `depth`, then records that depth.
    void prune(std::size_t depth);

private:
    std::vector<Node> nodes_;
    std::size_t depth_{};
};

inline constexpr std::size_t kMaxLivePaths = 10'000'000;

/// Grows the tree one interval at a time. Step i draws its candidate pairs
/// from the model with tolerance(model, delta_i, pct, std_coeff), restricted
/// to first letters reachable after step i-1 (all letters at step 1), and
/// hangs b under every depth-i node whose letter is a. Branches that never
/// reach full length are pruned at the end.
///
/// Throws NoCandidates when some step has no matching pair and
/// CandidateExplosion when a step would hold more than `max_live_paths`
/// partial words.
CandidateTree build_tree(const TimingModel& model, const IntervalSequence& deltas, double pct,
                         double std_coeff, std::size_t max_live_paths = kMaxLivePaths);

/// Root-to-leaf words in lexicographic order.
std::vector<std::string> enumerate_words(const CandidateTree& tree);

/// Stable subsequence of `words` present in the lexicon.
std::vector<std::string> filter_dictionary(std::span<const std::string> words,
                                           const Lexicon& lexicon);

struct PredictSettings {
    double frame_ms = 100.0;
    double min_gap_ms = 100.0;
    double tolerance_pct = 0.05;
    double std_coeff = 1.0;
    std::size_t max_live_paths = kMaxLivePaths;

    void validate() const;
};

nlohmann::json settings_to_json(const PredictSettings& settings);

struct PredictParams {
    std::size_t k{};
    PredictSettings settings;
    std::uint32_t sample_rate{};
    std::size_t frame_len{};
    std::size_t min_gap{};
    std::vector<double> tolerances_ms;  // t_f per interval
};

struct PredictionResult {
    std::vector<std::string> words_all;
    std::vector<std::string> words_dict;
    PredictParams params;
    std::vector<double> onsets_ms;
    std::vector<double> deltas_ms;
};

nlohmann::json result_to_json(const PredictionResult& result);

/// Segment, measure intervals, grow the tree, enumerate and filter.
/// Propagates NotEnoughPeaks, NoCandidates and CandidateExplosion.
PredictionResult predict(const TimingModel& model, const AudioSignal& signal, std::size_t k,
                         const PredictSettings& settings, const Lexicon& lexicon);

/// Tree stage only: all words consistent with the given intervals.
std::vector<std::string> predict_words(const TimingModel& model, const IntervalSequence& deltas,
                                       const PredictSettings& settings);

} // namespace keyecho
