#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lectometer/error.hpp"
#include "lectometer/fusion.hpp"
#include "lectometer/stats.hpp"
#include "lectometer/types.hpp"

namespace lecto {

// Binary quality classes. low orders before high so tie-breaking toward the
// lower quality falls out of operator<.
enum class QualityLabel { low, high };

std::string_view to_string(QualityLabel v);

// 1..2 -> low, 3..4 -> high; anything else is out of range.
QualityLabel binarize_likert(int rating);

// Most frequent value; ties go to the smallest. Rejects empty input.
template <typename T>
T prevailing_mode(const std::vector<T>& values) {
    if (values.empty()) throw ValidationError("mode of an empty value list");
    std::map<T, std::size_t> counts;
    for (const T& v : values) ++counts[v];
    const T* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [value, count] : counts) {
        if (count > best_count) {  // map iterates ascending, so ties keep the smaller value
            best = &value;
            best_count = count;
        }
    }
    return *best;
}

struct GroundTruth {
    struct FrameTruth {
        QualityLabel expression = QualityLabel::low;
        QualityLabel activity = QualityLabel::low;
        QualityLabel hand = QualityLabel::low;
        QualityLabel head = QualityLabel::low;
        int overall = 1;  // prevailing mode of the raw 1..4 ratings
    };
    struct AudioTruth {
        QualityLabel speech = QualityLabel::low;
    };
    std::map<std::string, FrameTruth> frames;  // by item_id
    std::map<std::string, AudioTruth> audio;
};

// Per item: binarize each annotator's rating, then take the prevailing mode.
// The overall column keeps the raw scale. Every annotator must have rated
// every item of the table they appear in.
GroundTruth build_ground_truth(const AnnotationSet& annotations);

enum class RatingField { expression, activity, hand, head, overall, speech };

struct LooResult {
    std::vector<std::string> annotators;  // sorted
    std::vector<double> maes;             // aligned with annotators
    double mean = 0.0;
};

// Leave-one-out agreement: each annotator is compared against the prevailing
// mode of the others. The overall field uses the raw 1..4 values; the
// modality fields compare binarized ratings as 0/1.
LooResult loo_agreement(const AnnotationSet& annotations, RatingField field);

// Machine totals (0..5) mapped onto the annotators' 1..4 scale:
// 0 -> 1, {1,2} -> 2, {3,4} -> 3, 5 -> 4.
int machine_total_to_likert(int total);

// Machine outputs aligned to annotation item ids.
struct MachinePredictions {
    struct FrameItem {
        ModalityScores parts;  // expression/activity/pose/hand used here
        int total = 0;         // 0..5
    };
    std::map<std::string, FrameItem> frames;
    std::map<std::string, int> audio_speech;  // item_id -> 0/1
};

struct ComparisonRow {
    std::string modality;
    double human_mae = 0.0;
    double human_sd = 0.0;
    double machine_mae = 0.0;
    double machine_sd = 0.0;
    double chi2_stat = 0.0;
    int chi2_dof = 0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool significant = false;
};

// Compares absolute error distributions (human pooled over annotators vs
// machine) per modality against the consensus ground truth. The chi-square
// contingency is group x distinct-error-value; when both groups share a
// single error value the distributions are identical and p is 1. p-values
// are Holm-adjusted across the emitted rows.
std::vector<ComparisonRow> compare_human_machine(const MachinePredictions& machine,
                                                 const AnnotationSet& annotations,
                                                 const GroundTruth& truth,
                                                 double alpha);

struct ModalityEvaluation {
    ConfusionMatrix matrix;
    MetricSuite metrics;
};

struct Evaluation {
    double alpha = 0.05;
    // Binary modalities keyed expression/activity/pose/hand/speech, plus
    // score_frame on the mapped 1..4 scale.
    std::map<std::string, ModalityEvaluation> modalities;
    double score_frame_mae = 0.0;  // mapped machine score vs overall truth
    std::map<std::string, LooResult> loo;  // keyed by rating field name
    std::vector<ComparisonRow> comparison;
};

Evaluation evaluate(const MachinePredictions& machine, const AnnotationSet& annotations,
                    double alpha);

nlohmann::json evaluation_to_json(const Evaluation& ev);
std::string evaluation_text(const Evaluation& ev);

}  // namespace lecto
