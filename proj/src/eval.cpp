#include "lectometer/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "lectometer/error.hpp"

using nlohmann::json;

namespace lecto {

std::string_view to_string(QualityLabel v) {
    return v == QualityLabel::high ? "high" : "low";
}

QualityLabel binarize_likert(int rating) {
    if (rating < 1 || rating > 4)
        throw ValidationError("rating " + std::to_string(rating) + " out of range 1..4");
    return rating <= 2 ? QualityLabel::low : QualityLabel::high;
}

namespace {

int frame_rating(const FrameAnnotation& a, RatingField field) {
    switch (field) {
        case RatingField::expression: return a.expression;
        case RatingField::activity: return a.activity;
        case RatingField::hand: return a.hand;
        case RatingField::head: return a.head;
        case RatingField::overall: return a.overall;
        default: throw ValidationError("speech is not a frame rating field");
    }
}

std::string_view field_name(RatingField field) {
    switch (field) {
        case RatingField::expression: return "expression";
        case RatingField::activity: return "activity";
        case RatingField::hand: return "hand";
        case RatingField::head: return "head";
        case RatingField::overall: return "overall";
        case RatingField::speech: return "speech";
    }
    return "";
}

// item -> annotator -> rating, plus the sorted key sets. Used by both the
// consensus and the leave-one-out paths.
struct RatingGrid {
    std::vector<std::string> annotators;
    std::vector<std::string> items;
    std::map<std::string, std::map<std::string, int>> by_item;
};

RatingGrid grid_for_field(const AnnotationSet& ann, RatingField field) {
    RatingGrid g;
    std::set<std::string> annotators, items;
    if (field == RatingField::speech) {
        for (const AudioAnnotation& a : ann.audio_items) {
            annotators.insert(a.annotator_id);
            items.insert(a.item_id);
            g.by_item[a.item_id][a.annotator_id] = a.speech;
        }
    } else {
        for (const FrameAnnotation& a : ann.frame_items) {
            annotators.insert(a.annotator_id);
            items.insert(a.item_id);
            g.by_item[a.item_id][a.annotator_id] = frame_rating(a, field);
        }
    }
    g.annotators.assign(annotators.begin(), annotators.end());
    g.items.assign(items.begin(), items.end());
    return g;
}

void require_complete(const RatingGrid& g, RatingField field) {
    for (const std::string& item : g.items) {
        const auto& ratings = g.by_item.at(item);
        for (const std::string& annotator : g.annotators) {
            if (ratings.find(annotator) == ratings.end())
                throw ValidationError("annotator \"" + annotator + "\" has no " +
                                      std::string(field_name(field)) + " rating for item \"" +
                                      item + "\"");
        }
    }
}

QualityLabel mode_binarized(const std::map<std::string, int>& ratings) {
    std::vector<QualityLabel> labels;
    labels.reserve(ratings.size());
    for (const auto& [annotator, rating] : ratings) labels.push_back(binarize_likert(rating));
    return prevailing_mode(labels);
}

struct ErrorSamples {
    std::vector<double> human;   // pooled over annotators
    std::vector<double> machine;  // one per item
};

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double sum = 0.0;
    for (double x : v) sum += (x - m) * (x - m);
    return std::sqrt(sum / static_cast<double>(v.size() - 1));
}

// Group x distinct-error-value table. Identical single-valued distributions
// cannot be tested for independence; they agree by construction, so p is 1.
ChiSquareResult error_chi_square(const ErrorSamples& samples) {
    std::set<double> values(samples.human.begin(), samples.human.end());
    values.insert(samples.machine.begin(), samples.machine.end());
    if (values.size() < 2) return ChiSquareResult{0.0, 0, 1.0};

    std::vector<double> columns(values.begin(), values.end());
    std::vector<std::vector<std::int64_t>> table(2,
                                                 std::vector<std::int64_t>(columns.size(), 0));
    auto column_of = [&](double v) {
        return static_cast<size_t>(
            std::find(columns.begin(), columns.end(), v) - columns.begin());
    };
    for (double v : samples.human) ++table[0][column_of(v)];
    for (double v : samples.machine) ++table[1][column_of(v)];
    return chi_square_independence(table);
}

}  // namespace

GroundTruth build_ground_truth(const AnnotationSet& annotations) {
    if (annotations.frame_items.empty() && annotations.audio_items.empty())
        throw ValidationError("annotation set is empty");

    GroundTruth truth;
    if (!annotations.frame_items.empty()) {
        std::map<std::string, std::vector<const FrameAnnotation*>> by_item;
        for (const FrameAnnotation& a : annotations.frame_items)
            by_item[a.item_id].push_back(&a);
        for (const auto& [item, rows] : by_item) {
            GroundTruth::FrameTruth t;
            std::vector<QualityLabel> expr, act, hand, head;
            std::vector<int> overall;
            for (const FrameAnnotation* a : rows) {
                expr.push_back(binarize_likert(a->expression));
                act.push_back(binarize_likert(a->activity));
                hand.push_back(binarize_likert(a->hand));
                head.push_back(binarize_likert(a->head));
                overall.push_back(a->overall);
            }
            t.expression = prevailing_mode(expr);
            t.activity = prevailing_mode(act);
            t.hand = prevailing_mode(hand);
            t.head = prevailing_mode(head);
            t.overall = prevailing_mode(overall);
            truth.frames[item] = t;
        }
    }
    if (!annotations.audio_items.empty()) {
        std::map<std::string, std::map<std::string, int>> by_item;
        for (const AudioAnnotation& a : annotations.audio_items)
            by_item[a.item_id][a.annotator_id] = a.speech;
        for (const auto& [item, ratings] : by_item)
            truth.audio[item] = GroundTruth::AudioTruth{mode_binarized(ratings)};
    }
    return truth;
}

LooResult loo_agreement(const AnnotationSet& annotations, RatingField field) {
    RatingGrid g = grid_for_field(annotations, field);
    if (g.annotators.size() < 2)
        throw ValidationError("leave-one-out agreement needs at least 2 annotators");
    if (g.items.empty()) throw ValidationError("leave-one-out agreement needs at least one item");
    require_complete(g, field);

    const bool raw_scale = field == RatingField::overall;
    LooResult r;
    r.annotators = g.annotators;
    for (const std::string& held_out : g.annotators) {
        double sum = 0.0;
        for (const std::string& item : g.items) {
            const auto& ratings = g.by_item.at(item);
            std::vector<int> others;
            int own = 0;
            for (const auto& [annotator, rating] : ratings) {
                const int v = raw_scale
                                  ? rating
                                  : (binarize_likert(rating) == QualityLabel::high ? 1 : 0);
                if (annotator == held_out)
                    own = v;
                else
                    others.push_back(v);
            }
            sum += std::fabs(static_cast<double>(own - prevailing_mode(others)));
        }
        r.maes.push_back(sum / static_cast<double>(g.items.size()));
    }
    r.mean = mean_of(r.maes);
    return r;
}

int machine_total_to_likert(int total) {
    switch (total) {
        case 0: return 1;
        case 1:
        case 2: return 2;
        case 3:
        case 4: return 3;
        case 5: return 4;
        default:
            throw ValidationError("frame total " + std::to_string(total) + " out of range 0..5");
    }
}

std::vector<ComparisonRow> compare_human_machine(const MachinePredictions& machine,
                                                 const AnnotationSet& annotations,
                                                 const GroundTruth& truth, double alpha) {
    if (truth.frames.empty()) throw ValidationError("ground truth has no frame items");

    std::vector<std::string> unmatched;
    for (const auto& [item, t] : truth.frames)
        if (machine.frames.find(item) == machine.frames.end()) unmatched.push_back(item);
    for (const auto& [item, t] : truth.audio)
        if (machine.audio_speech.find(item) == machine.audio_speech.end())
            unmatched.push_back(item);
    if (!unmatched.empty()) {
        std::string msg = "machine predictions missing for items:";
        for (const std::string& id : unmatched) msg += " " + id;
        throw ValidationError(msg);
    }

    auto binary = [](QualityLabel v) { return v == QualityLabel::high ? 1.0 : 0.0; };

    auto frame_samples = [&](RatingField field, auto machine_part) {
        ErrorSamples s;
        for (const auto& [item, t] : truth.frames) {
            const double gt = binary([&] {
                switch (field) {
                    case RatingField::expression: return t.expression;
                    case RatingField::activity: return t.activity;
                    case RatingField::hand: return t.hand;
                    default: return t.head;
                }
            }());
            s.machine.push_back(
                std::fabs(static_cast<double>(machine_part(machine.frames.at(item))) - gt));
        }
        for (const FrameAnnotation& a : annotations.frame_items) {
            auto it = truth.frames.find(a.item_id);
            if (it == truth.frames.end()) continue;
            const GroundTruth::FrameTruth& t = it->second;
            QualityLabel label;
            int rating;
            switch (field) {
                case RatingField::expression: label = t.expression; rating = a.expression; break;
                case RatingField::activity: label = t.activity; rating = a.activity; break;
                case RatingField::hand: label = t.hand; rating = a.hand; break;
                default: label = t.head; rating = a.head; break;
            }
            s.human.push_back(std::fabs(
                binary(binarize_likert(rating)) - binary(label)));
        }
        return s;
    };

    struct Pending {
        std::string name;
        ErrorSamples samples;
    };
    std::vector<Pending> pending;
    pending.push_back({"facial_expressions",
                       frame_samples(RatingField::expression,
                                     [](const MachinePredictions::FrameItem& f) {
                                         return f.parts.expression;
                                     })});
    pending.push_back({"activity_detection",
                       frame_samples(RatingField::activity,
                                     [](const MachinePredictions::FrameItem& f) {
                                         return f.parts.activity;
                                     })});
    if (!truth.audio.empty()) {
        ErrorSamples s;
        for (const auto& [item, t] : truth.audio) {
            const double gt = binary(t.speech);
            s.machine.push_back(
                std::fabs(static_cast<double>(machine.audio_speech.at(item)) - gt));
        }
        for (const AudioAnnotation& a : annotations.audio_items) {
            auto it = truth.audio.find(a.item_id);
            if (it == truth.audio.end()) continue;
            s.human.push_back(
                std::fabs(binary(binarize_likert(a.speech)) - binary(it->second.speech)));
        }
        pending.push_back({"speech_recognition", std::move(s)});
    }
    pending.push_back({"hand_movements",
                       frame_samples(RatingField::hand,
                                     [](const MachinePredictions::FrameItem& f) {
                                         return f.parts.hand;
                                     })});
    pending.push_back({"facial_pose",
                       frame_samples(RatingField::head,
                                     [](const MachinePredictions::FrameItem& f) {
                                         return f.parts.pose;
                                     })});
    {
        ErrorSamples s;
        for (const auto& [item, t] : truth.frames) {
            const int mapped = machine_total_to_likert(machine.frames.at(item).total);
            s.machine.push_back(std::fabs(static_cast<double>(mapped - t.overall)));
        }
        for (const FrameAnnotation& a : annotations.frame_items) {
            auto it = truth.frames.find(a.item_id);
            if (it == truth.frames.end()) continue;
            s.human.push_back(std::fabs(static_cast<double>(a.overall - it->second.overall)));
        }
        pending.push_back({"score_per_frame", std::move(s)});
    }

    std::vector<ComparisonRow> rows;
    std::vector<double> p_raw;
    for (Pending& p : pending) {
        ComparisonRow row;
        row.modality = p.name;
        row.human_mae = mean_of(p.samples.human);
        row.human_sd = sample_sd(p.samples.human);
        row.machine_mae = mean_of(p.samples.machine);
        row.machine_sd = sample_sd(p.samples.machine);
        const ChiSquareResult chi = error_chi_square(p.samples);
        row.chi2_stat = chi.stat;
        row.chi2_dof = chi.dof;
        row.p_raw = chi.p;
        rows.push_back(std::move(row));
        p_raw.push_back(chi.p);
    }

    const HolmResult holm = holm_bonferroni(p_raw, alpha);
    for (size_t i = 0; i < rows.size(); ++i) {
        rows[i].p_adjusted = holm.adjusted[i];
        rows[i].significant = holm.reject[i];
    }
    return rows;
}

Evaluation evaluate(const MachinePredictions& machine, const AnnotationSet& annotations,
                    double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");

    const GroundTruth truth = build_ground_truth(annotations);
    Evaluation ev;
    ev.alpha = alpha;
    ev.comparison = compare_human_machine(machine, annotations, truth, alpha);

    const std::vector<std::string> binary_classes{"high", "low"};
    auto binary_modality = [&](const char* key, auto machine_value, auto truth_value) {
        std::vector<std::string> pred, actual;
        for (const auto& [item, t] : truth.frames) {
            pred.push_back(machine_value(machine.frames.at(item)) == 1 ? "high" : "low");
            actual.push_back(std::string(to_string(truth_value(t))));
        }
        ModalityEvaluation me;
        me.matrix = confusion(pred, actual, binary_classes);
        me.metrics = metric_suite(me.matrix);
        ev.modalities[key] = std::move(me);
    };
    binary_modality(
        "expression",
        [](const MachinePredictions::FrameItem& f) { return f.parts.expression; },
        [](const GroundTruth::FrameTruth& t) { return t.expression; });
    binary_modality(
        "activity", [](const MachinePredictions::FrameItem& f) { return f.parts.activity; },
        [](const GroundTruth::FrameTruth& t) { return t.activity; });
    binary_modality(
        "hand", [](const MachinePredictions::FrameItem& f) { return f.parts.hand; },
        [](const GroundTruth::FrameTruth& t) { return t.hand; });
    binary_modality(
        "pose", [](const MachinePredictions::FrameItem& f) { return f.parts.pose; },
        [](const GroundTruth::FrameTruth& t) { return t.head; });

    if (!truth.audio.empty()) {
        std::vector<std::string> pred, actual;
        for (const auto& [item, t] : truth.audio) {
            pred.push_back(machine.audio_speech.at(item) == 1 ? "high" : "low");
            actual.push_back(std::string(to_string(t.speech)));
        }
        ModalityEvaluation me;
        me.matrix = confusion(pred, actual, binary_classes);
        me.metrics = metric_suite(me.matrix);
        ev.modalities["speech"] = std::move(me);
    }

    {
        const std::vector<std::string> classes{"1", "2", "3", "4"};
        std::vector<std::string> pred, actual;
        std::vector<double> pred_v, actual_v;
        for (const auto& [item, t] : truth.frames) {
            const int mapped = machine_total_to_likert(machine.frames.at(item).total);
            pred.push_back(std::to_string(mapped));
            actual.push_back(std::to_string(t.overall));
            pred_v.push_back(mapped);
            actual_v.push_back(t.overall);
        }
        ModalityEvaluation me;
        me.matrix = confusion(pred, actual, classes);
        me.metrics = metric_suite(me.matrix);
        ev.modalities["score_frame"] = std::move(me);
        ev.score_frame_mae = mean_absolute_error(pred_v, actual_v);
    }

    for (RatingField field : {RatingField::expression, RatingField::activity, RatingField::hand,
                              RatingField::head, RatingField::overall}) {
        ev.loo[std::string(field_name(field))] = loo_agreement(annotations, field);
    }
    if (!annotations.audio_items.empty())
        ev.loo["speech"] = loo_agreement(annotations, RatingField::speech);
    return ev;
}

nlohmann::json evaluation_to_json(const Evaluation& ev) {
    json j;
    j["config"] = json{{"alpha", ev.alpha}};
    json modalities;
    for (const auto& [key, me] : ev.modalities) {
        json m;
        m["confusion"] = json{{"classes", me.matrix.classes}, {"counts", me.matrix.counts}};
        m["metrics"] = json{{"accuracy", me.metrics.accuracy},
                            {"recall_weighted", me.metrics.recall_weighted},
                            {"precision_weighted", me.metrics.precision_weighted},
                            {"f1_weighted", me.metrics.f1_weighted},
                            {"mcc", me.metrics.mcc},
                            {"kappa", me.metrics.kappa},
                            {"error", me.metrics.error}};
        if (key == "score_frame") m["mae"] = ev.score_frame_mae;
        modalities[key] = std::move(m);
    }
    j["modalities"] = std::move(modalities);
    json loo;
    for (const auto& [field, r] : ev.loo) {
        json per;
        for (size_t i = 0; i < r.annotators.size(); ++i) per[r.annotators[i]] = r.maes[i];
        loo[field] = json{{"per_annotator", std::move(per)}, {"mean", r.mean}};
    }
    j["loo"] = std::move(loo);
    json rows = json::array();
    for (const ComparisonRow& row : ev.comparison) {
        rows.push_back(json{{"modality", row.modality},
                            {"human_mae", row.human_mae},
                            {"human_sd", row.human_sd},
                            {"machine_mae", row.machine_mae},
                            {"machine_sd", row.machine_sd},
                            {"chi2_stat", row.chi2_stat},
                            {"chi2_dof", row.chi2_dof},
                            {"p_raw", row.p_raw},
                            {"p_adjusted", row.p_adjusted},
                            {"significant", row.significant}});
    }
    j["comparison"] = std::move(rows);
    return j;
}

std::string evaluation_text(const Evaluation& ev) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    out << "metrics (machine vs consensus)\n";
    out << "  modality     accuracy precision recall  f1      mcc     kappa   error\n";
    for (const auto& [key, me] : ev.modalities) {
        out << "  " << std::left << std::setw(12) << key << std::right << ' ' << std::setw(8)
            << me.metrics.accuracy << ' ' << std::setw(9) << me.metrics.precision_weighted << ' '
            << std::setw(7) << me.metrics.recall_weighted << ' ' << std::setw(7)
            << me.metrics.f1_weighted << ' ' << std::setw(7) << me.metrics.mcc << ' '
            << std::setw(7) << me.metrics.kappa << ' ' << std::setw(7) << me.metrics.error
            << '\n';
    }
    out << "  score_frame mae: " << ev.score_frame_mae << "\n\n";
    out << "leave-one-out agreement (mean absolute error per held-out annotator)\n";
    for (const auto& [field, r] : ev.loo) out << "  " << std::left << std::setw(12) << field
                                              << std::right << " mean " << r.mean << '\n';
    out << '\n';
    out << "human vs machine error comparison (alpha " << ev.alpha << ")\n";
    out << "  modality            human mae (sd)    machine mae (sd)  chi2    dof p       "
           "p-adj   signif\n";
    for (const ComparisonRow& row : ev.comparison) {
        std::ostringstream h, m;
        h << std::fixed << std::setprecision(3) << row.human_mae << " (" << row.human_sd << ")";
        m << std::fixed << std::setprecision(3) << row.machine_mae << " (" << row.machine_sd
          << ")";
        out << "  " << std::left << std::setw(19) << row.modality << ' ' << std::setw(17)
            << h.str() << ' ' << std::setw(17) << m.str() << std::right << ' ' << std::setw(7)
            << row.chi2_stat << ' ' << std::setw(3) << row.chi2_dof << ' ';
        out << std::setw(7) << row.p_raw << ' ' << std::setw(7) << row.p_adjusted << ' '
            << (row.significant ? "yes" : "no") << '\n';
    }
    return out.str();
}

}  // namespace lecto
