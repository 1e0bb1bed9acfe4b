#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lecto {

// All image-space quantities are normalized to [0,1] with the origin at the
// top-left corner and y growing downward.
struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
    bool operator==(const Rect&) const = default;
};

// "none" is a first-class value meaning the upstream detector produced
// nothing for this frame; it always scores 0.
enum class ExpressionLabel {
    anger,
    disgust,
    fear,
    happy,
    neutral,
    sad,
    surprise,
    none,
};

enum class ActivityLabel {
    absent,
    attending,
    hand_raising,
    writing,
    telephone_call,
    texting,
    looking_elsewhere,
    none,
};

std::string_view to_string(ExpressionLabel v);
std::string_view to_string(ActivityLabel v);
std::optional<ExpressionLabel> expression_from_string(std::string_view s);
std::optional<ActivityLabel> activity_from_string(std::string_view s);

struct FaceGeometry {
    Rect bbox;
    Point nose;
    bool eyes_detected = false;
    bool operator==(const FaceGeometry&) const = default;
};

struct HandObservation {
    std::vector<Point> landmarks;  // non-empty, each inside the unit square
    bool operator==(const HandObservation&) const = default;
};

struct FrameObservation {
    std::int64_t frame_idx = 0;  // non-negative, strictly increasing
    std::int64_t t_ms = 0;       // non-negative, strictly increasing
    ExpressionLabel expression = ExpressionLabel::none;
    ActivityLabel activity = ActivityLabel::none;
    std::optional<FaceGeometry> face;
    std::vector<HandObservation> hands;
    bool operator==(const FrameObservation&) const = default;
};

struct AudioTrack {
    int sample_rate = 0;  // >= 8000
    // Normalized amplitudes in [-1, 1]. 16-bit PCM maps sample/32768, which
    // float represents exactly.
    std::vector<float> samples;

    std::int64_t duration_ms() const {
        if (sample_rate <= 0) return 0;
        const std::int64_t n = static_cast<std::int64_t>(samples.size());
        return (n * 1000 + sample_rate - 1) / sample_rate;
    }
    bool operator==(const AudioTrack&) const = default;
};

struct WordEvent {
    std::int64_t t_ms = 0;
    std::string word;
    bool operator==(const WordEvent&) const = default;
};

struct WordTimeline {
    std::vector<WordEvent> events;  // t_ms non-decreasing
    bool operator==(const WordTimeline&) const = default;
};

struct LectureSession {
    std::vector<FrameObservation> frames;
    std::optional<AudioTrack> audio;
    std::optional<WordTimeline> words;
    double fps = 0.0;              // > 0
    std::int64_t duration_ms = 0;  // >= last frame t_ms
    bool operator==(const LectureSession&) const = default;
};

// One annotator's ratings for one video frame. All ratings are on a 1..4
// scale (1 worst, 4 best).
struct FrameAnnotation {
    std::string annotator_id;
    std::string item_id;
    int expression = 0;
    int activity = 0;
    int hand = 0;
    int head = 0;
    int overall = 0;
    bool operator==(const FrameAnnotation&) const = default;
};

struct AudioAnnotation {
    std::string annotator_id;
    std::string item_id;
    int speech = 0;
    bool operator==(const AudioAnnotation&) const = default;
};

struct AnnotationSet {
    std::vector<FrameAnnotation> frame_items;
    std::vector<AudioAnnotation> audio_items;
    bool operator==(const AnnotationSet&) const = default;
};

}  // namespace lecto
