#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>

#include "lectometer/types.hpp"

namespace lecto {

enum class PoseLabel {
    forward,
    left,
    right,
    up,
    down,
    far_left,
    far_right,
    far_up,
    far_down,
    backwards,
};

std::string_view to_string(PoseLabel v);

struct PoseThresholds {
    double mild = 0.35;     // below this (both axes) the face looks forward
    double extreme = 0.75;  // at or above this the far_ variant applies
};

// Positive expressions: happy, surprise, neutral.
int expression_score(ExpressionLabel v);

// Positive activities: attending, writing, hand_raising.
int activity_score(ActivityLabel v);

// Classifies head pose from the nose position relative to the face box
// center, normalized by the half extent per axis. Undetected eyes mean the
// head faces away. Ties between axes resolve to the horizontal one.
PoseLabel pose_classify(const FaceGeometry& face, const PoseThresholds& th = {});

// Mild deviations still count as engaged; far_ variants and backwards do not.
int pose_score(PoseLabel v);

Point centroid(std::span<const Point> landmarks);

struct Kinematics {
    double speed = 0.0;  // normalized units per frame
    // Degrees in (-180, 180], measured with y flipped so 90 means upward.
    std::optional<double> direction_deg;
};

struct HandTrackState {
    std::optional<Point> prev_centroid;
    std::optional<std::int64_t> prev_frame_idx;
};

// Advances a single-hand track. The first observation yields speed 0 with no
// direction; afterwards speed is the centroid displacement divided by the
// number of frames elapsed.
Kinematics hand_kinematics(HandTrackState& state, const Point& centroid,
                           std::int64_t frame_idx);

struct HandSample {
    std::int64_t frame_idx = 0;
    // Absent for the first observation of a track: presence was recorded but
    // no displacement could be measured yet.
    std::optional<double> speed;
};

// 1 iff the mean of the measured speeds inside the trailing window of
// window_frames frames is >= moving_speed. No hand activity in the window
// gives 0. Hands observed in the window without any completed measurement
// (only possible right after a track appears) count as moving: a hand that
// just entered the view has moved.
int hand_motion_score(std::span<const HandSample> history, std::int64_t current_frame,
                      int window_frames, double moving_speed);

// Multi-hand wrapper: per-frame centroids are matched to the nearest
// centroid of the previous hands-bearing frame, the frame speed is the max
// over hands, and the motion score is evaluated over the trailing window.
class HandTracker {
public:
    HandTracker(int window_frames, double moving_speed)
        : window_frames_(window_frames), moving_speed_(moving_speed) {}

    // Returns the hand sub-score for this frame. frame_idx must be strictly
    // greater than on the previous call that carried hands.
    int step(std::int64_t frame_idx, std::span<const HandObservation> hands);

private:
    int window_frames_;
    double moving_speed_;
    std::vector<Point> prev_centroids_;
    std::optional<std::int64_t> prev_frame_;
    std::deque<HandSample> history_;
};

}  // namespace lecto
