#include "lectometer/visual_metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lectometer/error.hpp"

namespace lecto {

std::string_view to_string(PoseLabel v) {
    switch (v) {
        case PoseLabel::forward: return "forward";
        case PoseLabel::left: return "left";
        case PoseLabel::right: return "right";
        case PoseLabel::up: return "up";
        case PoseLabel::down: return "down";
        case PoseLabel::far_left: return "far_left";
        case PoseLabel::far_right: return "far_right";
        case PoseLabel::far_up: return "far_up";
        case PoseLabel::far_down: return "far_down";
        case PoseLabel::backwards: return "backwards";
    }
    return "backwards";
}

int expression_score(ExpressionLabel v) {
    switch (v) {
        case ExpressionLabel::happy:
        case ExpressionLabel::surprise:
        case ExpressionLabel::neutral:
            return 1;
        default:
            return 0;
    }
}

int activity_score(ActivityLabel v) {
    switch (v) {
        case ActivityLabel::attending:
        case ActivityLabel::writing:
        case ActivityLabel::hand_raising:
            return 1;
        default:
            return 0;
    }
}

PoseLabel pose_classify(const FaceGeometry& face, const PoseThresholds& th) {
    if (face.bbox.w <= 0.0 || face.bbox.h <= 0.0)
        throw ValidationError("face bbox is degenerate");
    if (!face.eyes_detected) return PoseLabel::backwards;

    const double dx = (face.nose.x - face.bbox.cx()) / (face.bbox.w / 2.0);
    const double dy = (face.nose.y - face.bbox.cy()) / (face.bbox.h / 2.0);
    const double ax = std::fabs(dx);
    const double ay = std::fabs(dy);
    if (std::max(ax, ay) < th.mild) return PoseLabel::forward;

    const bool horizontal = ax >= ay;  // ties go horizontal
    const double mag = horizontal ? ax : ay;
    const bool far = mag >= th.extreme;
    if (horizontal) {
        if (dx > 0.0) return far ? PoseLabel::far_right : PoseLabel::right;
        return far ? PoseLabel::far_left : PoseLabel::left;
    }
    if (dy > 0.0) return far ? PoseLabel::far_down : PoseLabel::down;
    return far ? PoseLabel::far_up : PoseLabel::up;
}

int pose_score(PoseLabel v) {
    switch (v) {
        case PoseLabel::forward:
        case PoseLabel::left:
        case PoseLabel::right:
        case PoseLabel::up:
        case PoseLabel::down:
            return 1;
        default:
            return 0;
    }
}

Point centroid(std::span<const Point> landmarks) {
    if (landmarks.empty()) throw ValidationError("centroid needs at least one landmark");
    double sx = 0.0, sy = 0.0;
    for (const Point& p : landmarks) {
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(landmarks.size());
    return {sx / n, sy / n};
}

Kinematics hand_kinematics(HandTrackState& state, const Point& centroid,
                           std::int64_t frame_idx) {
    Kinematics k;
    if (state.prev_centroid && state.prev_frame_idx) {
        if (frame_idx <= *state.prev_frame_idx)
            throw ValidationError("hand observations must advance in frame order");
        const double dx = centroid.x - state.prev_centroid->x;
        const double dy = centroid.y - state.prev_centroid->y;
        const double frames = static_cast<double>(frame_idx - *state.prev_frame_idx);
        k.speed = std::hypot(dx, dy) / frames;
        if (dx != 0.0 || dy != 0.0) {
            // Flip y so 90 degrees means upward movement on screen.
            double deg = std::atan2(-dy, dx) * 180.0 / std::numbers::pi;
            if (deg <= -180.0) deg += 360.0;
            k.direction_deg = deg;
        }
    }
    state.prev_centroid = centroid;
    state.prev_frame_idx = frame_idx;
    return k;
}

int hand_motion_score(std::span<const HandSample> history, std::int64_t current_frame,
                      int window_frames, double moving_speed) {
    if (window_frames <= 0) throw ValidationError("hand window must span at least one frame");
    const std::int64_t lo = current_frame - window_frames + 1;
    double sum = 0.0;
    std::int64_t measured = 0;
    bool observed = false;
    for (const HandSample& s : history) {
        if (s.frame_idx < lo || s.frame_idx > current_frame) continue;
        observed = true;
        if (s.speed) {
            sum += *s.speed;
            ++measured;
        }
    }
    if (!observed) return 0;
    if (measured == 0) return 1;  // a hand that just entered the view has moved
    return sum / static_cast<double>(measured) >= moving_speed ? 1 : 0;
}

int HandTracker::step(std::int64_t frame_idx, std::span<const HandObservation> hands) {
    if (prev_frame_ && frame_idx <= *prev_frame_)
        throw ValidationError("hand observations must advance in frame order");

    if (!hands.empty()) {
        std::vector<Point> current;
        current.reserve(hands.size());
        for (const HandObservation& h : hands) current.push_back(centroid(h.landmarks));

        std::optional<double> frame_speed;
        if (!prev_centroids_.empty() && prev_frame_) {
            const double frames = static_cast<double>(frame_idx - *prev_frame_);
            double best = 0.0;
            for (const Point& c : current) {
                double nearest = std::numeric_limits<double>::infinity();
                for (const Point& p : prev_centroids_)
                    nearest = std::min(nearest, std::hypot(c.x - p.x, c.y - p.y));
                best = std::max(best, nearest / frames);
            }
            frame_speed = best;
        }
        history_.push_back({frame_idx, frame_speed});
        prev_centroids_ = std::move(current);
        prev_frame_ = frame_idx;
    }

    while (!history_.empty() && history_.front().frame_idx <= frame_idx - window_frames_)
        history_.pop_front();
    std::vector<HandSample> window(history_.begin(), history_.end());
    return hand_motion_score(window, frame_idx, window_frames_, moving_speed_);
}

}  // namespace lecto
