#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lectometer/config.hpp"
#include "lectometer/types.hpp"
#include "lectometer/visual_metrics.hpp"

namespace lecto {

struct ModalityScores {
    int expression = 0;
    int activity = 0;
    int pose = 0;
    int hand = 0;
    int speech = 0;
    bool operator==(const ModalityScores&) const = default;
};

int frame_score_total(const ModalityScores& parts);

struct FrameScore {
    std::int64_t frame_idx = 0;
    std::int64_t t_ms = 0;
    ModalityScores parts;
    int total = 0;  // 0..5
    bool operator==(const FrameScore&) const = default;
};

struct AlertEvent {
    std::int64_t t_ms = 0;
    std::int64_t frame_idx = 0;
    int total = 0;
    int threshold = 0;
    int sustained_frames = 0;
};

struct SessionReport {
    EngineConfig config;  // effective configuration, echoed into outputs
    std::size_t frame_count = 0;
    double average_score = 0.0;
    std::vector<FrameScore> frames;
    std::vector<SpeechWindowMetrics> speech_windows;
    // Fraction of frames scoring 1 per modality and speech window; a window
    // without frames holds nullopt.
    std::map<std::string, std::vector<std::optional<double>>> modality_rates;
};

// Incremental scorer. Speech comes from outside because a live stream has no
// settled audio window yet; the batch path feeds the window score of the
// frame's timestamp, the CLI stream feeds 0.
class StreamScorer {
public:
    StreamScorer(const EngineConfig& cfg, double fps);

    struct Step {
        FrameScore score;
        std::optional<AlertEvent> alert;
    };

    // Throws ValidationError when frame_idx/t_ms do not strictly increase.
    Step step(const FrameObservation& obs, int speech_score);

private:
    EngineConfig cfg_;
    int sustain_frames_;
    HandTracker tracker_;
    std::optional<std::int64_t> last_frame_idx_;
    std::optional<std::int64_t> last_t_ms_;
    int low_run_ = 0;
    bool alerted_this_episode_ = false;
};

// Scores a whole session: speech windows from the audio/word inputs, visual
// sub-scores per frame, equal-weight sum, average over frames. Empty
// sessions are rejected. Per-frame results are identical to feeding the same
// frames through StreamScorer.
SessionReport score_session(const LectureSession& session, const EngineConfig& cfg);

// "json" gives the full report document, "csv" one row per frame. Output is
// byte-stable for identical reports.
std::string render_report(const SessionReport& report, std::string_view format);

// The pinned single-line wire format: ALERT t_ms=<int> frame=<int> total=<int>
std::string format_alert(const AlertEvent& ev);

}  // namespace lecto
