#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lectometer/types.hpp"

namespace lecto {

struct VoicingConfig {
    int frame_ms = 25;          // RMS analysis window length
    int hop_ms = 10;            // analysis hop
    double silence_rms = 0.005; // voiced iff frame RMS >= this
    int min_gap_ms = 200;       // gaps shorter than this merge
    int min_voiced_ms = 100;    // intervals shorter than this drop
    std::int64_t window_ms = 180000;           // speech evaluation window
    std::int64_t min_final_window_ms = 30000;  // shorter tails inherit
};

struct VoicedInterval {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    bool operator==(const VoicedInterval&) const = default;
};

enum class Tone { question, statement };

struct SpeechWindowMetrics {
    std::int64_t window_start_ms = 0;
    std::int64_t window_end_ms = 0;
    // Figures are absent when their input is missing (no audio track, no
    // word timeline, no utterance starting in the window).
    std::optional<double> word_density_pct;
    std::optional<double> speaking_speed_wpm;
    std::optional<double> question_pct;
    bool density_ok = false;
    bool speed_ok = false;
    bool tone_ok = false;
    int speech_score = 0;  // 0 or 1
    bool inherited = false;  // final partial window copied its predecessor
};

// Short-time energy voice activity detection. Each hop-aligned slice
// [k*hop, (k+1)*hop) is voiced iff the RMS of a frame_ms window centered on
// the slice is >= silence_rms; voiced slices merge, gaps < min_gap_ms merge,
// and intervals < min_voiced_ms drop. Centering keeps detected boundaries
// within one hop of the underlying energy edges.
std::vector<VoicedInterval> detect_voiced_intervals(const AudioTrack& track,
                                                    const VoicingConfig& cfg);

// Percentage of [window_start, window_end) covered by voiced intervals.
double word_density(const std::vector<VoicedInterval>& intervals,
                    std::int64_t window_start_ms, std::int64_t window_end_ms);

// Words per minute over [window_start, window_end), counting events with
// t_ms in the half-open window. nullopt when no timeline was supplied; a
// supplied-but-empty timeline gives 0.
std::optional<double> speaking_speed(const WordTimeline* words,
                                     std::int64_t window_start_ms,
                                     std::int64_t window_end_ms);

// An utterance is a question iff the mean of its per-slice RMS values is
// strictly greater than 0.01.
Tone classify_utterance_tone(const AudioTrack& track, const VoicedInterval& interval,
                             const VoicingConfig& cfg = {});

// Percentage of utterances classified as questions; nullopt for an empty list.
std::optional<double> intonation_percent(const std::vector<Tone>& tones);

// Applies the in-band checks (density 35..55, speed 150..250, questions
// 40..60, all inclusive) and the two-of-three majority vote. An undefined
// figure counts as a failed check.
SpeechWindowMetrics speech_window_score(std::optional<double> density_pct,
                                        std::optional<double> speed_wpm,
                                        std::optional<double> question_pct);

// Tiles [0, duration_ms) with windows of cfg.window_ms and scores each one.
// A final partial window shorter than cfg.min_final_window_ms inherits its
// predecessor's figures and score (a lone partial window is evaluated
// directly). track/words may be null.
std::vector<SpeechWindowMetrics> score_audio(const AudioTrack* track,
                                             const WordTimeline* words,
                                             std::int64_t duration_ms,
                                             const VoicingConfig& cfg);

}  // namespace lecto
