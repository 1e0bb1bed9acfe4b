#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "lectometer/types.hpp"

namespace lecto {

// Deterministic session generator. quality is the probability that a
// modality observation comes out positive; per-modality overrides replace it
// channel by channel. Targets the default engine configuration: in-band
// audio cycles hit 45% voiced density, 200 wpm and a 50% question share.
struct SynthProfile {
    double quality = 1.0;
    std::int64_t duration_ms = 60000;
    double fps = 30.0;
    std::uint64_t seed = 0;
    std::optional<double> p_expression;
    std::optional<double> p_activity;
    std::optional<double> p_pose;
    std::optional<double> p_hand;
    std::optional<double> p_speech;
};

struct SynthResult {
    std::vector<FrameObservation> frames;
    WordTimeline words;
    AudioTrack audio;
    // {"profile": ..., "frames": [{frame_idx, expression, activity, pose,
    // hand}...], "speech_windows": [{window_start_ms, window_end_ms,
    // speech_score}...]} - the sub-scores the engine will reproduce.
    nlohmann::json truth;
};

SynthResult synthesize(const SynthProfile& profile);

}  // namespace lecto
