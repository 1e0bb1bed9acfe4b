#pragma once

#include <string>

#include <json.hpp>

#include "lectometer/audio_metrics.hpp"
#include "lectometer/visual_metrics.hpp"

namespace lecto {

// Every tunable knob in one place. The JSON forms (config file and the echo
// embedded in every report) use the CLI flag spellings, e.g. "window-ms".
struct EngineConfig {
    double fps = 30.0;
    VoicingConfig voicing;
    PoseThresholds pose;
    double hand_moving_speed = 0.002;  // normalized units per frame
    int hand_window_ms = 1000;
    int alert_threshold = 2;   // alert when total <= this ...
    int alert_sustain_ms = 2000;  // ... for this long, converted via fps
};

nlohmann::json config_to_json(const EngineConfig& cfg);

// Applies dash-case keys onto cfg. Unknown keys raise UsageError.
void apply_config_json(EngineConfig& cfg, const nlohmann::json& j);

// Loads the file named by the LECTOMETER_CONFIG environment variable, if
// set, on top of the built-in defaults.
EngineConfig load_config_from_env();

}  // namespace lecto
