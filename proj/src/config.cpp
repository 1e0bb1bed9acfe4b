#include "lectometer/config.hpp"

#include <cstdlib>

#include "lectometer/error.hpp"
#include "lectometer/io.hpp"

using nlohmann::json;

namespace lecto {

nlohmann::json config_to_json(const EngineConfig& cfg) {
    json j;
    j["fps"] = cfg.fps;
    j["frame-ms"] = cfg.voicing.frame_ms;
    j["hop-ms"] = cfg.voicing.hop_ms;
    j["silence-rms"] = cfg.voicing.silence_rms;
    j["min-gap-ms"] = cfg.voicing.min_gap_ms;
    j["min-voiced-ms"] = cfg.voicing.min_voiced_ms;
    j["window-ms"] = cfg.voicing.window_ms;
    j["min-final-window-ms"] = cfg.voicing.min_final_window_ms;
    j["pose-mild"] = cfg.pose.mild;
    j["pose-extreme"] = cfg.pose.extreme;
    j["hand-moving-speed"] = cfg.hand_moving_speed;
    j["hand-window-ms"] = cfg.hand_window_ms;
    j["alert-threshold"] = cfg.alert_threshold;
    j["alert-sustain-ms"] = cfg.alert_sustain_ms;
    return j;
}

void apply_config_json(EngineConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        auto number = [&](const char* name) {
            if (!value.is_number())
                throw UsageError(std::string("config key \"") + name + "\" must be a number");
            return value.get<double>();
        };
        auto integer = [&](const char* name) {
            if (!value.is_number_integer())
                throw UsageError(std::string("config key \"") + name + "\" must be an integer");
            return value.get<std::int64_t>();
        };
        if (key == "fps")
            cfg.fps = number("fps");
        else if (key == "frame-ms")
            cfg.voicing.frame_ms = static_cast<int>(integer("frame-ms"));
        else if (key == "hop-ms")
            cfg.voicing.hop_ms = static_cast<int>(integer("hop-ms"));
        else if (key == "silence-rms")
            cfg.voicing.silence_rms = number("silence-rms");
        else if (key == "min-gap-ms")
            cfg.voicing.min_gap_ms = static_cast<int>(integer("min-gap-ms"));
        else if (key == "min-voiced-ms")
            cfg.voicing.min_voiced_ms = static_cast<int>(integer("min-voiced-ms"));
        else if (key == "window-ms")
            cfg.voicing.window_ms = integer("window-ms");
        else if (key == "min-final-window-ms")
            cfg.voicing.min_final_window_ms = integer("min-final-window-ms");
        else if (key == "pose-mild")
            cfg.pose.mild = number("pose-mild");
        else if (key == "pose-extreme")
            cfg.pose.extreme = number("pose-extreme");
        else if (key == "hand-moving-speed")
            cfg.hand_moving_speed = number("hand-moving-speed");
        else if (key == "hand-window-ms")
            cfg.hand_window_ms = static_cast<int>(integer("hand-window-ms"));
        else if (key == "alert-threshold")
            cfg.alert_threshold = static_cast<int>(integer("alert-threshold"));
        else if (key == "alert-sustain-ms")
            cfg.alert_sustain_ms = static_cast<int>(integer("alert-sustain-ms"));
        else
            throw UsageError("unknown config key \"" + key + "\"");
    }
}

EngineConfig load_config_from_env() {
    EngineConfig cfg;
    const char* path = std::getenv("LECTOMETER_CONFIG");
    if (path == nullptr || *path == '\0') return cfg;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid config file ") + path + ": " + e.what());
    }
    apply_config_json(cfg, j);
    return cfg;
}

}  // namespace lecto
