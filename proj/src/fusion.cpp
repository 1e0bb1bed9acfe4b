#include "lectometer/fusion.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "lectometer/audio_metrics.hpp"
#include "lectometer/error.hpp"

using nlohmann::json;

namespace lecto {

namespace {

int window_frames_from_ms(double fps, int ms) {
    return static_cast<int>(std::max<long long>(1, std::llround(fps * ms / 1000.0)));
}

json optional_to_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

json window_to_json(const SpeechWindowMetrics& w) {
    json j;
    j["window_start_ms"] = w.window_start_ms;
    j["window_end_ms"] = w.window_end_ms;
    j["word_density_pct"] = optional_to_json(w.word_density_pct);
    j["speaking_speed_wpm"] = optional_to_json(w.speaking_speed_wpm);
    j["question_pct"] = optional_to_json(w.question_pct);
    j["density_ok"] = w.density_ok;
    j["speed_ok"] = w.speed_ok;
    j["tone_ok"] = w.tone_ok;
    j["speech_score"] = w.speech_score;
    j["inherited"] = w.inherited;
    return j;
}

}  // namespace

int frame_score_total(const ModalityScores& parts) {
    for (int v : {parts.expression, parts.activity, parts.pose, parts.hand, parts.speech})
        if (v != 0 && v != 1) throw ValidationError("sub-scores must be 0 or 1");
    return parts.expression + parts.activity + parts.pose + parts.hand + parts.speech;
}

StreamScorer::StreamScorer(const EngineConfig& cfg, double fps)
    : cfg_(cfg),
      sustain_frames_(window_frames_from_ms(fps, cfg.alert_sustain_ms)),
      tracker_(window_frames_from_ms(fps, cfg.hand_window_ms), cfg.hand_moving_speed) {
    if (fps <= 0.0) throw ValidationError("fps must be positive");
    cfg_.fps = fps;
}

StreamScorer::Step StreamScorer::step(const FrameObservation& obs, int speech_score) {
    if (last_frame_idx_ && obs.frame_idx <= *last_frame_idx_)
        throw ValidationError("out-of-order frame_idx " + std::to_string(obs.frame_idx));
    if (last_t_ms_ && obs.t_ms <= *last_t_ms_)
        throw ValidationError("out-of-order t_ms " + std::to_string(obs.t_ms));
    if (speech_score != 0 && speech_score != 1)
        throw ValidationError("speech score must be 0 or 1");

    Step out;
    out.score.frame_idx = obs.frame_idx;
    out.score.t_ms = obs.t_ms;
    out.score.parts.expression = expression_score(obs.expression);
    out.score.parts.activity = activity_score(obs.activity);
    out.score.parts.pose = obs.face ? pose_score(pose_classify(*obs.face, cfg_.pose)) : 0;
    out.score.parts.hand = tracker_.step(obs.frame_idx, obs.hands);
    out.score.parts.speech = speech_score;
    out.score.total = frame_score_total(out.score.parts);

    last_frame_idx_ = obs.frame_idx;
    last_t_ms_ = obs.t_ms;

    if (out.score.total <= cfg_.alert_threshold) {
        ++low_run_;
        if (low_run_ >= sustain_frames_ && !alerted_this_episode_) {
            alerted_this_episode_ = true;
            out.alert = AlertEvent{obs.t_ms, obs.frame_idx, out.score.total,
                                   cfg_.alert_threshold, low_run_};
        }
    } else {
        low_run_ = 0;
        alerted_this_episode_ = false;
    }
    return out;
}

SessionReport score_session(const LectureSession& session, const EngineConfig& cfg) {
    if (session.frames.empty()) throw ValidationError("session has no frames");
    if (session.fps <= 0.0) throw ValidationError("fps must be positive");
    if (session.duration_ms < session.frames.back().t_ms)
        throw ValidationError("session duration ends before its last frame");

    SessionReport report;
    report.config = cfg;
    report.config.fps = session.fps;

    report.speech_windows =
        score_audio(session.audio ? &*session.audio : nullptr,
                    session.words ? &*session.words : nullptr,
                    std::max(session.duration_ms, session.frames.back().t_ms + 1),
                    cfg.voicing);
    const auto window_count = static_cast<std::int64_t>(report.speech_windows.size());

    StreamScorer scorer(cfg, session.fps);
    std::int64_t total_sum = 0;
    std::vector<std::int64_t> frames_per_window(report.speech_windows.size(), 0);
    std::map<std::string, std::vector<std::int64_t>> positives;
    for (const char* key : {"expression", "activity", "pose", "hand", "speech"})
        positives[key].assign(report.speech_windows.size(), 0);

    report.frames.reserve(session.frames.size());
    for (const FrameObservation& obs : session.frames) {
        const std::int64_t w =
            std::min<std::int64_t>(obs.t_ms / cfg.voicing.window_ms, window_count - 1);
        const int speech = report.speech_windows[static_cast<size_t>(w)].speech_score;
        FrameScore fs = scorer.step(obs, speech).score;
        total_sum += fs.total;
        ++frames_per_window[static_cast<size_t>(w)];
        positives["expression"][static_cast<size_t>(w)] += fs.parts.expression;
        positives["activity"][static_cast<size_t>(w)] += fs.parts.activity;
        positives["pose"][static_cast<size_t>(w)] += fs.parts.pose;
        positives["hand"][static_cast<size_t>(w)] += fs.parts.hand;
        positives["speech"][static_cast<size_t>(w)] += fs.parts.speech;
        report.frames.push_back(fs);
    }

    report.frame_count = report.frames.size();
    report.average_score =
        static_cast<double>(total_sum) / static_cast<double>(report.frame_count);

    for (auto& [key, counts] : positives) {
        std::vector<std::optional<double>> rates;
        rates.reserve(counts.size());
        for (size_t w = 0; w < counts.size(); ++w) {
            if (frames_per_window[w] == 0)
                rates.push_back(std::nullopt);
            else
                rates.push_back(static_cast<double>(counts[w]) /
                                static_cast<double>(frames_per_window[w]));
        }
        report.modality_rates[key] = std::move(rates);
    }
    return report;
}

std::string render_report(const SessionReport& report, std::string_view format) {
    if (format == "json") {
        json j;
        j["config"] = config_to_json(report.config);
        j["frame_count"] = report.frame_count;
        j["average_score"] = report.average_score;
        json frames = json::array();
        for (const FrameScore& f : report.frames) {
            json parts;
            parts["expression"] = f.parts.expression;
            parts["activity"] = f.parts.activity;
            parts["pose"] = f.parts.pose;
            parts["hand"] = f.parts.hand;
            parts["speech"] = f.parts.speech;
            frames.push_back(json{{"frame_idx", f.frame_idx},
                                  {"t_ms", f.t_ms},
                                  {"parts", std::move(parts)},
                                  {"total", f.total}});
        }
        j["frames"] = std::move(frames);
        json windows = json::array();
        for (const SpeechWindowMetrics& w : report.speech_windows)
            windows.push_back(window_to_json(w));
        j["speech_windows"] = std::move(windows);
        json rates;
        for (const auto& [key, series] : report.modality_rates) {
            json arr = json::array();
            for (const auto& v : series) arr.push_back(optional_to_json(v));
            rates[key] = std::move(arr);
        }
        j["modality_rates"] = std::move(rates);
        return j.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out = "frame_idx,t_ms,expression,activity,pose,hand,speech,total\n";
        for (const FrameScore& f : report.frames) {
            out += std::to_string(f.frame_idx) + ',' + std::to_string(f.t_ms) + ',' +
                   std::to_string(f.parts.expression) + ',' + std::to_string(f.parts.activity) +
                   ',' + std::to_string(f.parts.pose) + ',' + std::to_string(f.parts.hand) + ',' +
                   std::to_string(f.parts.speech) + ',' + std::to_string(f.total) + '\n';
        }
        return out;
    }
    throw UsageError("unknown report format \"" + std::string(format) +
                     "\" (expected json or csv)");
}

std::string format_alert(const AlertEvent& ev) {
    std::ostringstream out;
    out << "ALERT t_ms=" << ev.t_ms << " frame=" << ev.frame_idx << " total=" << ev.total;
    return out.str();
}

}  // namespace lecto
