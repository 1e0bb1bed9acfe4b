#include "lectometer/audio_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "lectometer/error.hpp"

namespace lecto {

namespace {

void check_cfg(const VoicingConfig& cfg) {
    if (cfg.frame_ms <= 0 || cfg.hop_ms <= 0) throw ValidationError("frame/hop must be positive");
    if (cfg.silence_rms < 0.0) throw ValidationError("silence-rms must be non-negative");
    if (cfg.min_gap_ms < 0 || cfg.min_voiced_ms < 0)
        throw ValidationError("gap/voiced minimums must be non-negative");
    if (cfg.window_ms <= 0) throw ValidationError("window-ms must be positive");
    if (cfg.min_final_window_ms < 0)
        throw ValidationError("min-final-window-ms must be non-negative");
}

// RMS of a frame_ms window centered on slice k (slices are hop_ms wide,
// starting at k*hop_ms). The window is clipped to the track.
double slice_rms(const AudioTrack& track, const VoicingConfig& cfg, std::int64_t k) {
    const double rate = static_cast<double>(track.sample_rate);
    const double center_ms = static_cast<double>(k) * cfg.hop_ms + cfg.hop_ms / 2.0;
    std::int64_t lo = std::llround((center_ms - cfg.frame_ms / 2.0) * rate / 1000.0);
    std::int64_t hi = std::llround((center_ms + cfg.frame_ms / 2.0) * rate / 1000.0);
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(track.samples.size()));
    if (hi <= lo) return 0.0;
    double sum = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
        const double s = static_cast<double>(track.samples[static_cast<size_t>(i)]);
        sum += s * s;
    }
    return std::sqrt(sum / static_cast<double>(hi - lo));
}

bool in_band(std::optional<double> v, double lo, double hi) {
    return v.has_value() && *v >= lo && *v <= hi;
}

}  // namespace

std::vector<VoicedInterval> detect_voiced_intervals(const AudioTrack& track,
                                                    const VoicingConfig& cfg) {
    check_cfg(cfg);
    if (track.sample_rate < 8000) throw ValidationError("sample rate must be at least 8000 Hz");

    const std::int64_t duration = track.duration_ms();
    std::vector<VoicedInterval> merged;
    for (std::int64_t k = 0; k * cfg.hop_ms < duration; ++k) {
        if (slice_rms(track, cfg, k) < cfg.silence_rms) continue;
        const std::int64_t start = k * cfg.hop_ms;
        const std::int64_t end = std::min<std::int64_t>(start + cfg.hop_ms, duration);
        if (!merged.empty() && merged.back().end_ms == start)
            merged.back().end_ms = end;
        else
            merged.push_back({start, end});
    }

    std::vector<VoicedInterval> bridged;
    for (const VoicedInterval& iv : merged) {
        if (!bridged.empty() && iv.start_ms - bridged.back().end_ms < cfg.min_gap_ms)
            bridged.back().end_ms = iv.end_ms;
        else
            bridged.push_back(iv);
    }

    std::vector<VoicedInterval> out;
    for (const VoicedInterval& iv : bridged)
        if (iv.end_ms - iv.start_ms >= cfg.min_voiced_ms) out.push_back(iv);
    return out;
}

double word_density(const std::vector<VoicedInterval>& intervals, std::int64_t window_start_ms,
                    std::int64_t window_end_ms) {
    if (window_end_ms <= window_start_ms)
        throw ValidationError("window must have positive length");
    std::int64_t voiced = 0;
    for (const VoicedInterval& iv : intervals) {
        const std::int64_t lo = std::max(iv.start_ms, window_start_ms);
        const std::int64_t hi = std::min(iv.end_ms, window_end_ms);
        if (hi > lo) voiced += hi - lo;
    }
    return 100.0 * static_cast<double>(voiced) /
           static_cast<double>(window_end_ms - window_start_ms);
}

std::optional<double> speaking_speed(const WordTimeline* words, std::int64_t window_start_ms,
                                     std::int64_t window_end_ms) {
    if (window_end_ms <= window_start_ms)
        throw ValidationError("window must have positive length");
    if (words == nullptr) return std::nullopt;
    std::int64_t count = 0;
    for (const WordEvent& ev : words->events)
        if (ev.t_ms >= window_start_ms && ev.t_ms < window_end_ms) ++count;
    const double minutes = static_cast<double>(window_end_ms - window_start_ms) / 60000.0;
    return static_cast<double>(count) / minutes;
}

Tone classify_utterance_tone(const AudioTrack& track, const VoicedInterval& interval,
                             const VoicingConfig& cfg) {
    check_cfg(cfg);
    if (interval.start_ms < 0 || interval.end_ms <= interval.start_ms ||
        interval.end_ms > track.duration_ms())
        throw ValidationError("utterance interval out of track bounds");

    double sum = 0.0;
    std::int64_t n = 0;
    for (std::int64_t k = interval.start_ms / cfg.hop_ms; k * cfg.hop_ms < interval.end_ms; ++k) {
        if (k * cfg.hop_ms < interval.start_ms) continue;
        sum += slice_rms(track, cfg, k);
        ++n;
    }
    // Intervals shorter than one hop hold no slice start; measure them directly.
    double mean;
    if (n == 0) {
        const double rate = static_cast<double>(track.sample_rate);
        const auto lo = static_cast<size_t>(std::llround(interval.start_ms * rate / 1000.0));
        const auto hi = std::min(track.samples.size(),
                                 static_cast<size_t>(std::llround(interval.end_ms * rate / 1000.0)));
        double s2 = 0.0;
        for (size_t i = lo; i < hi; ++i)
            s2 += static_cast<double>(track.samples[i]) * static_cast<double>(track.samples[i]);
        mean = hi > lo ? std::sqrt(s2 / static_cast<double>(hi - lo)) : 0.0;
    } else {
        mean = sum / static_cast<double>(n);
    }
    return mean > 0.01 ? Tone::question : Tone::statement;
}

std::optional<double> intonation_percent(const std::vector<Tone>& tones) {
    if (tones.empty()) return std::nullopt;
    const auto questions =
        std::count(tones.begin(), tones.end(), Tone::question);
    return 100.0 * static_cast<double>(questions) / static_cast<double>(tones.size());
}

SpeechWindowMetrics speech_window_score(std::optional<double> density_pct,
                                        std::optional<double> speed_wpm,
                                        std::optional<double> question_pct) {
    SpeechWindowMetrics m;
    m.word_density_pct = density_pct;
    m.speaking_speed_wpm = speed_wpm;
    m.question_pct = question_pct;
    m.density_ok = in_band(density_pct, 35.0, 55.0);
    m.speed_ok = in_band(speed_wpm, 150.0, 250.0);
    m.tone_ok = in_band(question_pct, 40.0, 60.0);
    const int votes = static_cast<int>(m.density_ok) + static_cast<int>(m.speed_ok) +
                      static_cast<int>(m.tone_ok);
    m.speech_score = votes >= 2 ? 1 : 0;
    return m;
}

std::vector<SpeechWindowMetrics> score_audio(const AudioTrack* track, const WordTimeline* words,
                                             std::int64_t duration_ms, const VoicingConfig& cfg) {
    check_cfg(cfg);
    if (duration_ms <= 0) throw ValidationError("session duration must be positive");

    std::vector<VoicedInterval> intervals;
    if (track != nullptr) intervals = detect_voiced_intervals(*track, cfg);

    std::vector<SpeechWindowMetrics> out;
    for (std::int64_t start = 0; start < duration_ms; start += cfg.window_ms) {
        const std::int64_t end = std::min(start + cfg.window_ms, duration_ms);
        const bool partial = end - start < cfg.window_ms;
        if (partial && end - start < cfg.min_final_window_ms && !out.empty()) {
            SpeechWindowMetrics m = out.back();
            m.window_start_ms = start;
            m.window_end_ms = end;
            m.inherited = true;
            out.push_back(std::move(m));
            break;
        }

        std::optional<double> density, speed, questions;
        if (track != nullptr) {
            density = word_density(intervals, start, end);
            std::vector<Tone> tones;
            for (const VoicedInterval& iv : intervals)
                if (iv.start_ms >= start && iv.start_ms < end)
                    tones.push_back(classify_utterance_tone(*track, iv, cfg));
            questions = intonation_percent(tones);
        }
        speed = speaking_speed(words, start, end);

        SpeechWindowMetrics m = speech_window_score(density, speed, questions);
        m.window_start_ms = start;
        m.window_end_ms = end;
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace lecto
