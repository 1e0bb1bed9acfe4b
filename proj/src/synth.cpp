#include "lectometer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lectometer/error.hpp"
#include "lectometer/fusion.hpp"

using nlohmann::json;

namespace lecto {

namespace {

constexpr int kSampleRate = 16000;
constexpr std::int64_t kCycleMs = 10000;
constexpr std::int64_t kBurstMs = 2250;       // 45% voiced per cycle
constexpr std::int64_t kStatementOffsetMs = 5000;
constexpr std::int64_t kWordEveryMs = 300;    // 200 words per minute
constexpr double kQuestionAmp = 0.3;
constexpr double kStatementAmp = 0.008;  // voiced but below the tone threshold
constexpr double kToneHz = 440.0;
constexpr int kHandOrbitFrames = 40;

// std::uniform_real_distribution is not pinned across standard library
// implementations; this is, and byte-identical artifacts per seed are part of
// the contract.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return uniform() < p; }
    std::size_t pick(std::size_t n) {
        return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
    }
};

double resolve(const std::optional<double>& override_p, double quality, const char* name) {
    const double p = override_p.value_or(quality);
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError(std::string(name) + " probability must lie in [0, 1]");
    return p;
}

ExpressionLabel draw_expression(Rng& rng, bool positive) {
    static constexpr ExpressionLabel kPositive[] = {ExpressionLabel::happy,
                                                    ExpressionLabel::neutral,
                                                    ExpressionLabel::surprise};
    static constexpr ExpressionLabel kNegative[] = {ExpressionLabel::anger,
                                                    ExpressionLabel::disgust,
                                                    ExpressionLabel::fear, ExpressionLabel::sad};
    return positive ? kPositive[rng.pick(3)] : kNegative[rng.pick(4)];
}

ActivityLabel draw_activity(Rng& rng, bool positive) {
    static constexpr ActivityLabel kPositive[] = {ActivityLabel::attending,
                                                  ActivityLabel::hand_raising,
                                                  ActivityLabel::writing};
    static constexpr ActivityLabel kNegative[] = {ActivityLabel::absent,
                                                  ActivityLabel::telephone_call,
                                                  ActivityLabel::texting,
                                                  ActivityLabel::looking_elsewhere};
    return positive ? kPositive[rng.pick(3)] : kNegative[rng.pick(4)];
}

// The face box is fixed; the nose moves inside it. Offsets are drawn with a
// wide margin to every classifier threshold so float noise cannot flip the
// intended polarity.
FaceGeometry draw_face(Rng& rng, bool positive) {
    FaceGeometry face;
    face.bbox = Rect{0.3, 0.2, 0.4, 0.5};
    face.eyes_detected = true;

    double dx = 0.0, dy = 0.0;
    if (positive) {
        if (rng.chance(0.5)) {  // facing forward
            dx = -0.3 + 0.6 * rng.uniform();
            dy = -0.3 + 0.6 * rng.uniform();
        } else {  // mild turn along one axis
            const bool horizontal = rng.chance(0.5);
            const double sign = rng.chance(0.5) ? -1.0 : 1.0;
            const double major = sign * (0.45 + 0.25 * rng.uniform());
            const double minor = -0.3 + 0.6 * rng.uniform();
            dx = horizontal ? major : minor;
            dy = horizontal ? minor : major;
        }
    } else {
        if (rng.chance(0.5)) {  // looking away from the camera
            face.eyes_detected = false;
            dx = -0.3 + 0.6 * rng.uniform();
            dy = -0.3 + 0.6 * rng.uniform();
        } else {  // extreme turn
            const bool horizontal = rng.chance(0.5);
            const double sign = rng.chance(0.5) ? -1.0 : 1.0;
            const double major = sign * (0.80 + 0.15 * rng.uniform());
            const double minor = -0.3 + 0.6 * rng.uniform();
            dx = horizontal ? major : minor;
            dy = horizontal ? minor : major;
        }
    }
    face.nose = Point{face.bbox.cx() + dx * face.bbox.w / 2.0,
                      face.bbox.cy() + dy * face.bbox.h / 2.0};
    return face;
}

// One hand orbiting at constant angular rate: every consecutive-frame
// displacement is the same chord length (~0.016 per frame), comfortably above
// the default moving threshold.
HandObservation make_hand(std::int64_t frame_idx) {
    const double angle =
        2.0 * M_PI * static_cast<double>(frame_idx % kHandOrbitFrames) / kHandOrbitFrames;
    const double cx = 0.5 + 0.1 * std::cos(angle);
    const double cy = 0.55 + 0.1 * std::sin(angle);
    HandObservation hand;
    hand.landmarks = {Point{cx - 0.02, cy}, Point{cx + 0.02, cy - 0.01}, Point{cx, cy + 0.01}};
    return hand;
}

void add_tone(std::vector<float>& samples, std::int64_t start_ms, std::int64_t end_ms,
              double amp) {
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    const std::int64_t s0 = std::clamp<std::int64_t>(start_ms * kSampleRate / 1000, 0, n);
    const std::int64_t s1 = std::clamp<std::int64_t>(end_ms * kSampleRate / 1000, 0, n);
    for (std::int64_t s = s0; s < s1; ++s) {
        const double v =
            amp * std::sin(2.0 * M_PI * kToneHz * static_cast<double>(s - s0) / kSampleRate);
        // snap to the 16-bit grid so the WAV round-trip is the identity
        const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
        samples[static_cast<std::size_t>(s)] = static_cast<float>(q) / 32768.0f;
    }
}

}  // namespace

SynthResult synthesize(const SynthProfile& profile) {
    if (!(profile.quality >= 0.0 && profile.quality <= 1.0))
        throw ValidationError("quality must lie in [0, 1]");
    if (profile.duration_ms <= 0) throw ValidationError("duration_ms must be positive");
    if (!(profile.fps > 0.0)) throw ValidationError("fps must be positive");

    const double p_expression = resolve(profile.p_expression, profile.quality, "expression");
    const double p_activity = resolve(profile.p_activity, profile.quality, "activity");
    const double p_pose = resolve(profile.p_pose, profile.quality, "pose");
    const double p_hand = resolve(profile.p_hand, profile.quality, "hand");
    const double p_speech = resolve(profile.p_speech, profile.quality, "speech");

    std::vector<std::int64_t> frame_times;
    for (std::int64_t k = 0;; ++k) {
        const std::int64_t t =
            std::llround(static_cast<double>(k) * 1000.0 / profile.fps);
        if (t >= profile.duration_ms) break;
        frame_times.push_back(t);
    }
    const std::int64_t frame_period = std::llround(1000.0 / profile.fps);
    // The scorer derives the session length from the frame grid and the audio
    // track; generating audio out to the same value keeps both in agreement.
    const std::int64_t eff_duration =
        std::max(profile.duration_ms, frame_times.back() + frame_period);

    Rng rng(profile.seed);

    const VoicingConfig voicing;
    const std::int64_t window_count =
        (eff_duration + voicing.window_ms - 1) / voicing.window_ms;
    std::vector<bool> window_in_band;
    window_in_band.reserve(static_cast<std::size_t>(window_count));
    for (std::int64_t w = 0; w < window_count; ++w) window_in_band.push_back(rng.chance(p_speech));

    SynthResult out;
    out.frames.reserve(frame_times.size());
    json truth_frames = json::array();
    for (std::size_t k = 0; k < frame_times.size(); ++k) {
        FrameObservation obs;
        obs.frame_idx = static_cast<std::int64_t>(k);
        obs.t_ms = frame_times[k];

        const bool expr_pos = rng.chance(p_expression);
        obs.expression = draw_expression(rng, expr_pos);
        const bool act_pos = rng.chance(p_activity);
        obs.activity = draw_activity(rng, act_pos);
        const bool pose_pos = rng.chance(p_pose);
        obs.face = draw_face(rng, pose_pos);
        const bool hand_pos = rng.chance(p_hand);
        if (hand_pos) obs.hands.push_back(make_hand(obs.frame_idx));

        truth_frames.push_back(json{{"frame_idx", obs.frame_idx},
                                    {"expression", expr_pos ? 1 : 0},
                                    {"activity", act_pos ? 1 : 0},
                                    {"pose", pose_pos ? 1 : 0},
                                    {"hand", 0}});
        out.frames.push_back(std::move(obs));
    }

    out.audio.sample_rate = kSampleRate;
    out.audio.samples.assign(static_cast<std::size_t>(eff_duration * kSampleRate / 1000), 0.0f);
    static constexpr const char* kWords[] = {"the",  "class", "derives",  "its",
                                             "score", "from",  "observed", "behaviour"};
    std::size_t word_no = 0;
    for (std::int64_t w = 0; w < window_count; ++w) {
        const std::int64_t ws = w * voicing.window_ms;
        const std::int64_t we = std::min(ws + voicing.window_ms, eff_duration);
        if (window_in_band[static_cast<std::size_t>(w)]) {
            for (std::int64_t c = ws; c < we; c += kCycleMs) {
                add_tone(out.audio.samples, c, std::min(c + kBurstMs, we), kQuestionAmp);
                add_tone(out.audio.samples, c + kStatementOffsetMs,
                         std::min(c + kStatementOffsetMs + kBurstMs, we), kStatementAmp);
            }
            for (std::int64_t t = ws; t < we; t += kWordEveryMs)
                out.words.events.push_back(WordEvent{t, kWords[word_no++ % 8]});
        } else {
            // an unbroken loud tone: density 100%, no words, at most one
            // utterance start, all three checks out of band
            add_tone(out.audio.samples, ws, we, kQuestionAmp);
        }
    }

    LectureSession session;
    session.frames = out.frames;
    session.audio = out.audio;
    session.words = out.words;
    session.fps = profile.fps;
    session.duration_ms = eff_duration;
    EngineConfig cfg;
    cfg.fps = profile.fps;
    const SessionReport report = score_session(session, cfg);
    // Expression, activity and pose keep the drawn intent: the engine has to
    // reproduce them from the emitted labels alone. Hand depends on a trailing
    // window, so its target is computed the same way the engine computes it.
    for (std::size_t k = 0; k < report.frames.size(); ++k)
        truth_frames[k]["hand"] = report.frames[k].parts.hand;
    json windows = json::array();
    for (const SpeechWindowMetrics& wmx : report.speech_windows)
        windows.push_back(json{{"window_start_ms", wmx.window_start_ms},
                               {"window_end_ms", wmx.window_end_ms},
                               {"speech_score", wmx.speech_score}});

    out.truth = json{{"profile",
                      json{{"quality", profile.quality},
                           {"duration_ms", profile.duration_ms},
                           {"fps", profile.fps},
                           {"seed", profile.seed},
                           {"p_expression", p_expression},
                           {"p_activity", p_activity},
                           {"p_pose", p_pose},
                           {"p_hand", p_hand},
                           {"p_speech", p_speech}}},
                     {"frames", std::move(truth_frames)},
                     {"speech_windows", std::move(windows)},
                     {"average_score", report.average_score}};
    return out;
}

}  // namespace lecto
