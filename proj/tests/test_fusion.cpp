#include <doctest.h>

#include <cmath>
#include <random>

#include "lectometer/error.hpp"
#include "lectometer/fusion.hpp"
#include "lectometer/synth.hpp"

using namespace lecto;

namespace {

FaceGeometry face_at(double dx, double dy, bool eyes = true) {
    FaceGeometry f;
    f.bbox = Rect{0.25, 0.25, 0.5, 0.5};
    f.nose = Point{0.5 + dx * 0.25, 0.5 + dy * 0.25};
    f.eyes_detected = eyes;
    return f;
}

HandObservation hand_at(double x, double y) {
    HandObservation h;
    h.landmarks = {{x, y}};
    return h;
}

FrameObservation frame(std::int64_t idx, std::int64_t t, ExpressionLabel e, ActivityLabel a,
                       std::optional<FaceGeometry> face, std::vector<HandObservation> hands) {
    FrameObservation f;
    f.frame_idx = idx;
    f.t_ms = t;
    f.expression = e;
    f.activity = a;
    f.face = std::move(face);
    f.hands = std::move(hands);
    return f;
}

}  // namespace

TEST_CASE("total is the sum of the five parts, all 32 combinations") {
    for (int mask = 0; mask < 32; ++mask) {
        ModalityScores parts;
        parts.expression = mask & 1 ? 1 : 0;
        parts.activity = mask & 2 ? 1 : 0;
        parts.pose = mask & 4 ? 1 : 0;
        parts.hand = mask & 8 ? 1 : 0;
        parts.speech = mask & 16 ? 1 : 0;
        CHECK(frame_score_total(parts) == parts.expression + parts.activity + parts.pose +
                                              parts.hand + parts.speech);
    }
    ModalityScores bad;
    bad.pose = 2;
    CHECK_THROWS_AS(frame_score_total(bad), ValidationError);
}

TEST_CASE("documented frame archetypes score 4, 1 and 2") {
    EngineConfig cfg;
    StreamScorer scorer(cfg, 30.0);
    // warm-up frame so the documented frames carry measured hand motion
    scorer.step(frame(0, 0, ExpressionLabel::neutral, ActivityLabel::attending,
                      face_at(0.0, 0.0), {hand_at(0.40, 0.5)}),
                0);

    // smiling, raising a hand, facing the audience, hand in motion, speech out of band
    const auto high = scorer.step(frame(1, 33, ExpressionLabel::happy,
                                        ActivityLabel::hand_raising, face_at(0.1, 0.0),
                                        {hand_at(0.42, 0.5)}),
                                  0);
    CHECK(high.score.total == 4);

    // nothing positive on the face, looking elsewhere, head turned away; only the hand moves
    const auto low = scorer.step(frame(2, 66, ExpressionLabel::sad,
                                       ActivityLabel::looking_elsewhere,
                                       face_at(0.0, 0.0, false), {hand_at(0.44, 0.5)}),
                                 0);
    CHECK(low.score.total == 1);

    // neutral face and moving hand, but on the phone with the head turned far right
    const auto phone = scorer.step(frame(3, 99, ExpressionLabel::neutral,
                                         ActivityLabel::telephone_call, face_at(0.875, 0.0),
                                         {hand_at(0.46, 0.5)}),
                                   0);
    CHECK(phone.score.total == 2);
}

TEST_CASE("a frame without a face scores zero pose") {
    EngineConfig cfg;
    StreamScorer scorer(cfg, 30.0);
    const auto s = scorer.step(
        frame(0, 0, ExpressionLabel::happy, ActivityLabel::attending, std::nullopt, {}), 1);
    CHECK(s.score.parts.pose == 0);
    CHECK(s.score.parts.hand == 0);
    CHECK(s.score.total == 3);
}

TEST_CASE("scorer validates its inputs") {
    EngineConfig cfg;
    CHECK_THROWS_AS(StreamScorer(cfg, 0.0), ValidationError);
    StreamScorer scorer(cfg, 30.0);
    scorer.step(frame(5, 100, ExpressionLabel::none, ActivityLabel::none, std::nullopt, {}), 0);
    CHECK_THROWS_AS(
        scorer.step(frame(5, 133, ExpressionLabel::none, ActivityLabel::none, std::nullopt, {}),
                    0),
        ValidationError);
    CHECK_THROWS_AS(
        scorer.step(frame(6, 100, ExpressionLabel::none, ActivityLabel::none, std::nullopt, {}),
                    0),
        ValidationError);
    CHECK_THROWS_AS(
        scorer.step(frame(7, 200, ExpressionLabel::none, ActivityLabel::none, std::nullopt, {}),
                    2),
        ValidationError);
}

TEST_CASE("one alert per sustained low episode") {
    EngineConfig cfg;
    cfg.alert_threshold = 2;
    cfg.alert_sustain_ms = 100;  // 3 frames at 30 fps
    StreamScorer scorer(cfg, 30.0);

    auto low = [&](std::int64_t k) {
        return frame(k, k * 33 + 1, ExpressionLabel::none, ActivityLabel::none, std::nullopt,
                     {});
    };
    auto high = [&](std::int64_t k) {
        return frame(k, k * 33 + 1, ExpressionLabel::happy, ActivityLabel::attending,
                     face_at(0.0, 0.0), {});
    };

    int alerts = 0;
    std::optional<AlertEvent> first;
    for (std::int64_t k = 0; k < 6; ++k) {
        const auto s = scorer.step(low(k), 0);
        if (s.alert) {
            ++alerts;
            first = s.alert;
        }
    }
    CHECK(alerts == 1);
    REQUIRE(first.has_value());
    CHECK(first->frame_idx == 2);  // third consecutive low frame
    CHECK(first->sustained_frames == 3);
    CHECK(format_alert(*first) == "ALERT t_ms=67 frame=2 total=0");

    // recovery closes the episode
    CHECK(scorer.step(high(6), 1).score.total == 4);
    for (std::int64_t k = 7; k < 12; ++k) {
        const auto s = scorer.step(low(k), 0);
        if (s.alert) ++alerts;
    }
    CHECK(alerts == 2);
}

TEST_CASE("alerts do not fire while the total stays above the threshold") {
    EngineConfig cfg;
    cfg.alert_sustain_ms = 66;
    StreamScorer scorer(cfg, 30.0);
    for (std::int64_t k = 0; k < 30; ++k) {
        const auto s = scorer.step(frame(k, k * 33 + 1, ExpressionLabel::happy,
                                         ActivityLabel::attending, face_at(0.0, 0.0), {}),
                                   1);
        CHECK(s.score.total == 4);
        CHECK(!s.alert.has_value());
    }
}

TEST_CASE("session scoring rejects empty or inconsistent sessions") {
    EngineConfig cfg;
    LectureSession s;
    s.fps = 30.0;
    s.duration_ms = 1000;
    CHECK_THROWS_AS(score_session(s, cfg), ValidationError);

    s.frames = {frame(0, 500, ExpressionLabel::none, ActivityLabel::none, std::nullopt, {})};
    s.duration_ms = 400;  // ends before its last frame
    CHECK_THROWS_AS(score_session(s, cfg), ValidationError);
    s.duration_ms = 1000;
    s.fps = 0.0;
    CHECK_THROWS_AS(score_session(s, cfg), ValidationError);
}

TEST_CASE("batch scoring equals streaming with the same speech inputs") {
    const SynthProfile profile{0.6, 30000, 30.0, 2024, {}, {}, {}, {}, {}};
    const SynthResult synth = synthesize(profile);
    LectureSession session;
    session.frames = synth.frames;
    session.audio = synth.audio;
    session.words = synth.words;
    session.fps = profile.fps;
    session.duration_ms = std::max<std::int64_t>(profile.duration_ms,
                                                 synth.frames.back().t_ms + 33);

    EngineConfig cfg;
    const SessionReport report = score_session(session, cfg);
    REQUIRE(report.frames.size() == synth.frames.size());
    CHECK(report.frame_count == synth.frames.size());

    StreamScorer scorer(cfg, session.fps);
    double sum = 0.0;
    for (size_t i = 0; i < synth.frames.size(); ++i) {
        const std::int64_t w = std::min<std::int64_t>(
            synth.frames[i].t_ms / cfg.voicing.window_ms,
            static_cast<std::int64_t>(report.speech_windows.size()) - 1);
        const auto step = scorer.step(synth.frames[i],
                                      report.speech_windows[static_cast<size_t>(w)].speech_score);
        CHECK(step.score == report.frames[i]);
        sum += step.score.total;
    }
    CHECK(report.average_score == sum / static_cast<double>(report.frame_count));
}

TEST_CASE("modality rates count positive fractions per window") {
    EngineConfig cfg;
    cfg.voicing.window_ms = 1000;
    cfg.voicing.min_final_window_ms = 0;
    LectureSession s;
    s.fps = 2.0;
    s.duration_ms = 2000;
    s.frames = {
        frame(0, 0, ExpressionLabel::happy, ActivityLabel::none, std::nullopt, {}),
        frame(1, 500, ExpressionLabel::sad, ActivityLabel::none, std::nullopt, {}),
        frame(2, 1500, ExpressionLabel::happy, ActivityLabel::attending, std::nullopt, {}),
    };
    const SessionReport report = score_session(s, cfg);
    REQUIRE(report.speech_windows.size() == 2);
    const auto& expr = report.modality_rates.at("expression");
    REQUIRE(expr.size() == 2);
    CHECK(*expr[0] == doctest::Approx(0.5));
    CHECK(*expr[1] == doctest::Approx(1.0));
    const auto& act = report.modality_rates.at("activity");
    CHECK(*act[0] == 0.0);
    CHECK(*act[1] == doctest::Approx(1.0));
}

TEST_CASE("windows without frames report no rate") {
    EngineConfig cfg;
    cfg.voicing.window_ms = 1000;
    cfg.voicing.min_final_window_ms = 0;
    LectureSession s;
    s.fps = 1.0;
    s.duration_ms = 3000;
    s.frames = {frame(0, 0, ExpressionLabel::happy, ActivityLabel::none, std::nullopt, {}),
                frame(1, 2500, ExpressionLabel::happy, ActivityLabel::none, std::nullopt, {})};
    const SessionReport report = score_session(s, cfg);
    REQUIRE(report.speech_windows.size() == 3);
    const auto& expr = report.modality_rates.at("expression");
    CHECK(expr[0].has_value());
    CHECK(!expr[1].has_value());
    CHECK(expr[2].has_value());
}

TEST_CASE("the json report echoes the effective configuration") {
    EngineConfig cfg;
    cfg.alert_threshold = 1;
    LectureSession s;
    s.fps = 25.0;
    s.duration_ms = 1000;
    s.frames = {frame(0, 0, ExpressionLabel::happy, ActivityLabel::none, std::nullopt, {})};
    const SessionReport report = score_session(s, cfg);
    CHECK(report.config.fps == 25.0);
    CHECK(report.config.alert_threshold == 1);

    const std::string rendered = render_report(report, "json");
    CHECK(rendered.find("\"fps\": 25.0") != std::string::npos);
    CHECK(rendered.find("\"alert-threshold\": 1") != std::string::npos);
}

TEST_CASE("csv rendering is one fixed-format row per frame") {
    EngineConfig cfg;
    LectureSession s;
    s.fps = 30.0;
    s.duration_ms = 1000;
    s.frames = {frame(0, 0, ExpressionLabel::happy, ActivityLabel::attending,
                      face_at(0.0, 0.0), {}),
                frame(1, 33, ExpressionLabel::sad, ActivityLabel::none, std::nullopt, {})};
    const SessionReport report = score_session(s, cfg);
    CHECK(render_report(report, "csv") ==
          "frame_idx,t_ms,expression,activity,pose,hand,speech,total\n"
          "0,0,1,1,1,0,0,3\n"
          "1,33,0,0,0,0,0,0\n");
    CHECK_THROWS_AS(render_report(report, "xml"), UsageError);
}
