#include <doctest.h>

#include <random>
#include <sstream>

#include "lectometer/error.hpp"
#include "lectometer/io.hpp"

using namespace lecto;

namespace {

FrameObservation sample_frame() {
    FrameObservation f;
    f.frame_idx = 3;
    f.t_ms = 100;
    f.expression = ExpressionLabel::happy;
    f.activity = ActivityLabel::writing;
    f.face = FaceGeometry{Rect{0.25, 0.25, 0.5, 0.5}, Point{0.5, 0.45}, true};
    HandObservation hand;
    hand.landmarks = {{0.1, 0.2}, {0.15, 0.25}};
    f.hands = {hand};
    return f;
}

}  // namespace

TEST_CASE("frame serialization round-trips") {
    const FrameObservation f = sample_frame();
    CHECK(parse_frame_line(serialize_frame(f)) == f);

    FrameObservation faceless = f;
    faceless.face.reset();
    faceless.hands.clear();
    CHECK(parse_frame_line(serialize_frame(faceless)) == faceless);
}

TEST_CASE("frame parsing accepts missing optional fields") {
    const FrameObservation f = parse_frame_line(
        R"({"frame_idx":0,"t_ms":0,"expression":"none","activity":"none"})");
    CHECK(!f.face.has_value());
    CHECK(f.hands.empty());
    CHECK(f.expression == ExpressionLabel::none);
}

TEST_CASE("frame parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_frame_line("not json"), ParseError);
    CHECK_THROWS_AS(parse_frame_line("[1,2]"), ParseError);
    CHECK_THROWS_AS(parse_frame_line(R"({"t_ms":0,"expression":"none","activity":"none"})"),
                    ValidationError);  // missing frame_idx
    CHECK_THROWS_AS(
        parse_frame_line(R"({"frame_idx":-1,"t_ms":0,"expression":"none","activity":"none"})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_frame_line(R"({"frame_idx":0,"t_ms":0,"expression":"smug","activity":"none"})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_frame_line(
            R"({"frame_idx":0,"t_ms":0,"expression":"none","activity":"none","face":{"bbox":[0,0,0,1],"nose":[0.5,0.5],"eyes_detected":true}})"),
        ValidationError);  // zero-width box
    CHECK_THROWS_AS(
        parse_frame_line(
            R"({"frame_idx":0,"t_ms":0,"expression":"none","activity":"none","hands":[{"landmarks":[[1.5,0.5]]}]})"),
        ValidationError);  // landmark outside the unit square
    CHECK_THROWS_AS(
        parse_frame_line(
            R"({"frame_idx":0,"t_ms":0,"expression":"none","activity":"none","hands":[{"landmarks":[]}]})"),
        ValidationError);
}

TEST_CASE("frame streams enforce monotonic indices and report the line") {
    const std::string good = serialize_frame(sample_frame()) + "\n";
    FrameObservation second = sample_frame();
    second.frame_idx = 4;
    second.t_ms = 133;
    const LectureSession s = parse_frame_stream(good + serialize_frame(second) + "\n", 30.0);
    CHECK(s.frames.size() == 2);
    CHECK(s.fps == 30.0);
    CHECK(s.duration_ms == 133 + 33);

    try {
        parse_frame_stream(good + good, 30.0);
        FAIL("expected a monotonicity error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    // an empty stream is fine at parse time; scoring rejects empty sessions
    CHECK(parse_frame_stream("", 30.0).frames.empty());
    CHECK_THROWS_AS(parse_frame_stream(good, 0.0), ValidationError);
}

TEST_CASE("random frames survive the serialize/parse cycle") {
    std::mt19937 gen(777);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::int64_t idx = 0, t = 0;
    for (int i = 0; i < 300; ++i) {
        FrameObservation f;
        f.frame_idx = (idx += 1 + static_cast<std::int64_t>(u01(gen) * 3));
        f.t_ms = (t += 1 + static_cast<std::int64_t>(u01(gen) * 90));
        f.expression = static_cast<ExpressionLabel>(static_cast<int>(u01(gen) * 8));
        f.activity = static_cast<ActivityLabel>(static_cast<int>(u01(gen) * 8));
        if (u01(gen) < 0.7) {
            const double w = 0.2 + 0.3 * u01(gen);
            const double h = 0.2 + 0.3 * u01(gen);
            const double x = u01(gen) * (1.0 - w);
            const double y = u01(gen) * (1.0 - h);
            f.face = FaceGeometry{Rect{x, y, w, h},
                                  Point{x + w * u01(gen), y + h * u01(gen)}, u01(gen) < 0.8};
        }
        const int hands = static_cast<int>(u01(gen) * 3);
        for (int hi = 0; hi < hands; ++hi) {
            HandObservation hand;
            const int pts = 1 + static_cast<int>(u01(gen) * 4);
            for (int p = 0; p < pts; ++p) hand.landmarks.push_back({u01(gen), u01(gen)});
            f.hands.push_back(hand);
        }
        CHECK(parse_frame_line(serialize_frame(f)) == f);
    }
}

TEST_CASE("word timelines round-trip and reject regressions") {
    WordTimeline words;
    words.events = {{0, "alpha"}, {300, "beta"}, {300, "gamma"}, {900, "delta"}};
    CHECK(parse_words(serialize_words(words)) == words);

    CHECK_THROWS_AS(parse_words(R"({"t_ms":100,"word":"a"}
{"t_ms":50,"word":"b"}
)"),
                    ValidationError);
    CHECK_THROWS_AS(parse_words(R"({"t_ms":100})"), ValidationError);
    CHECK(parse_words("").events.empty());
}

TEST_CASE("wav encoding round-trips on the 16-bit grid") {
    AudioTrack t;
    t.sample_rate = 16000;
    for (int i = -5; i <= 5; ++i)
        t.samples.push_back(static_cast<float>(i * 991) / 32768.0f);
    const AudioTrack back = parse_wav(write_wav(t));
    CHECK(back == t);
}

TEST_CASE("wav parser rejects what it does not support") {
    AudioTrack t;
    t.sample_rate = 16000;
    t.samples.assign(64, 0.0f);
    const std::vector<std::uint8_t> good = write_wav(t);

    std::vector<std::uint8_t> stereo = good;
    stereo[22] = 2;
    CHECK_THROWS_AS(parse_wav(stereo), UnsupportedFormatError);

    std::vector<std::uint8_t> float_fmt = good;
    float_fmt[20] = 3;
    CHECK_THROWS_AS(parse_wav(float_fmt), UnsupportedFormatError);

    std::vector<std::uint8_t> eight_bit = good;
    eight_bit[34] = 8;
    CHECK_THROWS_AS(parse_wav(eight_bit), UnsupportedFormatError);

    std::vector<std::uint8_t> slow = good;
    slow[24] = 0xA0;  // 4000 Hz little-endian
    slow[25] = 0x0F;
    slow[26] = 0;
    slow[27] = 0;
    CHECK_THROWS_AS(parse_wav(slow), ValidationError);

    const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + 16);
    CHECK_THROWS_AS(parse_wav(truncated), ParseError);

    std::vector<std::uint8_t> not_riff = good;
    not_riff[0] = 'X';
    CHECK_THROWS_AS(parse_wav(not_riff), ParseError);
}

TEST_CASE("annotation tables round-trip") {
    AnnotationSet set;
    set.frame_items = {{"a1", "f0", 3, 2, 4, 1, 2}, {"a2", "f0", 1, 1, 1, 1, 1}};
    set.audio_items = {{"a1", "w0", 4}, {"a2", "w0", 2}};
    CHECK(parse_annotations(serialize_annotations(set)) == set);
}

TEST_CASE("annotation parsing rejects structural problems") {
    const std::string header =
        "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n";
    CHECK_THROWS_AS(parse_annotations("who,what\n"), ParseError);
    CHECK_THROWS_AS(parse_annotations(header + "a1,f0,frame,5,2,2,2,2,\n"), ValidationError);
    CHECK_THROWS_AS(parse_annotations(header + "a1,f0,frame,3,2,2,2,2,4\n"),
                    ValidationError);  // speech must stay empty on frame rows
    CHECK_THROWS_AS(parse_annotations(header + "a1,w0,audio,3,,,,,4\n"),
                    ValidationError);  // expression must stay empty on audio rows
    CHECK_THROWS_AS(parse_annotations(header + "a1,f0,frame,3,2,2,2,2,\n"
                                               "a1,f0,frame,3,2,2,2,2,\n"),
                    ValidationError);  // duplicate annotator/item pair
    CHECK_THROWS_AS(parse_annotations(header + "a1,f0,video,3,2,2,2,2,\n"), ValidationError);
    CHECK(parse_annotations(header).frame_items.empty());
}

TEST_CASE("make_session spans frames and audio") {
    FrameObservation f0 = sample_frame();
    f0.frame_idx = 0;
    f0.t_ms = 0;
    FrameObservation f1 = sample_frame();
    f1.frame_idx = 1;
    f1.t_ms = 33;
    const std::string jsonl = serialize_frame(f0) + "\n" + serialize_frame(f1) + "\n";

    const LectureSession bare = make_session(jsonl, 30.0);
    CHECK(bare.duration_ms == 66);
    CHECK(!bare.audio.has_value());

    AudioTrack track;
    track.sample_rate = 16000;
    track.samples.assign(16000, 0.0f);  // one second
    const LectureSession with_audio = make_session(jsonl, 30.0, track);
    CHECK(with_audio.duration_ms == 1000);
    CHECK(with_audio.audio.has_value());
}

TEST_CASE("file helpers report missing paths as input errors") {
    CHECK_THROWS_AS(read_file("/nonexistent/path/file.txt"), Error);
    CHECK_THROWS_AS(read_file_bytes("/nonexistent/path/file.bin"), Error);
}
