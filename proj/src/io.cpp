#include "lectometer/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lectometer/error.hpp"

using nlohmann::json;

namespace lecto {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

double require_number(const json& j, const char* field, long line) {
    if (!j.is_number())
        throw ValidationError(std::string("field \"") + field + "\" must be a number", line);
    return j.get<double>();
}

std::int64_t require_int(const json& j, const char* field, long line) {
    if (!j.is_number_integer())
        throw ValidationError(std::string("field \"") + field + "\" must be an integer", line);
    return j.get<std::int64_t>();
}

const json& require_field(const json& obj, const char* field, long line) {
    auto it = obj.find(field);
    if (it == obj.end())
        throw ValidationError(std::string("missing field \"") + field + "\"", line);
    return *it;
}

Point parse_point(const json& j, const char* field, long line) {
    if (!j.is_array() || j.size() != 2)
        throw ValidationError(std::string("field \"") + field + "\" must be [x, y]", line);
    Point p{require_number(j[0], field, line), require_number(j[1], field, line)};
    if (!in_unit(p.x) || !in_unit(p.y))
        throw ValidationError(std::string("field \"") + field +
                                  "\" must lie inside the unit square",
                              line);
    return p;
}

FaceGeometry parse_face(const json& j, long line) {
    if (!j.is_object()) throw ValidationError("field \"face\" must be an object or null", line);
    FaceGeometry face;
    const json& bbox = require_field(j, "bbox", line);
    if (!bbox.is_array() || bbox.size() != 4)
        throw ValidationError("field \"bbox\" must be [x, y, w, h]", line);
    face.bbox = Rect{require_number(bbox[0], "bbox", line), require_number(bbox[1], "bbox", line),
                     require_number(bbox[2], "bbox", line), require_number(bbox[3], "bbox", line)};
    if (!in_unit(face.bbox.x) || !in_unit(face.bbox.y) || face.bbox.w <= 0.0 ||
        face.bbox.h <= 0.0 || face.bbox.x + face.bbox.w > 1.0 ||
        face.bbox.y + face.bbox.h > 1.0)
        throw ValidationError("face bbox must be a non-degenerate box inside the unit square",
                              line);
    face.nose = parse_point(require_field(j, "nose", line), "nose", line);
    const json& eyes = require_field(j, "eyes_detected", line);
    if (!eyes.is_boolean())
        throw ValidationError("field \"eyes_detected\" must be a boolean", line);
    face.eyes_detected = eyes.get<bool>();
    return face;
}

std::vector<HandObservation> parse_hands(const json& j, long line) {
    if (!j.is_array()) throw ValidationError("field \"hands\" must be an array", line);
    std::vector<HandObservation> hands;
    hands.reserve(j.size());
    for (const json& h : j) {
        if (!h.is_object()) throw ValidationError("hand entries must be objects", line);
        const json& lm = require_field(h, "landmarks", line);
        if (!lm.is_array() || lm.empty())
            throw ValidationError("field \"landmarks\" must be a non-empty array", line);
        HandObservation hand;
        hand.landmarks.reserve(lm.size());
        for (const json& p : lm) hand.landmarks.push_back(parse_point(p, "landmarks", line));
        hands.push_back(std::move(hand));
    }
    return hands;
}

json point_to_json(const Point& p) { return json::array({p.x, p.y}); }

std::vector<std::string> split_csv_row(std::string_view row) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : row) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

int parse_rating(const std::string& field, const char* column, long line) {
    if (field.empty())
        throw ValidationError(std::string("column \"") + column + "\" must not be empty", line);
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(field, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("column \"") + column + "\" is not an integer", line);
    }
    if (pos != field.size())
        throw ParseError(std::string("column \"") + column + "\" is not an integer", line);
    if (v < 1 || v > 4)
        throw ValidationError(std::string("rating in column \"") + column +
                                  "\" out of range 1..4",
                              line);
    return v;
}

void require_empty(const std::string& field, const char* column, long line) {
    if (!field.empty())
        throw ValidationError(std::string("column \"") + column +
                                  "\" must stay empty for this item type",
                              line);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, size_t off) {
    return static_cast<std::uint16_t>(static_cast<std::uint16_t>(b[off]) |
                                      (static_cast<std::uint16_t>(b[off + 1]) << 8));
}

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void push_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

void push_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

}  // namespace

FrameObservation parse_frame_line(std::string_view line, long line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("frame line must be a JSON object", line_no);

    FrameObservation f;
    f.frame_idx = require_int(require_field(j, "frame_idx", line_no), "frame_idx", line_no);
    f.t_ms = require_int(require_field(j, "t_ms", line_no), "t_ms", line_no);
    if (f.frame_idx < 0) throw ValidationError("field \"frame_idx\" must be non-negative", line_no);
    if (f.t_ms < 0) throw ValidationError("field \"t_ms\" must be non-negative", line_no);

    const json& expr = require_field(j, "expression", line_no);
    if (!expr.is_string()) throw ValidationError("field \"expression\" must be a string", line_no);
    auto e = expression_from_string(expr.get_ref<const std::string&>());
    if (!e)
        throw ValidationError("unknown expression label \"" + expr.get<std::string>() + "\"",
                              line_no);
    f.expression = *e;

    const json& act = require_field(j, "activity", line_no);
    if (!act.is_string()) throw ValidationError("field \"activity\" must be a string", line_no);
    auto a = activity_from_string(act.get_ref<const std::string&>());
    if (!a)
        throw ValidationError("unknown activity label \"" + act.get<std::string>() + "\"",
                              line_no);
    f.activity = *a;

    if (auto it = j.find("face"); it != j.end() && !it->is_null())
        f.face = parse_face(*it, line_no);
    if (auto it = j.find("hands"); it != j.end() && !it->is_null())
        f.hands = parse_hands(*it, line_no);
    return f;
}

LectureSession parse_frame_stream(std::istream& in, double fps) {
    if (fps <= 0.0) throw ValidationError("fps must be positive");
    LectureSession session;
    session.fps = fps;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        FrameObservation f = parse_frame_line(line, line_no);
        if (!session.frames.empty()) {
            const FrameObservation& prev = session.frames.back();
            if (f.frame_idx <= prev.frame_idx)
                throw ValidationError("non-monotonic frame_idx", line_no);
            if (f.t_ms <= prev.t_ms) throw ValidationError("non-monotonic t_ms", line_no);
        }
        session.frames.push_back(std::move(f));
    }
    if (!session.frames.empty())
        session.duration_ms =
            session.frames.back().t_ms + std::llround(1000.0 / fps);
    return session;
}

LectureSession parse_frame_stream(std::string_view text, double fps) {
    std::istringstream in{std::string(text)};
    return parse_frame_stream(in, fps);
}

std::string serialize_frame(const FrameObservation& f) {
    json j;
    j["frame_idx"] = f.frame_idx;
    j["t_ms"] = f.t_ms;
    j["expression"] = std::string(to_string(f.expression));
    j["activity"] = std::string(to_string(f.activity));
    if (f.face) {
        json face;
        face["bbox"] = json::array({f.face->bbox.x, f.face->bbox.y, f.face->bbox.w, f.face->bbox.h});
        face["nose"] = point_to_json(f.face->nose);
        face["eyes_detected"] = f.face->eyes_detected;
        j["face"] = std::move(face);
    } else {
        j["face"] = nullptr;
    }
    json hands = json::array();
    for (const HandObservation& h : f.hands) {
        json lm = json::array();
        for (const Point& p : h.landmarks) lm.push_back(point_to_json(p));
        hands.push_back(json{{"landmarks", std::move(lm)}});
    }
    j["hands"] = std::move(hands);
    return j.dump();
}

std::string serialize_frames(const std::vector<FrameObservation>& frames) {
    std::string out;
    for (const FrameObservation& f : frames) {
        out += serialize_frame(f);
        out += '\n';
    }
    return out;
}

WordTimeline parse_words(std::istream& in) {
    WordTimeline words;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!j.is_object()) throw ParseError("word line must be a JSON object", line_no);
        WordEvent ev;
        ev.t_ms = require_int(require_field(j, "t_ms", line_no), "t_ms", line_no);
        if (ev.t_ms < 0) throw ValidationError("field \"t_ms\" must be non-negative", line_no);
        const json& w = require_field(j, "word", line_no);
        if (!w.is_string()) throw ValidationError("field \"word\" must be a string", line_no);
        ev.word = w.get<std::string>();
        if (!words.events.empty() && ev.t_ms < words.events.back().t_ms)
            throw ValidationError("non-monotonic t_ms", line_no);
        words.events.push_back(std::move(ev));
    }
    return words;
}

WordTimeline parse_words(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_words(in);
}

std::string serialize_words(const WordTimeline& words) {
    std::string out;
    for (const WordEvent& ev : words.events) {
        json j;
        j["t_ms"] = ev.t_ms;
        j["word"] = ev.word;
        out += j.dump();
        out += '\n';
    }
    return out;
}

AudioTrack parse_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ParseError("not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    size_t data_off = 0, data_len = 0;
    bool have_data = false;

    size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const char* tag = reinterpret_cast<const char*>(bytes.data() + off);
        std::uint32_t size = read_u32(bytes, off + 4);
        size_t body = off + 8;
        if (body + size > bytes.size()) throw ParseError("truncated chunk in WAVE file");
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (size < 16) throw ParseError("fmt chunk too small");
            format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            rate = read_u32(bytes, body + 4);
            bits = read_u16(bytes, body + 14);
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data_off = body;
            data_len = size;
            have_data = true;
        }
        off = body + size + (size % 2);  // chunks are word aligned
    }
    if (!have_fmt) throw ParseError("missing fmt chunk");
    if (!have_data) throw ParseError("missing data chunk");
    if (format != 1) throw UnsupportedFormatError("only uncompressed PCM is supported");
    if (channels != 1)
        throw UnsupportedFormatError("only mono audio is supported (got " +
                                     std::to_string(channels) + " channels)");
    if (bits != 16)
        throw UnsupportedFormatError("only 16-bit samples are supported (got " +
                                     std::to_string(bits) + "-bit)");
    if (rate < 8000)
        throw ValidationError("sample rate must be at least 8000 Hz (got " +
                              std::to_string(rate) + ")");
    if (data_len % 2 != 0) throw ParseError("data chunk holds a truncated sample");

    AudioTrack track;
    track.sample_rate = static_cast<int>(rate);
    track.samples.resize(data_len / 2);
    for (size_t i = 0; i < track.samples.size(); ++i) {
        std::int16_t v = static_cast<std::int16_t>(read_u16(bytes, data_off + 2 * i));
        track.samples[i] = static_cast<float>(v) / 32768.0f;
    }
    return track;
}

std::vector<std::uint8_t> write_wav(const AudioTrack& track) {
    if (track.sample_rate < 8000)
        throw ValidationError("sample rate must be at least 8000 Hz");
    const std::uint32_t data_len = static_cast<std::uint32_t>(track.samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_len);
    push_tag(out, "RIFF");
    push_u32(out, 36 + data_len);
    push_tag(out, "WAVE");
    push_tag(out, "fmt ");
    push_u32(out, 16);
    push_u16(out, 1);  // PCM
    push_u16(out, 1);  // mono
    push_u32(out, static_cast<std::uint32_t>(track.sample_rate));
    push_u32(out, static_cast<std::uint32_t>(track.sample_rate) * 2);
    push_u16(out, 2);   // block align
    push_u16(out, 16);  // bits
    push_tag(out, "data");
    push_u32(out, data_len);
    for (float s : track.samples) {
        long v = std::lround(static_cast<double>(s) * 32768.0);
        if (v > 32767) v = 32767;
        if (v < -32768) v = -32768;
        push_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
    return out;
}

AnnotationSet parse_annotations(std::string_view csv) {
    static const char* kHeader =
        "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech";
    std::istringstream in{std::string(csv)};
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty annotation file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw ParseError(std::string("expected header \"") + kHeader + "\"", line_no);

    AnnotationSet set;
    std::set<std::pair<std::string, std::string>> seen_frame, seen_audio;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv_row(line);
        if (f.size() != 9)
            throw ParseError("expected 9 comma-separated columns, got " +
                                 std::to_string(f.size()),
                             line_no);
        const std::string& annotator = f[0];
        const std::string& item = f[1];
        const std::string& type = f[2];
        if (annotator.empty()) throw ValidationError("annotator_id must not be empty", line_no);
        if (item.empty()) throw ValidationError("item_id must not be empty", line_no);
        if (type == "frame") {
            if (!seen_frame.emplace(annotator, item).second)
                throw ValidationError("duplicate rating for annotator \"" + annotator +
                                          "\", item \"" + item + "\"",
                                      line_no);
            FrameAnnotation a;
            a.annotator_id = annotator;
            a.item_id = item;
            a.expression = parse_rating(f[3], "expression", line_no);
            a.activity = parse_rating(f[4], "activity", line_no);
            a.hand = parse_rating(f[5], "hand", line_no);
            a.head = parse_rating(f[6], "head", line_no);
            a.overall = parse_rating(f[7], "overall", line_no);
            require_empty(f[8], "speech", line_no);
            set.frame_items.push_back(std::move(a));
        } else if (type == "audio") {
            if (!seen_audio.emplace(annotator, item).second)
                throw ValidationError("duplicate rating for annotator \"" + annotator +
                                          "\", item \"" + item + "\"",
                                      line_no);
            AudioAnnotation a;
            a.annotator_id = annotator;
            a.item_id = item;
            require_empty(f[3], "expression", line_no);
            require_empty(f[4], "activity", line_no);
            require_empty(f[5], "hand", line_no);
            require_empty(f[6], "head", line_no);
            require_empty(f[7], "overall", line_no);
            a.speech = parse_rating(f[8], "speech", line_no);
            set.audio_items.push_back(std::move(a));
        } else {
            throw ValidationError("item_type must be \"frame\" or \"audio\", got \"" + type + "\"",
                                  line_no);
        }
    }
    return set;
}

std::string serialize_annotations(const AnnotationSet& set) {
    std::string out =
        "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n";
    for (const FrameAnnotation& a : set.frame_items) {
        out += a.annotator_id + ',' + a.item_id + ",frame," + std::to_string(a.expression) + ',' +
               std::to_string(a.activity) + ',' + std::to_string(a.hand) + ',' +
               std::to_string(a.head) + ',' + std::to_string(a.overall) + ",\n";
    }
    for (const AudioAnnotation& a : set.audio_items) {
        out += a.annotator_id + ',' + a.item_id + ",audio,,,,,," + std::to_string(a.speech) + '\n';
    }
    return out;
}

LectureSession make_session(std::string_view frames_jsonl, double fps,
                            std::optional<AudioTrack> audio, std::optional<WordTimeline> words) {
    LectureSession session = parse_frame_stream(frames_jsonl, fps);
    if (audio) {
        session.duration_ms = std::max(session.duration_ms, audio->duration_ms());
        session.audio = std::move(audio);
    }
    if (words) session.words = std::move(words);
    return session;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::string s = read_file(path);
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace lecto
