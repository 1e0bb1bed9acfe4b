#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lectometer/config.hpp"
#include "lectometer/error.hpp"
#include "lectometer/eval.hpp"
#include "lectometer/fusion.hpp"
#include "lectometer/io.hpp"
#include "lectometer/synth.hpp"

using nlohmann::json;

namespace {

void add_engine_options(CLI::App* cmd, lecto::EngineConfig& cfg) {
    cmd->add_option("--fps", cfg.fps, "frame rate of the incoming stream");
    cmd->add_option("--frame-ms", cfg.voicing.frame_ms, "RMS analysis window length");
    cmd->add_option("--hop-ms", cfg.voicing.hop_ms, "RMS analysis hop");
    cmd->add_option("--silence-rms", cfg.voicing.silence_rms, "voiced RMS threshold");
    cmd->add_option("--min-gap-ms", cfg.voicing.min_gap_ms, "merge voiced gaps below this");
    cmd->add_option("--min-voiced-ms", cfg.voicing.min_voiced_ms,
                    "drop voiced intervals below this");
    cmd->add_option("--window-ms", cfg.voicing.window_ms, "speech evaluation window");
    cmd->add_option("--min-final-window-ms", cfg.voicing.min_final_window_ms,
                    "shorter final windows inherit their predecessor");
    cmd->add_option("--pose-mild", cfg.pose.mild, "forward-looking nose offset bound");
    cmd->add_option("--pose-extreme", cfg.pose.extreme, "far-turned nose offset bound");
    cmd->add_option("--hand-moving-speed", cfg.hand_moving_speed,
                    "mean hand speed counted as moving");
    cmd->add_option("--hand-window-ms", cfg.hand_window_ms, "hand motion averaging window");
    cmd->add_option("--alert-threshold", cfg.alert_threshold, "alert when total <= this");
    cmd->add_option("--alert-sustain-ms", cfg.alert_sustain_ms,
                    "low-score duration that raises an alert");
}

std::optional<std::int64_t> parse_index(const std::string& s) {
    if (s.empty()) return std::nullopt;
    for (char c : s)
        if (c < '0' || c > '9') return std::nullopt;
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// items.csv: "item_id,frame_idx", one row per mapped item.
std::map<std::string, std::int64_t> parse_item_map(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw lecto::ParseError("items file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "item_id,frame_idx")
        throw lecto::ParseError("items header must be \"item_id,frame_idx\"");
    std::map<std::string, std::int64_t> map;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw lecto::ParseError("expected item_id,frame_idx", line_no);
        const std::string id = line.substr(0, comma);
        const auto idx = parse_index(line.substr(comma + 1));
        if (!idx) throw lecto::ParseError("frame_idx must be a non-negative integer", line_no);
        if (!map.emplace(id, *idx).second)
            throw lecto::ParseError("duplicate item \"" + id + "\"", line_no);
    }
    return map;
}

struct ReportData {
    std::map<std::int64_t, lecto::MachinePredictions::FrameItem> frames;
    std::vector<int> window_scores;
    bool has_windows = false;
};

ReportData load_report(const std::string& path) {
    ReportData data;
    const std::string text = lecto::read_file(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line)) throw lecto::ParseError("report is empty");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != "frame_idx,t_ms,expression,activity,pose,hand,speech,total")
            throw lecto::ParseError("unrecognized report csv header");
        long line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string cell;
            std::vector<std::int64_t> v;
            while (std::getline(row, cell, ',')) {
                const auto n = parse_index(cell);
                if (!n) throw lecto::ParseError("expected integer cell", line_no);
                v.push_back(*n);
            }
            if (v.size() != 8) throw lecto::ParseError("expected 8 columns", line_no);
            lecto::MachinePredictions::FrameItem item;
            item.parts = {static_cast<int>(v[2]), static_cast<int>(v[3]),
                          static_cast<int>(v[4]), static_cast<int>(v[5]),
                          static_cast<int>(v[6])};
            item.total = static_cast<int>(v[7]);
            data.frames[v[0]] = item;
        }
        return data;
    }
    try {
        const json j = json::parse(text);
        for (const json& f : j.at("frames")) {
            const json& parts = f.at("parts");
            lecto::MachinePredictions::FrameItem item;
            item.parts = {parts.at("expression").get<int>(), parts.at("activity").get<int>(),
                          parts.at("pose").get<int>(), parts.at("hand").get<int>(),
                          parts.at("speech").get<int>()};
            item.total = f.at("total").get<int>();
            data.frames[f.at("frame_idx").get<std::int64_t>()] = item;
        }
        data.has_windows = j.contains("speech_windows");
        if (data.has_windows)
            for (const json& w : j.at("speech_windows"))
                data.window_scores.push_back(w.at("speech_score").get<int>());
    } catch (const json::exception& e) {
        throw lecto::ParseError(std::string("report: ") + e.what());
    }
    return data;
}

int run_score(const lecto::EngineConfig& cfg, const std::string& frames_path,
              const std::string& audio_path, const std::string& words_path,
              const std::string& out_path, const std::string& format) {
    std::optional<lecto::AudioTrack> audio;
    if (!audio_path.empty()) audio = lecto::parse_wav(lecto::read_file_bytes(audio_path));
    std::optional<lecto::WordTimeline> words;
    if (!words_path.empty()) words = lecto::parse_words(lecto::read_file(words_path));

    const lecto::LectureSession session =
        lecto::make_session(lecto::read_file(frames_path), cfg.fps, std::move(audio),
                            std::move(words));
    const lecto::SessionReport report = lecto::score_session(session, cfg);

    lecto::write_file(out_path, lecto::render_report(report, "json"));
    std::cout << "report: " << out_path << "\n";
    if (format == "csv") {
        std::string csv_path = out_path;
        if (csv_path.size() >= 5 && csv_path.substr(csv_path.size() - 5) == ".json")
            csv_path = csv_path.substr(0, csv_path.size() - 5) + ".csv";
        else
            csv_path += ".csv";
        lecto::write_file(csv_path, lecto::render_report(report, "csv"));
        std::cout << "report: " << csv_path << "\n";
    }
    std::cout << "frames: " << report.frame_count << "\n"
              << "average_score: " << report.average_score << "\n";
    return 0;
}

int run_stream(const lecto::EngineConfig& cfg) {
    lecto::StreamScorer scorer(cfg, cfg.fps);
    std::string line;
    long line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            const lecto::FrameObservation obs = lecto::parse_frame_line(line);
            const auto step = scorer.step(obs, 0);
            const lecto::FrameScore& s = step.score;
            std::cout << "SCORE t_ms=" << s.t_ms << " frame=" << s.frame_idx
                      << " total=" << s.total << " expression=" << s.parts.expression
                      << " activity=" << s.parts.activity << " pose=" << s.parts.pose
                      << " hand=" << s.parts.hand << " speech=" << s.parts.speech << std::endl;
            if (step.alert) std::cout << lecto::format_alert(*step.alert) << std::endl;
        } catch (const lecto::Error& e) {
            std::cerr << "line " << line_no << ": " << e.what() << std::endl;
        }
    }
    return 0;
}

int run_eval(const std::string& report_path, const std::string& annotations_path,
             const std::string& items_path, double alpha, const std::string& out_path) {
    const ReportData report = load_report(report_path);
    const lecto::AnnotationSet annotations =
        lecto::parse_annotations(lecto::read_file(annotations_path));
    std::map<std::string, std::int64_t> item_map;
    if (!items_path.empty()) item_map = parse_item_map(lecto::read_file(items_path));

    lecto::MachinePredictions machine;
    for (const lecto::FrameAnnotation& a : annotations.frame_items) {
        if (machine.frames.count(a.item_id)) continue;
        std::int64_t frame_idx;
        if (auto it = item_map.find(a.item_id); it != item_map.end()) {
            frame_idx = it->second;
        } else if (auto idx = parse_index(a.item_id)) {
            frame_idx = *idx;
        } else {
            throw lecto::UsageError("item \"" + a.item_id +
                                    "\" is not a frame index; supply an items file");
        }
        if (auto it = report.frames.find(frame_idx); it != report.frames.end())
            machine.frames[a.item_id] = it->second;
    }
    for (const lecto::AudioAnnotation& a : annotations.audio_items) {
        if (machine.audio_speech.count(a.item_id)) continue;
        const auto idx = parse_index(a.item_id);
        if (!idx)
            throw lecto::UsageError("audio item \"" + a.item_id +
                                    "\" must name a speech window index");
        if (!report.has_windows)
            throw lecto::UsageError(
                "audio-rated items need a json report with speech windows");
        if (*idx < static_cast<std::int64_t>(report.window_scores.size()))
            machine.audio_speech[a.item_id] =
                report.window_scores[static_cast<std::size_t>(*idx)];
    }

    const lecto::Evaluation ev = lecto::evaluate(machine, annotations, alpha);
    lecto::write_file(out_path, lecto::evaluation_to_json(ev).dump(2) + "\n");
    std::cout << lecto::evaluation_text(ev);
    std::cout << "evaluation: " << out_path << "\n";
    return 0;
}

int run_synth(const lecto::SynthProfile& profile, const std::string& out_dir) {
    const lecto::SynthResult result = lecto::synthesize(profile);
    std::filesystem::create_directories(out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    lecto::write_file(path("frames.jsonl"), lecto::serialize_frames(result.frames));
    lecto::write_file(path("words.jsonl"), lecto::serialize_words(result.words));
    lecto::write_file_bytes(path("audio.wav"), lecto::write_wav(result.audio));
    lecto::write_file(path("truth.json"), result.truth.dump(2) + "\n");
    std::cout << "wrote frames.jsonl, words.jsonl, audio.wav, truth.json under " << out_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lecture style scoring engine"};
    app.require_subcommand(1);

    try {
        lecto::EngineConfig cfg = lecto::load_config_from_env();

        CLI::App* score = app.add_subcommand("score", "score a recorded session");
        std::string frames_path, audio_path, words_path;
        std::string out_path = "report.json";
        std::string format = "json";
        score->add_option("--frames", frames_path, "frame observations, one JSON per line")
            ->required();
        score->add_option("--audio", audio_path, "16-bit mono PCM WAV");
        score->add_option("--words", words_path, "recognized words, one JSON per line");
        score->add_option("--out", out_path, "report path");
        score->add_option("--format", format, "additional report rendering")
            ->check(CLI::IsMember({"json", "csv"}));
        add_engine_options(score, cfg);

        CLI::App* stream = app.add_subcommand("stream", "score frames from standard input");
        add_engine_options(stream, cfg);

        CLI::App* eval = app.add_subcommand("eval", "compare a report against annotations");
        std::string report_path = "report.json";
        std::string annotations_path, items_path;
        std::string eval_out = "evaluation.json";
        double alpha = 0.05;
        eval->add_option("--report", report_path, "machine report (json or csv)");
        eval->add_option("--annotations", annotations_path, "annotation csv")->required();
        eval->add_option("--items", items_path, "item_id,frame_idx alignment csv");
        eval->add_option("--alpha", alpha, "significance level");
        eval->add_option("--out", eval_out, "evaluation path");

        CLI::App* synth = app.add_subcommand("synth", "generate a synthetic session");
        lecto::SynthProfile profile;
        profile.fps = cfg.fps;
        std::string synth_out = ".";
        double p_expression = 0, p_activity = 0, p_pose = 0, p_hand = 0, p_speech = 0;
        synth->add_option("--quality", profile.quality, "positive-observation probability");
        synth->add_option("--duration-ms", profile.duration_ms, "session length");
        synth->add_option("--fps", profile.fps, "frame rate");
        synth->add_option("--seed", profile.seed, "generator seed");
        CLI::Option* oe = synth->add_option("--p-expression", p_expression,
                                            "override quality for expressions");
        CLI::Option* oa =
            synth->add_option("--p-activity", p_activity, "override quality for activity");
        CLI::Option* op = synth->add_option("--p-pose", p_pose, "override quality for pose");
        CLI::Option* oh = synth->add_option("--p-hand", p_hand, "override quality for hands");
        CLI::Option* os =
            synth->add_option("--p-speech", p_speech, "override quality for speech");
        synth->add_option("--out", synth_out, "output directory");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        if (oe->count()) profile.p_expression = p_expression;
        if (oa->count()) profile.p_activity = p_activity;
        if (op->count()) profile.p_pose = p_pose;
        if (oh->count()) profile.p_hand = p_hand;
        if (os->count()) profile.p_speech = p_speech;

        if (score->parsed())
            return run_score(cfg, frames_path, audio_path, words_path, out_path, format);
        if (stream->parsed()) return run_stream(cfg);
        if (eval->parsed())
            return run_eval(report_path, annotations_path, items_path, alpha, eval_out);
        if (synth->parsed()) return run_synth(profile, synth_out);
        return 2;
    } catch (const lecto::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
