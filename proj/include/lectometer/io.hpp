#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lectometer/types.hpp"

namespace lecto {

// --- frame streams (line-delimited JSON) ---

// Parses a single frames.jsonl line. line_no is used for diagnostics only.
FrameObservation parse_frame_line(std::string_view line, long line_no = -1);

// Parses a whole stream of frame lines. frame_idx and t_ms must be strictly
// increasing. The returned session has fps set and duration_ms covering the
// last frame plus one frame period; audio/words are left empty.
LectureSession parse_frame_stream(std::istream& in, double fps);
LectureSession parse_frame_stream(std::string_view text, double fps);

std::string serialize_frame(const FrameObservation& f);
std::string serialize_frames(const std::vector<FrameObservation>& frames);

// --- words (line-delimited JSON: {"t_ms":..., "word":...}) ---

WordTimeline parse_words(std::istream& in);
WordTimeline parse_words(std::string_view text);
std::string serialize_words(const WordTimeline& words);

// --- WAV (RIFF, 16-bit mono PCM) ---

AudioTrack parse_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_wav(const AudioTrack& track);

// --- annotation CSV ---
// Header: annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech
// item_type is "frame" or "audio"; columns not used by the item type stay empty.

AnnotationSet parse_annotations(std::string_view csv);
std::string serialize_annotations(const AnnotationSet& set);

// --- assembly ---

// Combines parsed parts into a session. duration_ms is the larger of the
// frame-derived duration and the audio length, so speech windows always
// cover both.
LectureSession make_session(std::string_view frames_jsonl, double fps,
                            std::optional<AudioTrack> audio = std::nullopt,
                            std::optional<WordTimeline> words = std::nullopt);

// Small file helpers shared by the CLI and tests.
std::string read_file(const std::string& path);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file(const std::string& path, std::string_view content);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace lecto
