#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "lectometer/io.hpp"

using nlohmann::json;

namespace {

std::string bin() {
    const char* env = std::getenv("LECTOMETER_BIN");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string("./lectometer");
}

struct Cmd {
    int status = -1;
    std::string output;
};

Cmd run(const std::string& command) {
    Cmd r;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int rc = pclose(pipe);
    if (WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
    return r;
}

std::string temp_dir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "lecto-cli-XXXXXX").string();
    char* made = mkdtemp(tmpl.data());
    REQUIRE(made != nullptr);
    return tmpl;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

// generates a 5 second best-case session and scores it; returns the dir
std::string scored_session(const std::string& extra_score_flags = "") {
    const std::string dir = temp_dir();
    const Cmd synth = run(bin() + " synth --quality 1 --duration-ms 5000 --seed 7 --out " + dir +
                          " 2>&1");
    REQUIRE(synth.status == 0);
    const Cmd score = run(bin() + " score --frames " + dir + "/frames.jsonl --audio " + dir +
                          "/audio.wav --words " + dir + "/words.jsonl --out " + dir +
                          "/report.json " + extra_score_flags + " 2>&1");
    REQUIRE(score.status == 0);
    return dir;
}

}  // namespace

TEST_CASE("cli: score produces a report that matches the generated truth") {
    const std::string dir = scored_session();
    const json report = json::parse(lecto::read_file(dir + "/report.json"));
    const json truth = json::parse(lecto::read_file(dir + "/truth.json"));
    CHECK(report["frame_count"] == 150);
    CHECK(report["frames"].size() == 150);
    CHECK(report["average_score"] == 5.0);
    CHECK(report["average_score"] == truth["average_score"]);
    CHECK(report["config"]["fps"] == 30.0);
    REQUIRE(report["speech_windows"].size() == 1);
    CHECK(report["speech_windows"][0]["speech_score"] == 1);
}

TEST_CASE("cli: score without audio leaves the speech channel at zero") {
    const std::string dir = temp_dir();
    REQUIRE(run(bin() + " synth --quality 1 --duration-ms 5000 --seed 7 --out " + dir).status ==
            0);
    const Cmd score = run(bin() + " score --frames " + dir + "/frames.jsonl --out " + dir +
                          "/report.json 2>&1");
    CHECK(score.status == 0);
    const json report = json::parse(lecto::read_file(dir + "/report.json"));
    CHECK(report["average_score"] == 4.0);
    CHECK(report["speech_windows"][0]["word_density_pct"].is_null());
    CHECK(report["speech_windows"][0]["speech_score"] == 0);
    for (const json& f : report["frames"]) CHECK(f["parts"]["speech"] == 0);
}

TEST_CASE("cli: csv format adds a second rendering next to the json report") {
    const std::string dir = scored_session("--format csv");
    const std::string csv = lecto::read_file(dir + "/report.csv");
    CHECK(csv.rfind("frame_idx,t_ms,expression,activity,pose,hand,speech,total\n", 0) == 0);
    CHECK(count_occurrences(csv, "\n") == 151);  // header + one row per frame
}

TEST_CASE("cli: bad invocations exit with the usage code") {
    const std::string dir = temp_dir();
    CHECK(run(bin() + " 2>&1").status == 2);
    CHECK(run(bin() + " frobnicate 2>&1").status == 2);
    CHECK(run(bin() + " score 2>&1").status == 2);
    CHECK(run(bin() + " score --frames " + dir + "/missing.jsonl 2>&1").status == 2);
    CHECK(run(bin() + " score --frames x --format xml 2>&1").status == 2);
    CHECK(run(bin() + " score --frames x --bogus 2>&1").status == 2);
    const Cmd missing = run(bin() + " score --frames " + dir + "/missing.jsonl --out " + dir +
                            "/r.json 2>&1");
    CHECK(missing.status == 2);
    CHECK(missing.output.find("error:") != std::string::npos);
}

TEST_CASE("cli: stream scores each line and survives malformed input") {
    const std::string dir = temp_dir();
    const std::string good_face =
        R"("face":{"bbox":[0.25,0.25,0.5,0.5],"nose":[0.5,0.5],"eyes_detected":true})";
    lecto::write_file(
        dir + "/in.jsonl",
        R"({"frame_idx":0,"t_ms":0,"expression":"happy","activity":"attending",)" + good_face +
            ",\"hands\":[]}\n" +
            R"({"frame_idx":1,"t_ms":33,"expression":"sad","activity":"texting","face":null,"hands":[]})" +
            "\n" + "this is not a frame\n" +
            R"({"frame_idx":2,"t_ms":67,"expression":"happy","activity":"writing",)" + good_face +
            ",\"hands\":[]}\n");
    const Cmd r = run(bin() + " stream < " + dir + "/in.jsonl 2>" + dir + "/err.txt");
    CHECK(r.status == 0);
    CHECK(count_occurrences(r.output, "SCORE ") == 3);
    CHECK(r.output.find(
              "SCORE t_ms=0 frame=0 total=3 expression=1 activity=1 pose=1 hand=0 speech=0\n") !=
          std::string::npos);
    CHECK(r.output.find("SCORE t_ms=33 frame=1 total=0") != std::string::npos);
    const std::string err = lecto::read_file(dir + "/err.txt");
    CHECK(err.find("line 3:") != std::string::npos);
}

TEST_CASE("cli: stream raises a single alert per sustained low stretch") {
    const std::string dir = temp_dir();
    std::string lines;
    for (int k = 0; k < 5; ++k) {
        lines += R"({"frame_idx":)" + std::to_string(k) + R"(,"t_ms":)" +
                 std::to_string(k * 33 + (k > 0 ? 1 : 0)) +
                 R"(,"expression":"none","activity":"none","face":null,"hands":[]})" + "\n";
    }
    lecto::write_file(dir + "/low.jsonl", lines);
    const Cmd r = run(bin() + " stream --fps 30 --alert-sustain-ms 100 < " + dir +
                      "/low.jsonl 2>&1");
    CHECK(r.status == 0);
    CHECK(count_occurrences(r.output, "ALERT ") == 1);
    CHECK(r.output.find("ALERT t_ms=67 frame=2 total=0\n") != std::string::npos);
}

TEST_CASE("cli: eval agrees with annotators who match the report") {
    const std::string dir = scored_session();
    std::string csv = "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n";
    for (const char* who : {"a", "b"}) {
        for (const char* item : {"0", "30", "60"})
            csv += std::string(who) + "," + item + ",frame,4,4,4,4,4,\n";
        csv += std::string(who) + ",0,audio,,,,,,4\n";
    }
    lecto::write_file(dir + "/ann.csv", csv);
    const Cmd r = run(bin() + " eval --report " + dir + "/report.json --annotations " + dir +
                      "/ann.csv --out " + dir + "/eval.json 2>&1");
    CHECK(r.status == 0);
    CHECK(r.output.find("evaluation: " + dir + "/eval.json") != std::string::npos);
    const json ev = json::parse(lecto::read_file(dir + "/eval.json"));
    for (const char* key : {"expression", "activity", "hand", "pose", "speech", "score_frame"})
        CHECK(ev["modalities"][key]["metrics"]["accuracy"] == 1.0);
    CHECK(ev["modalities"]["score_frame"]["mae"] == 0.0);
    CHECK(ev["comparison"].size() == 6);
    for (const json& row : ev["comparison"]) {
        CHECK(row["p_adjusted"] == 1.0);
        CHECK(row["significant"] == false);
    }
    CHECK(ev["loo"]["overall"]["mean"] == 0.0);
}

TEST_CASE("cli: eval maps named items through the items file") {
    const std::string dir = scored_session();
    lecto::write_file(dir + "/items.csv", "item_id,frame_idx\nclipA,0\nclipB,30\n");
    std::string csv = "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n";
    for (const char* who : {"a", "b"})
        for (const char* item : {"clipA", "clipB"})
            csv += std::string(who) + "," + item + ",frame,4,4,4,4,4,\n";
    lecto::write_file(dir + "/ann.csv", csv);

    const Cmd bare = run(bin() + " eval --report " + dir + "/report.json --annotations " + dir +
                         "/ann.csv --out " + dir + "/eval.json 2>&1");
    CHECK(bare.status == 2);
    CHECK(bare.output.find("supply an items file") != std::string::npos);

    const Cmd mapped = run(bin() + " eval --report " + dir + "/report.json --annotations " + dir +
                           "/ann.csv --items " + dir + "/items.csv --out " + dir +
                           "/eval.json 2>&1");
    CHECK(mapped.status == 0);
    const json ev = json::parse(lecto::read_file(dir + "/eval.json"));
    CHECK(ev["modalities"]["expression"]["metrics"]["accuracy"] == 1.0);
    CHECK(ev["comparison"].size() == 5);  // no audio items, no speech row
}

TEST_CASE("cli: eval names items that the report does not cover") {
    const std::string dir = scored_session();
    std::string csv = "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n";
    for (const char* who : {"a", "b"}) csv += std::string(who) + ",9999,frame,4,4,4,4,4,\n";
    lecto::write_file(dir + "/ann.csv", csv);
    const Cmd r = run(bin() + " eval --report " + dir + "/report.json --annotations " + dir +
                      "/ann.csv --out " + dir + "/eval.json 2>&1");
    CHECK(r.status == 2);
    CHECK(r.output.find("9999") != std::string::npos);
}

TEST_CASE("cli: audio annotations require a json report with speech windows") {
    const std::string dir = scored_session("--format csv");
    std::string frame_only =
        "annotator_id,item_id,item_type,expression,activity,hand,head,overall,speech\n";
    for (const char* who : {"a", "b"}) frame_only += std::string(who) + ",0,frame,4,4,4,4,4,\n";
    lecto::write_file(dir + "/frames-ann.csv", frame_only);
    CHECK(run(bin() + " eval --report " + dir + "/report.csv --annotations " + dir +
              "/frames-ann.csv --out " + dir + "/eval.json 2>&1")
              .status == 0);

    std::string with_audio = frame_only;
    for (const char* who : {"a", "b"}) with_audio += std::string(who) + ",0,audio,,,,,,4\n";
    lecto::write_file(dir + "/audio-ann.csv", with_audio);
    const Cmd r = run(bin() + " eval --report " + dir + "/report.csv --annotations " + dir +
                      "/audio-ann.csv --out " + dir + "/eval.json 2>&1");
    CHECK(r.status == 2);
    CHECK(r.output.find("audio-rated items need a json report") != std::string::npos);
}

TEST_CASE("cli: config file applies under flags") {
    const std::string dir = temp_dir();
    REQUIRE(run(bin() + " synth --quality 1 --duration-ms 2000 --seed 1 --out " + dir).status ==
            0);
    lecto::write_file(dir + "/cfg.json", "{\"fps\": 10.0}\n");
    const std::string env = "LECTOMETER_CONFIG=" + dir + "/cfg.json ";

    const Cmd from_file = run(env + bin() + " score --frames " + dir + "/frames.jsonl --out " +
                              dir + "/r1.json 2>&1");
    CHECK(from_file.status == 0);
    CHECK(json::parse(lecto::read_file(dir + "/r1.json"))["config"]["fps"] == 10.0);

    const Cmd flag_wins = run(env + bin() + " score --frames " + dir + "/frames.jsonl --fps 30" +
                              " --out " + dir + "/r2.json 2>&1");
    CHECK(flag_wins.status == 0);
    CHECK(json::parse(lecto::read_file(dir + "/r2.json"))["config"]["fps"] == 30.0);

    lecto::write_file(dir + "/bad.json", "{\"fsp\": 10.0}\n");
    const Cmd bad = run("LECTOMETER_CONFIG=" + dir + "/bad.json " + bin() + " score --frames " +
                        dir + "/frames.jsonl --out " + dir + "/r3.json 2>&1");
    CHECK(bad.status == 2);
    CHECK(bad.output.find("unknown config key") != std::string::npos);
}

TEST_CASE("cli: synth is reproducible per seed") {
    const std::string a = temp_dir();
    const std::string b = temp_dir();
    const std::string args = " synth --quality 0.5 --duration-ms 4000 --seed 19 --out ";
    REQUIRE(run(bin() + args + a).status == 0);
    REQUIRE(run(bin() + args + b).status == 0);
    for (const char* name : {"frames.jsonl", "words.jsonl", "truth.json"})
        CHECK(lecto::read_file(a + "/" + name) == lecto::read_file(b + "/" + name));
    CHECK(lecto::read_file_bytes(a + "/audio.wav") == lecto::read_file_bytes(b + "/audio.wav"));

    const std::string c = temp_dir();
    REQUIRE(run(bin() + " synth --quality 0.5 --duration-ms 4000 --seed 20 --out " + c).status ==
            0);
    CHECK(lecto::read_file(a + "/frames.jsonl") != lecto::read_file(c + "/frames.jsonl"));
}

TEST_CASE("cli: synth honours probability overrides") {
    const std::string dir = temp_dir();
    REQUIRE(run(bin() + " synth --quality 1 --duration-ms 5000 --seed 4 --p-hand 0 --out " + dir)
                .status == 0);
    const json truth = json::parse(lecto::read_file(dir + "/truth.json"));
    CHECK(truth["profile"]["p_hand"] == 0.0);
    CHECK(truth["profile"]["p_expression"] == 1.0);
    CHECK(truth["average_score"] == 4.0);
}
