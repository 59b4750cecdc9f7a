#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include "a2sa/align.hpp"
#include "a2sa/io.hpp"
#include "a2sa/misalign.hpp"
#include "helpers.hpp"
#include "spawn.hpp"

using namespace a2sa;
using nlohmann::json;
using testutil::run_cli;
using testutil::TempDir;

namespace {

// a small piece plus everything the align subcommands need on disk
struct Fixture {
    TempDir dir{"cli"};
    NoteSequence score;
    std::filesystem::path score_csv, audio_wav, trans_csv;

    explicit Fixture(std::uint64_t seed, int notes = 16) {
        Rng rng(seed);
        score = testutil::piano_fixture(rng, notes);
        const AudioBuffer audio = synthesize(score);
        const NoteSequence transcription = stretch_to_duration(score, audio.duration());
        score_csv = dir / "piece.csv";
        audio_wav = dir / "piece.wav";
        trans_csv = dir / "piece_t.csv";
        write_notes_csv(score, score_csv);
        write_wav(audio, audio_wav);
        write_notes_csv(transcription, trans_csv);
    }
};

MisalignmentModel tiny_model() {
    const Histogram z{{-0.1, 0.0, 0.1}, {1.0, 1.0}};
    const Histogram m{{0.04, 0.05, 0.06}, {1.0, 1.0}};
    const Histogram s{{0.001, 0.002}, {1.0}};
    const Histogram one{{0.99, 1.0, 1.01}, {1.0, 1.0}};
    const Histogram s_dur{{0.005, 0.01}, {1.0}};
    return MisalignmentModel{z, z, m, s, one, s_dur};
}

} // namespace

TEST_CASE("align eife closed loop via the CLI") {
    Fixture fx(1);
    const auto out = fx.dir / "aligned.csv";
    const auto midi_out = fx.dir / "aligned.mid";
    const auto result = run_cli({"align", "--method", "eife", "--score",
                                 fx.score_csv.string(), "--audio", fx.audio_wav.string(),
                                 "--transcription", fx.trans_csv.string(), "--out",
                                 out.string(), "--midi-out", midi_out.string()});
    REQUIRE(result.exit_code == 0);

    const json diag = json::parse(result.out);
    CHECK(diag["method"] == "eife");
    CHECK(diag["matched"].get<int>() == static_cast<int>(fx.score.size()));
    CHECK(diag["seba_fallback"] == false);

    const NoteSequence realigned = read_notes_csv(out);
    const NoteSequence transcription = read_notes_csv(fx.trans_csv);
    REQUIRE(realigned.size() == fx.score.size());
    for (std::size_t i = 0; i < realigned.size(); ++i)
        CHECK(realigned[i].onset == transcription[i].onset);
    CHECK(read_midi(midi_out).size() == fx.score.size());
}

TEST_CASE("align validates required inputs per method") {
    Fixture fx(2, 12);
    const auto out = fx.dir / "x.csv";
    CHECK(run_cli({"align", "--method", "tafe", "--score", fx.score_csv.string(), "--out",
                   out.string()})
              .exit_code == 2);
    CHECK(run_cli({"align", "--method", "seba", "--score", fx.score_csv.string(), "--out",
                   out.string()})
              .exit_code == 2);
    CHECK(run_cli({"align", "--method", "eife", "--score", fx.score_csv.string(), "--audio",
                   fx.audio_wav.string(), "--out", out.string()})
              .exit_code == 2);
    CHECK(run_cli({"align", "--score", fx.score_csv.string(), "--out", out.string()})
              .exit_code == 2); // --method is required
    CHECK(run_cli({"align", "--method", "nope", "--score", fx.score_csv.string(), "--out",
                   out.string(), "--transcription", fx.trans_csv.string()})
              .exit_code == 2);
}

TEST_CASE("align exit 2 on malformed input") {
    TempDir dir("bad_input");
    std::ofstream(dir / "bad.csv") << "not,a,header\n";
    const auto result = run_cli({"align", "--method", "tafe", "--score",
                                 (dir / "bad.csv").string(), "--transcription",
                                 (dir / "bad.csv").string(), "--out", (dir / "o.csv").string()});
    CHECK(result.exit_code == 2);
}

TEST_CASE("batch alignment writes one file per piece and a summary") {
    TempDir dir("batch");
    std::filesystem::create_directories(dir / "scores");
    std::filesystem::create_directories(dir / "trans");
    Rng rng(33);
    for (int p = 0; p < 5; ++p) {
        const NoteSequence score = testutil::piano_fixture(rng, 10);
        const std::string name = "piece" + std::to_string(p);
        write_notes_csv(score, dir / "scores" / (name + ".csv"));
        double end = 0.0;
        for (const Note& n : score) end = std::max(end, n.offset);
        write_notes_csv(stretch_to_duration(score, end), dir / "trans" / (name + ".csv"));
    }

    const auto result = run_cli({"align", "--method", "tafe", "--score",
                                 (dir / "scores").string(), "--transcription",
                                 (dir / "trans").string(), "--out", (dir / "out").string(),
                                 "--jobs", "2"});
    REQUIRE(result.exit_code == 0);
    for (int p = 0; p < 5; ++p)
        CHECK(std::filesystem::exists(dir / "out" / ("piece" + std::to_string(p) + ".csv")));

    std::ifstream summary_file(dir / "out" / "summary.json");
    const json summary = json::parse(summary_file);
    CHECK(summary["pieces"].size() == 5);
    CHECK(summary["succeeded"] == 5);
    CHECK(summary["failed"] == 0);
    // deterministic order
    CHECK(summary["pieces"][0]["piece"] == "piece0");
    CHECK(summary["pieces"][4]["piece"] == "piece4");
}

TEST_CASE("misalign command: determinism and labels") {
    TempDir dir("mis");
    Rng rng(44);
    const NoteSequence score = testutil::random_sequence(rng, 60, 30.0);
    write_notes_csv(score, dir / "score.csv");
    write_model_json(tiny_model(), dir / "model.json");

    const std::vector<std::string> args{
        "misalign", "--score", (dir / "score.csv").string(), "--model",
        (dir / "model.json").string(), "--seed", "9", "--cluster", "--missing-extra",
        "--out", (dir / "mis.csv").string()};
    REQUIRE(run_cli(args).exit_code == 0);
    const NoteSequence first = read_notes_csv(dir / "mis.csv");
    const json labels = json::parse(std::ifstream(dir / "mis.csv.labels.json"));

    REQUIRE(run_cli(args).exit_code == 0);
    CHECK(read_notes_csv(dir / "mis.csv") == first); // reproducible

    const std::size_t labeled = labels["missing"].size() + labels["extra"].size();
    CHECK(labeled >= 6);  // 0.1 L
    CHECK(labeled <= 30); // 0.5 L
    CHECK(first.size() == score.size() - labels["extra"].size());
}

TEST_CASE("fit-model and evaluate round out the pipeline") {
    TempDir dir("fiteval");
    std::filesystem::create_directories(dir / "scores");
    std::filesystem::create_directories(dir / "perfs");
    Rng rng(55);
    for (int p = 0; p < 4; ++p) {
        const NoteSequence perf = testutil::random_sequence(rng, 40, 20.0);
        NoteSequence score = perf;
        for (Note& n : score) {
            n.onset += 0.05;
            n.offset += 0.05;
        }
        const std::string name = "p" + std::to_string(p);
        write_notes_csv(validate_sequence(score), dir / "scores" / (name + ".csv"));
        write_notes_csv(perf, dir / "perfs" / (name + ".csv"));
    }

    const auto fit = run_cli({"fit-model", "--scores", (dir / "scores").string(),
                              "--performances", (dir / "perfs").string(), "--out",
                              (dir / "model.json").string()});
    REQUIRE(fit.exit_code == 0);
    CHECK(histogram_is_sampleable(read_model_json(dir / "model.json").x_ons));

    // evaluate identical dirs: macro curve is identically 1
    const auto eval = run_cli({"evaluate", "--predicted", (dir / "perfs").string(), "--truth",
                               (dir / "perfs").string(), "--out-dir", (dir / "ev").string()});
    REQUIRE(eval.exit_code == 0);
    const json summary = json::parse(std::ifstream(dir / "ev" / "summary.json"));
    CHECK(summary["l1_onsets"]["mean"] == 0.0);
    CHECK(summary["pieces"].size() == 4);
    std::ifstream macro(dir / "ev" / "macro_onsets.csv");
    std::string line;
    std::getline(macro, line);
    CHECK(line == "threshold_sec,ratio");
    int rows = 0;
    while (std::getline(macro, line)) {
        CHECK(line.substr(line.find(',') + 1) == "1");
        ++rows;
    }
    CHECK(rows == 7);
}

TEST_CASE("config file supplies defaults, flags win") {
    Fixture fx(66, 10);
    std::ofstream(fx.dir / "run.cfg") << "[align]\nmethod=tafe\nframe-period=0.05\n";
    const auto out = fx.dir / "cfg_out.csv";
    const auto result =
        run_cli({"align", "--config", (fx.dir / "run.cfg").string(), "--score",
                 fx.score_csv.string(), "--transcription", fx.trans_csv.string(), "--out",
                 out.string()});
    REQUIRE(result.exit_code == 0);
    CHECK(json::parse(result.out)["method"] == "tafe");

    // flag overrides the config's method
    const auto forced =
        run_cli({"align", "--config", (fx.dir / "run.cfg").string(), "--method", "eife",
                 "--score", fx.score_csv.string(), "--audio", fx.audio_wav.string(),
                 "--transcription", fx.trans_csv.string(), "--out", out.string()});
    REQUIRE(forced.exit_code == 0);
    CHECK(json::parse(forced.out)["method"] == "eife");
}

TEST_CASE("dump-wav writes the synthesized score") {
    Fixture fx(77, 10);
    const auto wav = fx.dir / "dump.wav";
    const auto result = run_cli({"align", "--method", "seba", "--score",
                                 fx.score_csv.string(), "--audio", fx.audio_wav.string(),
                                 "--out", (fx.dir / "o.csv").string(), "--dump-wav",
                                 wav.string()});
    REQUIRE(result.exit_code == 0);
    CHECK(read_wav(wav).samples.size() > 0);
}

// full pipeline through the binary: fit a model, misalign a performance into
// an artificial score, realign it with a zero-noise transcription, evaluate
TEST_CASE("end-to-end fixture: fit, misalign, align, evaluate") {
    TempDir dir("e2e");
    Rng rng(88);

    // training pairs for the model: gentle constant-ish shifts
    std::filesystem::create_directories(dir / "scores");
    std::filesystem::create_directories(dir / "perfs");
    for (int p = 0; p < 6; ++p) {
        const NoteSequence perf = testutil::piano_fixture(rng, 40, 0.16);
        NoteSequence score = perf;
        for (Note& n : score) {
            const double shift = rng.gaussian(0.05, 0.004);
            n.onset += shift;
            n.offset += shift;
        }
        const std::string name = "train" + std::to_string(p);
        write_notes_csv(validate_sequence(score), dir / "scores" / (name + ".csv"));
        write_notes_csv(perf, dir / "perfs" / (name + ".csv"));
    }
    REQUIRE(run_cli({"fit-model", "--scores", (dir / "scores").string(), "--performances",
                     (dir / "perfs").string(), "--out", (dir / "model.json").string()})
                .exit_code == 0);

    // the evaluation piece: performance ground truth + derived inputs
    const NoteSequence performance = testutil::piano_fixture(rng, 60, 0.16);
    const AudioBuffer audio = synthesize(performance);
    write_notes_csv(performance, dir / "perf.csv");
    write_wav(audio, dir / "perf.wav");

    REQUIRE(run_cli({"misalign", "--score", (dir / "perf.csv").string(), "--model",
                     (dir / "model.json").string(), "--seed", "5", "--cluster", "--out",
                     (dir / "artificial.csv").string()})
                .exit_code == 0);

    std::filesystem::create_directories(dir / "pred");
    std::filesystem::create_directories(dir / "truth");
    REQUIRE(run_cli({"align", "--method", "eife", "--score",
                     (dir / "artificial.csv").string(), "--audio", (dir / "perf.wav").string(),
                     "--transcription", (dir / "perf.csv").string(), "--out",
                     (dir / "pred" / "piece.csv").string()})
                .exit_code == 0);
    std::filesystem::copy_file(dir / "perf.csv", dir / "truth" / "piece.csv");

    REQUIRE(run_cli({"evaluate", "--predicted", (dir / "pred").string(), "--truth",
                     (dir / "truth").string(), "--out-dir", (dir / "ev").string()})
                .exit_code == 0);

    // macro onset curve at 0.02 s is near-perfect for the noiseless oracle
    std::ifstream macro(dir / "ev" / "macro_onsets.csv");
    std::string line;
    std::getline(macro, line); // header
    double at_002 = 0.0;
    while (std::getline(macro, line)) {
        const auto comma = line.find(',');
        if (line.substr(0, comma) == "0.02") at_002 = std::stod(line.substr(comma + 1));
    }
    CHECK(at_002 >= 0.99);
}
