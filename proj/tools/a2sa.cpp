#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "a2sa/align.hpp"
#include "a2sa/eval.hpp"
#include "a2sa/io.hpp"
#include "a2sa/misalign.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string method = "eife";
    double frame_period = a2sa::kDefaultFramePeriod;
    std::string dist = "cosine";
    int radius = a2sa::kDefaultRadius;
    std::string offsets = "interp";
    double budget_seconds = a2sa::ResourceBudget::kDefaultSeconds;
    std::uint64_t budget_bytes = a2sa::ResourceBudget::kDefaultBytes;
    std::uint64_t seed = 0;
    int jobs = 0; // 0 = logical cores
};

a2sa::AlignOptions to_align_options(const RunConfig& cfg) {
    a2sa::AlignOptions opt;
    opt.frame_period = cfg.frame_period;
    const auto dist = a2sa::distance_from_name(cfg.dist);
    if (!dist) a2sa::raise(a2sa::errc::usage, "unknown distance '" + cfg.dist + "'");
    opt.distance = *dist;
    opt.radius = cfg.radius;
    if (cfg.offsets == "interp")
        opt.offsets = a2sa::OffsetSource::interp;
    else if (cfg.offsets == "amt")
        opt.offsets = a2sa::OffsetSource::amt;
    else
        a2sa::raise(a2sa::errc::usage, "offsets must be 'interp' or 'amt'");
    return opt;
}

json diagnostics_json(const std::string& piece, const a2sa::AlignmentResult& result) {
    return json{{"piece", piece},
                {"method", a2sa::align_method_name(result.method)},
                {"matched", result.diagnostics.matched},
                {"missing", result.diagnostics.missing},
                {"extra", result.diagnostics.extra},
                {"elapsed_sec", result.diagnostics.elapsed_seconds},
                {"peak_bytes_estimate", result.diagnostics.peak_bytes_estimate},
                {"seba_fallback", result.diagnostics.seba_fallback}};
}

struct PieceInputs {
    std::string name;
    fs::path score;
    fs::path audio;         // empty if absent
    fs::path transcription; // empty if absent
};

fs::path find_by_stem(const fs::path& dir, const std::string& stem,
                      std::initializer_list<const char*> extensions) {
    for (const char* ext : extensions) {
        const fs::path candidate = dir / (stem + ext);
        if (fs::exists(candidate)) return candidate;
    }
    return {};
}

a2sa::AlignmentResult run_alignment(const PieceInputs& piece, const RunConfig& cfg) {
    const a2sa::AlignOptions opt = to_align_options(cfg);
    const a2sa::NoteSequence score = a2sa::read_notes_auto(piece.score);
    const a2sa::ResourceBudget budget(cfg.budget_seconds, cfg.budget_bytes);

    if (cfg.method == "seba") {
        if (piece.audio.empty())
            a2sa::raise(a2sa::errc::usage, "--audio is required for the seba method");
        return a2sa::align_seba(score, a2sa::read_wav(piece.audio), opt, budget);
    }
    if (cfg.method == "tafe") {
        if (piece.transcription.empty())
            a2sa::raise(a2sa::errc::usage, "--transcription is required for the tafe method");
        const a2sa::NoteSequence trans = a2sa::read_notes_auto(piece.transcription);
        double duration = 0.0;
        if (!piece.audio.empty()) {
            duration = a2sa::read_wav(piece.audio).duration();
        } else {
            for (const a2sa::Note& n : trans) duration = std::max(duration, n.offset);
            if (duration <= 0.0)
                a2sa::raise(a2sa::errc::empty_sequence,
                            "cannot infer the audio duration from an empty transcription");
        }
        return a2sa::align_tafe(score, trans, duration, opt, budget);
    }
    if (cfg.method == "eife") {
        if (piece.audio.empty() || piece.transcription.empty())
            a2sa::raise(a2sa::errc::usage,
                        "--audio and --transcription are required for the eife method");
        return a2sa::align_eife(score, a2sa::read_notes_auto(piece.transcription),
                                a2sa::read_wav(piece.audio), opt, budget);
    }
    a2sa::raise(a2sa::errc::usage, "unknown method '" + cfg.method + "'");
}

int cmd_align(const RunConfig& cfg, const fs::path& score_path, const fs::path& audio_path,
              const fs::path& transcription_path, const fs::path& out_path,
              const fs::path& midi_out, const fs::path& dump_wav) {
    if (!fs::is_directory(score_path)) {
        PieceInputs piece{score_path.stem().string(), score_path, audio_path,
                          transcription_path};
        const a2sa::AlignmentResult result = run_alignment(piece, cfg);
        a2sa::write_notes_csv(result.realigned_score, out_path);
        if (!midi_out.empty())
            a2sa::write_midi(a2sa::validate_sequence(result.realigned_score), midi_out);
        if (!dump_wav.empty()) {
            const a2sa::NoteSequence score = a2sa::read_notes_auto(score_path);
            a2sa::write_wav(a2sa::synthesize(score), dump_wav);
        }
        json diag = diagnostics_json(piece.name, result);
        diag["output"] = out_path.string();
        std::cout << diag.dump() << '\n';
        return 0;
    }

    // batch: one output per score file plus a summary, pieces independent
    std::vector<PieceInputs> pieces;
    for (const auto& entry : fs::directory_iterator(score_path)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext != ".mid" && ext != ".midi" && ext != ".csv") continue;
        PieceInputs piece;
        piece.name = entry.path().stem().string();
        piece.score = entry.path();
        if (!audio_path.empty())
            piece.audio = find_by_stem(audio_path, piece.name, {".wav"});
        if (!transcription_path.empty())
            piece.transcription =
                find_by_stem(transcription_path, piece.name, {".csv", ".mid", ".midi"});
        pieces.push_back(std::move(piece));
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const PieceInputs& a, const PieceInputs& b) { return a.name < b.name; });
    if (pieces.empty()) a2sa::raise(a2sa::errc::usage, "no score files in " + score_path.string());
    fs::create_directories(out_path);

    struct PieceOutcome {
        json diag;
        bool ok = false;
        std::string reason, message;
    };
    std::vector<PieceOutcome> outcomes(pieces.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    const unsigned workers = cfg.jobs > 0
                                 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    const auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= pieces.size()) return;
            const PieceInputs& piece = pieces[k];
            try {
                const a2sa::AlignmentResult result = run_alignment(piece, cfg);
                const fs::path out_file = out_path / (piece.name + ".csv");
                a2sa::write_notes_csv(result.realigned_score, out_file);
                outcomes[k].diag = diagnostics_json(piece.name, result);
                outcomes[k].diag["output"] = out_file.string();
                outcomes[k].ok = true;
            } catch (const a2sa::Error& e) {
                outcomes[k].reason = a2sa::errc_name(e.code());
                outcomes[k].message = e.what();
            } catch (const std::exception& e) {
                outcomes[k].reason = "Internal";
                outcomes[k].message = e.what();
            }
            std::lock_guard lock(log_mutex);
            std::cerr << piece.name << ": "
                      << (outcomes[k].ok ? "ok" : outcomes[k].reason) << '\n';
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json summary{{"pieces", json::array()}, {"skipped", json::array()}};
    int succeeded = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (outcomes[k].ok) {
            summary["pieces"].push_back(outcomes[k].diag);
            ++succeeded;
        } else {
            summary["skipped"].push_back(json{{"piece", pieces[k].name},
                                              {"reason", outcomes[k].reason},
                                              {"message", outcomes[k].message}});
        }
    }
    summary["succeeded"] = succeeded;
    summary["failed"] = static_cast<int>(pieces.size()) - succeeded;
    std::ofstream out(out_path / "summary.json");
    out << summary.dump(2) << '\n';
    std::cout << summary.dump() << '\n';
    return succeeded > 0 ? 0 : 1;
}

int cmd_misalign(const RunConfig& cfg, const fs::path& score_path, const fs::path& model_path,
                 const fs::path& out_path, fs::path labels_path, bool cluster,
                 std::optional<double> cluster_threshold, bool missing_extra) {
    const a2sa::NoteSequence score = a2sa::read_notes_auto(score_path);
    const a2sa::MisalignmentModel model = a2sa::read_model_json(model_path);

    a2sa::NoteSequence misaligned = a2sa::sample_misaligned(score, model, cfg.seed);
    json labels{{"seed", cfg.seed}};
    if (cluster) {
        misaligned = a2sa::cluster_chord_onsets(misaligned, cluster_threshold, cfg.seed + 1);
        labels["clustered"] = true;
    }
    if (missing_extra) {
        const a2sa::MissingExtraResult injected =
            a2sa::inject_missing_extra(misaligned, cfg.seed + 2);
        misaligned = injected.score_without_extras;
        labels["missing"] = injected.labels.missing;
        labels["extra"] = injected.labels.extra;
        labels["p_missing"] = injected.labels.p_missing;
        labels["requested"] = injected.labels.requested;
    }

    a2sa::write_notes_csv(misaligned, out_path);
    if (labels_path.empty()) labels_path = out_path.string() + ".labels.json";
    std::ofstream labels_out(labels_path);
    labels_out << labels.dump(2) << '\n';
    std::cout << labels.dump() << '\n';
    return 0;
}

std::vector<std::pair<fs::path, fs::path>> pair_directories(const fs::path& left,
                                                            const fs::path& right) {
    std::vector<std::pair<fs::path, fs::path>> pairs;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(left))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
        const fs::path partner = find_by_stem(right, f.stem().string(),
                                              {".csv", ".mid", ".midi"});
        if (!partner.empty()) pairs.emplace_back(f, partner);
    }
    return pairs;
}

int cmd_fit_model(const RunConfig& cfg, const fs::path& scores_dir, const fs::path& perfs_dir,
                  const fs::path& out_path) {
    const auto file_pairs = pair_directories(scores_dir, perfs_dir);
    if (file_pairs.empty())
        a2sa::raise(a2sa::errc::usage, "no score/performance pairs found");

    std::vector<a2sa::AlignedPair> pairs;
    for (const auto& [score_file, perf_file] : file_pairs) {
        const a2sa::ResourceBudget budget(cfg.budget_seconds, cfg.budget_bytes);
        a2sa::AlignedPair pair;
        pair.perf = a2sa::read_notes_auto(perf_file);
        double perf_end = 0.0;
        for (const a2sa::Note& n : pair.perf) perf_end = std::max(perf_end, n.offset);
        pair.score =
            a2sa::stretch_to_duration(a2sa::read_notes_auto(score_file), perf_end);
        pair.matching = a2sa::match_notes(pair.score, pair.perf, {}, &budget);
        if (pair.matching.matched.size() < 2) {
            std::cerr << score_file.stem().string() << ": fewer than 2 matches, skipped\n";
            continue;
        }
        pairs.push_back(std::move(pair));
    }
    if (pairs.empty()) a2sa::raise(a2sa::errc::usage, "no usable pairs for fitting");

    a2sa::write_model_json(a2sa::fit_model(pairs), out_path);
    std::cout << json{{"pairs_used", pairs.size()}, {"model", out_path.string()}}.dump()
              << '\n';
    return 0;
}

int cmd_evaluate(const fs::path& predicted_dir, const fs::path& truth_dir,
                 const fs::path& out_dir, std::vector<double> thresholds) {
    if (thresholds.empty()) thresholds = a2sa::default_threshold_grid();
    std::sort(thresholds.begin(), thresholds.end());

    const auto file_pairs = pair_directories(predicted_dir, truth_dir);
    if (file_pairs.empty()) a2sa::raise(a2sa::errc::usage, "no predicted/truth pairs found");
    fs::create_directories(out_dir);

    std::vector<a2sa::ThresholdCurve> onset_curves, offset_curves;
    std::vector<std::pair<a2sa::NoteSequence, a2sa::NoteSequence>> l1_pairs;
    json summary{{"pieces", json::array()}, {"skipped", json::array()}};
    for (const auto& [pred_file, truth_file] : file_pairs) {
        const std::string name = pred_file.stem().string();
        try {
            const a2sa::NoteSequence predicted = a2sa::read_notes_auto(pred_file);
            const a2sa::NoteSequence truth = a2sa::read_notes_auto(truth_file);
            const a2sa::ThresholdCurve on =
                a2sa::threshold_curve(predicted, truth, a2sa::TimeField::onsets, thresholds);
            const a2sa::ThresholdCurve off =
                a2sa::threshold_curve(predicted, truth, a2sa::TimeField::offsets, thresholds);
            a2sa::write_curve_csv(on, out_dir / (name + "_onsets.csv"));
            a2sa::write_curve_csv(off, out_dir / (name + "_offsets.csv"));
            onset_curves.push_back(on);
            offset_curves.push_back(off);
            l1_pairs.emplace_back(predicted, truth);
            summary["pieces"].push_back(json{{"piece", name}, {"notes", predicted.size()}});
        } catch (const a2sa::Error& e) {
            summary["skipped"].push_back(json{
                {"piece", name}, {"reason", a2sa::errc_name(e.code())}, {"message", e.what()}});
        }
    }
    if (onset_curves.empty()) a2sa::raise(a2sa::errc::usage, "no evaluable pieces");

    a2sa::write_curve_csv(a2sa::macro_average(onset_curves), out_dir / "macro_onsets.csv");
    a2sa::write_curve_csv(a2sa::macro_average(offset_curves), out_dir / "macro_offsets.csv");
    const a2sa::L1Stats l1_on = a2sa::l1_macro_error(l1_pairs, a2sa::TimeField::onsets);
    const a2sa::L1Stats l1_off = a2sa::l1_macro_error(l1_pairs, a2sa::TimeField::offsets);
    summary["l1_onsets"] = json{{"mean", l1_on.mean}, {"std", l1_on.std}};
    summary["l1_offsets"] = json{{"mean", l1_off.mean}, {"std", l1_off.std}};
    std::ofstream out(out_dir / "summary.json");
    out << summary.dump(2) << '\n';
    std::cout << summary.dump() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audio-to-score alignment toolkit"};
    app.set_config("--config", "", "key=value configuration file ([align] etc. sections); flags win");
    app.require_subcommand(1);

    RunConfig cfg;
    fs::path score_path, audio_path, transcription_path, out_path, midi_out, dump_wav;
    fs::path model_path, labels_path, scores_dir, perfs_dir, predicted_dir, truth_dir, out_dir;
    bool cluster = false, missing_extra = false;
    double cluster_threshold_value = 0.0;
    std::vector<double> thresholds;

    CLI::App* align = app.add_subcommand("align", "Align a score to a performance");
    align->fallthrough();
    align->add_option("--method", cfg.method, "seba | tafe | eife")->required();
    align->add_option("--score", score_path, "score file (.mid/.csv) or batch directory")
        ->required();
    align->add_option("--audio", audio_path, "performance WAV file or directory");
    align->add_option("--transcription", transcription_path,
                      "AMT transcription file or directory");
    align->add_option("--out", out_path, "output CSV file or batch directory")->required();
    align->add_option("--midi-out", midi_out, "also write the realigned score as MIDI");
    align->add_option("--dump-wav", dump_wav, "write the synthesized score audio");
    align->add_option("--frame-period", cfg.frame_period, "analysis frame period in seconds");
    align->add_option("--dist", cfg.dist, "roll distance function");
    align->add_option("--radius", cfg.radius, "FastDTW corridor radius");
    align->add_option("--offsets", cfg.offsets, "matched-note offsets: interp | amt");
    align->add_option("--budget-seconds", cfg.budget_seconds, "wall-clock budget per piece");
    align->add_option("--budget-bytes", cfg.budget_bytes, "advisory allocation cap per piece");
    align->add_option("--jobs", cfg.jobs, "batch worker threads (0 = logical cores)");

    CLI::App* misalign = app.add_subcommand("misalign", "Generate an artificial score");
    misalign->fallthrough();
    misalign->add_option("--score", score_path, "aligned score file")->required();
    misalign->add_option("--model", model_path, "misalignment model JSON")->required();
    misalign->add_option("--seed", cfg.seed, "random seed");
    misalign->add_option("--out", out_path, "output CSV file")->required();
    misalign->add_option("--labels-out", labels_path,
                         "labels JSON path (default: OUT.labels.json)");
    misalign->add_flag("--cluster", cluster, "single-linkage chord-onset clustering");
    CLI::Option* thresh_opt = misalign->add_option(
        "--cluster-threshold", cluster_threshold_value,
        "clustering threshold in seconds (default: drawn from [0.03,0.07])");
    misalign->add_flag("--missing-extra", missing_extra, "label and remove note regions");

    CLI::App* fit = app.add_subcommand("fit-model", "Fit a misalignment model from pairs");
    fit->fallthrough();
    fit->add_option("--scores", scores_dir, "directory of score files")->required();
    fit->add_option("--performances", perfs_dir, "directory of performance files")->required();
    fit->add_option("--out", out_path, "output model JSON")->required();
    fit->add_option("--budget-seconds", cfg.budget_seconds, "wall-clock budget per pair");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Threshold curves and L1 errors");
    evaluate->fallthrough();
    evaluate->add_option("--predicted", predicted_dir, "directory of realigned scores")
        ->required();
    evaluate->add_option("--truth", truth_dir, "directory of ground-truth scores")->required();
    evaluate->add_option("--out-dir", out_dir, "output directory")->required();
    evaluate->add_option("--thresholds", thresholds, "threshold grid in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (align->parsed())
            return cmd_align(cfg, score_path, audio_path, transcription_path, out_path,
                             midi_out, dump_wav);
        if (misalign->parsed()) {
            std::optional<double> threshold;
            if (thresh_opt->count() > 0) threshold = cluster_threshold_value;
            return cmd_misalign(cfg, score_path, model_path, out_path, labels_path, cluster,
                                threshold, missing_extra);
        }
        if (fit->parsed()) return cmd_fit_model(cfg, scores_dir, perfs_dir, out_path);
        if (evaluate->parsed())
            return cmd_evaluate(predicted_dir, truth_dir, out_dir, thresholds);
    } catch (const a2sa::Error& e) {
        std::cerr << "error: " << a2sa::errc_name(e.code()) << ": " << e.what() << '\n';
        return a2sa::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
