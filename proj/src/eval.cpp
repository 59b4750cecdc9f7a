#include "a2sa/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "a2sa/rng.hpp"

namespace a2sa {

namespace {

double field_of(const Note& n, TimeField which) {
    return which == TimeField::onsets ? n.onset : n.offset;
}

} // namespace

ThresholdCurve threshold_curve(const NoteSequence& predicted, const NoteSequence& truth,
                               TimeField which, const std::vector<double>& thresholds) {
    if (predicted.size() != truth.size())
        raise(errc::length_mismatch, "predicted has " + std::to_string(predicted.size()) +
                                         " notes, truth has " + std::to_string(truth.size()));
    if (predicted.empty()) raise(errc::empty_list, "no notes to evaluate");

    ThresholdCurve curve;
    curve.thresholds = thresholds;
    curve.ratios.reserve(thresholds.size());
    std::vector<double> errors(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i)
        errors[i] = std::abs(field_of(predicted[i], which) - field_of(truth[i], which));
    for (double t : thresholds) {
        const auto hits = std::count_if(errors.begin(), errors.end(),
                                        [t](double e) { return e <= t; });
        curve.ratios.push_back(static_cast<double>(hits) /
                               static_cast<double>(predicted.size()));
    }
    return curve;
}

double curve_ratio_at(const ThresholdCurve& curve, double threshold) {
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
        if (curve.thresholds[i] == threshold) return curve.ratios[i];
    raise(errc::grid_mismatch, "threshold not on the curve grid");
}

ThresholdCurve macro_average(const std::vector<ThresholdCurve>& curves) {
    if (curves.empty()) raise(errc::empty_list, "no curves to average");
    ThresholdCurve out;
    out.thresholds = curves.front().thresholds;
    out.ratios.assign(out.thresholds.size(), 0.0);
    for (const ThresholdCurve& c : curves) {
        if (c.thresholds != out.thresholds)
            raise(errc::grid_mismatch, "curves use different threshold grids");
        for (std::size_t i = 0; i < c.ratios.size(); ++i) out.ratios[i] += c.ratios[i];
    }
    for (double& r : out.ratios) r /= static_cast<double>(curves.size());
    return out;
}

L1Stats l1_macro_error(const std::vector<std::pair<NoteSequence, NoteSequence>>& pairs,
                       TimeField which) {
    if (pairs.empty()) raise(errc::empty_list, "no pieces to evaluate");

    std::vector<double> per_piece;
    per_piece.reserve(pairs.size());
    for (const auto& [predicted, truth] : pairs) {
        if (predicted.size() != truth.size())
            raise(errc::length_mismatch, "piece with mismatched note counts");
        if (predicted.empty()) raise(errc::empty_list, "empty piece");
        double acc = 0.0;
        for (std::size_t i = 0; i < predicted.size(); ++i)
            acc += std::abs(field_of(predicted[i], which) - field_of(truth[i], which));
        per_piece.push_back(acc / static_cast<double>(predicted.size()));
    }

    L1Stats stats;
    for (double v : per_piece) stats.mean += v;
    stats.mean /= static_cast<double>(per_piece.size());
    double acc = 0.0;
    for (double v : per_piece) acc += (v - stats.mean) * (v - stats.mean);
    stats.std = std::sqrt(acc / static_cast<double>(per_piece.size()));
    return stats;
}

NoteSequence oracle_transcribe(const NoteSequence& truth, const NoiseSpec& noise) {
    Rng rng(noise.seed);
    NoteSequence out;
    out.reserve(truth.size());

    double span_lo = 0.0, span_hi = 0.0;
    if (!truth.empty()) {
        span_lo = truth.front().onset;
        span_hi = span_lo;
        for (const Note& n : truth) span_hi = std::max(span_hi, n.offset);
    }

    for (const Note& n : truth) {
        if (rng.bernoulli(noise.deletion_rate)) continue;
        Note t = n;
        if (noise.onset_jitter_std > 0.0) {
            t.onset = std::max(0.0, t.onset + rng.gaussian(0.0, noise.onset_jitter_std));
            // AMT offsets are weaker than onsets
            t.offset += rng.gaussian(0.0, 2.0 * noise.onset_jitter_std);
            t.offset = std::max(t.offset, t.onset + 1e-3);
        }
        if (noise.pitch_error_rate > 0.0 && rng.bernoulli(noise.pitch_error_rate)) {
            std::vector<int> options;
            for (int delta : {12, -12, 7, -7}) {
                const int p = t.pitch + delta;
                if (p >= 0 && p <= 127) options.push_back(p);
            }
            t.pitch = options[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(options.size()) - 1))];
        }
        out.push_back(t);
    }

    const auto insertions = static_cast<std::size_t>(
        std::llround(noise.insertion_rate * static_cast<double>(truth.size())));
    for (std::size_t k = 0; k < insertions; ++k) {
        Note spurious;
        spurious.pitch = static_cast<int>(rng.uniform_int(21, 108));
        spurious.onset = rng.uniform(span_lo, std::max(span_lo, span_hi - 0.05));
        spurious.offset = spurious.onset + rng.uniform(0.05, 0.5);
        out.push_back(spurious);
    }
    return validate_sequence(std::move(out));
}

void write_curve_csv(const ThresholdCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_failure, "cannot open " + path.string() + " for writing");
    out << "threshold_sec,ratio\n";
    char buf[32];
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof(buf), curve.thresholds[i]);
        out.write(buf, res.ptr - buf);
        out.put(',');
        res = std::to_chars(buf, buf + sizeof(buf), curve.ratios[i]);
        out.write(buf, res.ptr - buf);
        out.put('\n');
    }
    if (!out) raise(errc::io_failure, "short write to " + path.string());
}

} // namespace a2sa
