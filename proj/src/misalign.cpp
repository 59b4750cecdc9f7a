#include "a2sa/misalign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "a2sa/rng.hpp"

namespace a2sa {

namespace {

// edges spanning observed min..max; a degenerate range widens to a sliver so
// the edges stay strictly increasing
Histogram build_histogram(const std::vector<double>& values, int bins) {
    Histogram h;
    if (values.empty()) raise(errc::empty_list, "no values to bin");
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (!(hi > lo)) {
        const double pad = std::max(1e-15, std::abs(lo) * 1e-12);
        lo -= pad;
        hi += pad;
    }
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0.0);
    const double width = (hi - lo) / bins;
    for (double v : values) {
        auto bin = static_cast<std::int64_t>((v - lo) / width);
        bin = std::clamp<std::int64_t>(bin, 0, bins - 1);
        h.counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    return h;
}

double sample_histogram(const Histogram& h, Rng& rng) {
    const std::size_t bin = rng.weighted_choice(h.counts);
    return rng.uniform(h.edges[bin], h.edges[bin + 1]);
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // population
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(acc / static_cast<double>(v.size()));
    return out;
}

} // namespace

bool histogram_is_sampleable(const Histogram& h) {
    if (h.edges.size() != h.counts.size() + 1 || h.counts.empty()) return false;
    for (std::size_t i = 1; i < h.edges.size(); ++i)
        if (!(h.edges[i] > h.edges[i - 1])) return false;
    double total = 0.0;
    for (double c : h.counts) {
        if (c < 0.0) return false;
        total += c;
    }
    return total > 0.0;
}

MisalignmentModel fit_model(const std::vector<AlignedPair>& pairs) {
    if (pairs.empty()) raise(errc::empty_list, "no training pairs");

    std::vector<double> x_ons, x_dur, y_ons_m, y_ons_std, y_dur_m, y_dur_std;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const AlignedPair& pair = pairs[p];
        if (pair.matching.matched.size() < 2)
            raise(errc::too_few_matches,
                  "pair " + std::to_string(p) + " has fewer than 2 matched notes");

        std::vector<double> shifts, ratios;
        shifts.reserve(pair.matching.matched.size());
        ratios.reserve(pair.matching.matched.size());
        for (const auto& [si, pi] : pair.matching.matched) {
            const Note& s = pair.score[si];
            const Note& q = pair.perf[pi];
            shifts.push_back(q.onset - s.onset);
            ratios.push_back(note_duration(q) / note_duration(s));
        }

        const MeanStd ons = mean_std(shifts);
        const MeanStd dur = mean_std(ratios);
        y_ons_m.push_back(ons.mean);
        y_ons_std.push_back(ons.std);
        y_dur_m.push_back(dur.mean);
        y_dur_std.push_back(dur.std);
        // zero-variance pieces standardize to 0
        for (double v : shifts) x_ons.push_back(ons.std > 0.0 ? (v - ons.mean) / ons.std : 0.0);
        for (double v : ratios) x_dur.push_back(dur.std > 0.0 ? (v - dur.mean) / dur.std : 0.0);
    }

    MisalignmentModel model;
    model.x_ons = build_histogram(x_ons, kModelBinCount);
    model.x_dur = build_histogram(x_dur, kModelBinCount);
    model.y_ons_m = build_histogram(y_ons_m, kModelBinCount);
    model.y_ons_std = build_histogram(y_ons_std, kModelBinCount);
    model.y_dur_m = build_histogram(y_dur_m, kModelBinCount);
    model.y_dur_std = build_histogram(y_dur_std, kModelBinCount);
    return model;
}

NoteSequence sample_misaligned(const NoteSequence& score, const MisalignmentModel& model,
                               std::uint64_t seed) {
    for (const Histogram* h : {&model.x_ons, &model.x_dur, &model.y_ons_m, &model.y_ons_std,
                               &model.y_dur_m, &model.y_dur_std})
        if (!histogram_is_sampleable(*h))
            raise(errc::malformed_json, "model histogram is not sampleable");

    Rng rng(seed);
    const double m_ons = sample_histogram(model.y_ons_m, rng);
    const double s_ons = sample_histogram(model.y_ons_std, rng);
    const double m_dur = sample_histogram(model.y_dur_m, rng);
    const double s_dur = sample_histogram(model.y_dur_std, rng);

    NoteSequence out = score;
    for (Note& n : out) {
        const double z_ons = sample_histogram(model.x_ons, rng);
        const double z_dur = sample_histogram(model.x_dur, rng);
        const double duration = note_duration(n) * std::max(z_dur * s_dur + m_dur,
                                                            kDurationRatioFloor);
        n.onset += z_ons * s_ons + m_ons;
        n.offset = n.onset + duration;
    }
    return out;
}

NoteSequence cluster_chord_onsets(const NoteSequence& seq, std::optional<double> threshold,
                                  std::uint64_t seed) {
    double t = 0.0;
    if (threshold) {
        t = *threshold;
        if (!(t > 0.0)) raise(errc::usage, "clustering threshold must be positive");
    } else {
        Rng rng(seed);
        t = rng.uniform(0.03, 0.07);
    }
    if (seq.empty()) return seq;

    // 1-D single linkage: merging while the smallest inter-cluster gap is
    // below t leaves exactly the maximal runs of onsets with gaps < t
    std::vector<std::size_t> order(seq.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&seq](std::size_t a, std::size_t b) { return seq[a].onset < seq[b].onset; });

    NoteSequence out = seq;
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        double sum = seq[order[start]].onset;
        while (end < order.size() &&
               seq[order[end]].onset - seq[order[end - 1]].onset < t) {
            sum += seq[order[end]].onset;
            ++end;
        }
        const double mean = sum / static_cast<double>(end - start);
        for (std::size_t k = start; k < end; ++k) out[order[k]].onset = mean;
        start = end;
    }
    for (Note& n : out)
        if (n.offset <= n.onset) n.offset = n.onset + 0.01;
    return out;
}

MissingExtraResult inject_missing_extra(const NoteSequence& score, std::uint64_t seed) {
    const auto length = static_cast<int>(score.size());
    if (length < 10) raise(errc::too_few_notes, "need at least 10 notes to label regions");

    Rng rng(seed);
    const double raw_n = rng.uniform(0.1 * length, 0.5 * length);
    const int n_min = static_cast<int>(std::ceil(0.1 * length));
    const int n_max = static_cast<int>(std::floor(0.5 * length));
    const int target = std::clamp(static_cast<int>(std::llround(raw_n)), n_min, n_max);
    const double p_missing = rng.uniform(0.25, 0.75);

    MissingExtraResult result;
    result.labels.p_missing = p_missing;
    result.labels.requested = target;

    std::vector<int> label(score.size(), -1); // -1 free, 0 missing, 1 extra
    int labeled = 0;
    const int max_run = std::max(2, target / 5);
    while (labeled < target) {
        const int start = static_cast<int>(rng.uniform_int(0, length - 1));
        if (label[start] != -1) continue;
        int run = static_cast<int>(rng.uniform_int(1, max_run));
        run = std::min(run, target - labeled);
        const int kind = rng.bernoulli(p_missing) ? 0 : 1;
        for (int k = start; k < length && k < start + run && label[k] == -1; ++k) {
            label[k] = kind;
            ++labeled;
        }
    }

    for (int i = 0; i < length; ++i) {
        if (label[i] == 0) result.labels.missing.push_back(i);
        else if (label[i] == 1) result.labels.extra.push_back(i);
    }
    for (int i = 0; i < length; ++i)
        if (label[i] != 1) result.score_without_extras.push_back(score[i]);
    return result;
}

} // namespace a2sa
