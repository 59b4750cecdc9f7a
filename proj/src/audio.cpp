#include "a2sa/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "a2sa/distances.hpp"

namespace a2sa {

namespace {

double pitch_frequency(int pitch) { return 440.0 * std::pow(2.0, (pitch - 69) / 12.0); }

} // namespace

AudioBuffer synthesize(const NoteSequence& seq, double sample_rate, const SynthesisConfig& cfg) {
    AudioBuffer out;
    out.sample_rate = sample_rate;
    if (seq.empty()) {
        out.samples.resize(0);
        return out;
    }

    double end = 0.0;
    for (const Note& n : seq) end = std::max(end, n.offset + cfg.release);
    const auto total = static_cast<Eigen::Index>(std::ceil(end * sample_rate));
    out.samples = Eigen::ArrayXd::Zero(total);

    const double nyquist = sample_rate / 2.0;
    for (const Note& n : seq) {
        // notes reaching before t=0 are cut at the buffer start
        const auto first = std::max<Eigen::Index>(
            0, static_cast<Eigen::Index>(std::floor(n.onset * sample_rate)));
        const auto last =
            std::min(total, static_cast<Eigen::Index>(std::ceil((n.offset + cfg.release) *
                                                                sample_rate)));
        const Eigen::Index count = last - first;
        if (count <= 0) continue;

        // time axis relative to the note onset
        Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(count, 0, static_cast<double>(count - 1));
        t = (t + (static_cast<double>(first) - n.onset * sample_rate)) / sample_rate;

        Eigen::ArrayXd env = (-t / cfg.decay_tau).exp();
        env *= (t / cfg.attack).min(1.0).max(0.0);
        const double hold = n.offset - n.onset;
        env *= (1.0 - (t - hold) / cfg.release).min(1.0).max(0.0);

        const double f0 = pitch_frequency(n.pitch);
        Eigen::ArrayXd wave = Eigen::ArrayXd::Zero(count);
        for (int h = 1; h <= cfg.harmonics; ++h) {
            const double fh = f0 * h;
            if (fh >= nyquist) break;
            wave += (2.0 * M_PI * fh * t).sin() / static_cast<double>(h);
        }
        out.samples.segment(first, count) += env * wave;
    }

    const double peak = out.samples.abs().maxCoeff();
    if (peak > 0.0) out.samples *= cfg.peak / peak;
    return out;
}

ChromaSequence chroma_energies(const AudioBuffer& audio, double frame_period,
                               const ChromaConfig& cfg) {
    if (audio.samples.size() == 0) raise(errc::empty_sequence, "empty audio buffer");
    const auto hop = static_cast<Eigen::Index>(std::llround(frame_period * audio.sample_rate));
    if (hop < 1) raise(errc::frame_period_too_small, "hop below one sample");

    const Eigen::Index window = cfg.window;
    const Eigen::Index n_frames = (audio.samples.size() + hop - 1) / hop;

    // bin -> pitch class map for the analysis band, zero-padded window tail
    const double bin_hz = audio.sample_rate / static_cast<double>(window);
    std::vector<int> bin_class(static_cast<std::size_t>(window / 2 + 1), -1);
    for (Eigen::Index k = 1; k < window / 2 + 1; ++k) {
        const double f = static_cast<double>(k) * bin_hz;
        if (f < cfg.min_freq || f > cfg.max_freq) continue;
        const int midi = static_cast<int>(std::lround(69.0 + 12.0 * std::log2(f / 440.0)));
        bin_class[k] = ((midi % 12) + 12) % 12;
    }

    Eigen::ArrayXd hann(window);
    for (Eigen::Index i = 0; i < window; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (window - 1));

    Eigen::FFT<double> fft;
    std::vector<double> frame(static_cast<std::size_t>(window));
    std::vector<std::complex<double>> spectrum;

    ChromaSequence chroma;
    chroma.frame_period = frame_period;
    chroma.frames = Eigen::MatrixXd::Zero(12, n_frames);
    for (Eigen::Index fi = 0; fi < n_frames; ++fi) {
        const Eigen::Index start = fi * hop;
        const Eigen::Index avail = std::min(window, audio.samples.size() - start);
        for (Eigen::Index i = 0; i < avail; ++i) frame[i] = audio.samples[start + i] * hann[i];
        std::fill(frame.begin() + avail, frame.end(), 0.0);
        fft.fwd(spectrum, frame);
        for (Eigen::Index k = 1; k < window / 2 + 1; ++k) {
            const int cls = bin_class[k];
            if (cls >= 0) chroma.frames(cls, fi) += std::abs(spectrum[k]);
        }
    }
    return chroma;
}

ChromaSequence chroma_features(const AudioBuffer& audio, double frame_period,
                               const ChromaConfig& cfg) {
    ChromaSequence chroma = chroma_energies(audio, frame_period, cfg);
    for (Eigen::Index c = 0; c < chroma.frames.cols(); ++c) {
        const double norm = chroma.frames.col(c).norm();
        if (norm > 0.0) chroma.frames.col(c) /= norm;
    }
    return chroma;
}

OnsetFeatureSequence onset_features(const ChromaSequence& energies, const OnsetConfig& cfg) {
    const Eigen::Index n = energies.frames.cols();
    if (n < 1) raise(errc::empty_sequence, "no frames");

    OnsetFeatureSequence out;
    out.frame_period = energies.frame_period;
    out.frames = Eigen::MatrixXd::Zero(12, n);

    // rectified difference (frame 0 differences against silence), smeared
    // forward over the next smear_frames with linearly decaying weights
    const int d = cfg.smear_frames;
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::VectorXd prev =
            t > 0 ? energies.frames.col(t - 1) : Eigen::VectorXd::Zero(12).eval();
        const Eigen::VectorXd impulse = (energies.frames.col(t) - prev).cwiseMax(0.0);
        if (impulse.isZero(0.0)) continue;
        for (int k = 0; k < d && t + k < n; ++k)
            out.frames.col(t + k) += impulse * (static_cast<double>(d - k) / d);
    }

    // frame-wise normalization by the max over a centered 1-second window
    const auto half =
        static_cast<Eigen::Index>(std::llround(cfg.norm_window / energies.frame_period)) / 2;
    const Eigen::VectorXd frame_max = out.frames.colwise().maxCoeff();
    Eigen::MatrixXd normalized(12, n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, t - half);
        const Eigen::Index hi = std::min(n - 1, t + half);
        const double local = frame_max.segment(lo, hi - lo + 1).maxCoeff();
        normalized.col(t) = out.frames.col(t) / std::max(local, cfg.norm_floor);
    }
    out.frames = std::move(normalized);
    return out;
}

Eigen::MatrixXd seba_cost_matrix(const AudioBuffer& score_audio, const AudioBuffer& perf_audio,
                                 double frame_period, const ResourceBudget* budget) {
    const ChromaSequence se = chroma_energies(score_audio, frame_period);
    const ChromaSequence pe = chroma_energies(perf_audio, frame_period);
    if (budget) budget->check_time("audio features");

    const Eigen::Index n = se.frames.cols();
    const Eigen::Index m = pe.frames.cols();
    if (budget)
        budget->check_allocation(static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m) *
                                     sizeof(double) * 2,
                                 "summed cost matrix");

    // chroma term: cosine distance of the normalized frames via one GEMM
    Eigen::MatrixXd sn = se.frames;
    Eigen::MatrixXd pn = pe.frames;
    Eigen::VectorXd s_norm = sn.colwise().norm();
    Eigen::VectorXd p_norm = pn.colwise().norm();
    for (Eigen::Index c = 0; c < n; ++c)
        if (s_norm[c] > 0.0) sn.col(c) /= s_norm[c];
    for (Eigen::Index c = 0; c < m; ++c)
        if (p_norm[c] > 0.0) pn.col(c) /= p_norm[c];

    Eigen::MatrixXd cost = (1.0 - (sn.transpose() * pn).array()).cwiseMax(0.0);
    // zero-vector convention: both silent -> 0, one silent -> 1
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s_norm[i] > 0.0) continue;
        for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = p_norm[j] == 0.0 ? 0.0 : 1.0;
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        if (p_norm[j] > 0.0) continue;
        for (Eigen::Index i = 0; i < n; ++i) cost(i, j) = s_norm[i] == 0.0 ? 0.0 : 1.0;
    }
    if (budget) budget->check_time("chroma distance matrix");

    // onset term: euclidean distances via the norms + GEMM identity
    const OnsetFeatureSequence so = onset_features(se);
    const OnsetFeatureSequence po = onset_features(pe);
    const Eigen::VectorXd s_sq = so.frames.colwise().squaredNorm();
    const Eigen::VectorXd p_sq = po.frames.colwise().squaredNorm();
    Eigen::MatrixXd onset_term = -2.0 * (so.frames.transpose() * po.frames);
    onset_term.colwise() += s_sq;
    onset_term.rowwise() += p_sq.transpose();
    cost += onset_term.cwiseMax(0.0).cwiseSqrt();
    if (budget) budget->check_time("onset distance matrix");
    return cost;
}

namespace {

struct WavReader {
    std::vector<std::uint8_t> bytes;
    std::size_t pos = 0;

    std::uint32_t u32() {
        if (pos + 4 > bytes.size()) raise(errc::malformed_wav, "unexpected end of file");
        const std::uint32_t v = bytes[pos] | (bytes[pos + 1] << 8) | (bytes[pos + 2] << 16) |
                                (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
        pos += 4;
        return v;
    }

    std::uint32_t u16() {
        if (pos + 2 > bytes.size()) raise(errc::malformed_wav, "unexpected end of file");
        const std::uint32_t v = bytes[pos] | (bytes[pos + 1] << 8);
        pos += 2;
        return v;
    }

    std::string tag() {
        if (pos + 4 > bytes.size()) raise(errc::malformed_wav, "unexpected end of file");
        std::string t(reinterpret_cast<const char*>(bytes.data() + pos), 4);
        pos += 4;
        return t;
    }
};

Eigen::ArrayXd resample_linear(const Eigen::ArrayXd& in, double src_rate, double dst_rate) {
    if (src_rate == dst_rate || in.size() == 0) return in;
    const auto out_len = static_cast<Eigen::Index>(
        std::llround(static_cast<double>(in.size()) * dst_rate / src_rate));
    Eigen::ArrayXd out(out_len);
    const double step = src_rate / dst_rate;
    for (Eigen::Index i = 0; i < out_len; ++i) {
        const double x = static_cast<double>(i) * step;
        const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(x), in.size() - 1);
        const auto k1 = std::min<Eigen::Index>(k + 1, in.size() - 1);
        const double frac = x - static_cast<double>(k);
        out[i] = in[k] * (1.0 - frac) + in[k1] * frac;
    }
    return out;
}

} // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot open " + path.string());
    WavReader r;
    r.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

    if (r.tag() != "RIFF") raise(errc::malformed_wav, "missing RIFF marker");
    r.u32(); // riff size
    if (r.tag() != "WAVE") raise(errc::malformed_wav, "missing WAVE marker");

    int format = 0, channels = 0, bits = 0;
    double rate = 0.0;
    Eigen::ArrayXd mono;
    bool have_fmt = false, have_data = false;
    while (r.pos + 8 <= r.bytes.size()) {
        const std::string id = r.tag();
        const std::uint32_t size = r.u32();
        const std::size_t next = r.pos + size + (size & 1);
        if (id == "fmt ") {
            format = static_cast<int>(r.u16());
            channels = static_cast<int>(r.u16());
            rate = static_cast<double>(r.u32());
            r.u32(); // byte rate
            r.u16(); // block align
            bits = static_cast<int>(r.u16());
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) raise(errc::malformed_wav, "data chunk before fmt chunk");
            if (channels < 1) raise(errc::malformed_wav, "no channels");
            if (r.pos + size > r.bytes.size())
                raise(errc::malformed_wav, "data chunk beyond end of file");
            const std::uint8_t* p = r.bytes.data() + r.pos;
            Eigen::Index n_samples = 0;
            if (format == 1 && bits == 16) {
                n_samples = size / (2 * channels);
                mono = Eigen::ArrayXd::Zero(n_samples);
                for (Eigen::Index i = 0; i < n_samples; ++i) {
                    double acc = 0.0;
                    for (int c = 0; c < channels; ++c) {
                        std::int16_t v;
                        std::memcpy(&v, p + (i * channels + c) * 2, 2);
                        acc += static_cast<double>(v) / 32768.0;
                    }
                    mono[i] = acc / channels;
                }
            } else if (format == 3 && bits == 32) {
                n_samples = size / (4 * channels);
                mono = Eigen::ArrayXd::Zero(n_samples);
                for (Eigen::Index i = 0; i < n_samples; ++i) {
                    double acc = 0.0;
                    for (int c = 0; c < channels; ++c) {
                        float v;
                        std::memcpy(&v, p + (i * channels + c) * 4, 4);
                        acc += static_cast<double>(v);
                    }
                    mono[i] = acc / channels;
                }
            } else {
                raise(errc::unsupported_encoding,
                      "only 16-bit PCM and float32 WAV are supported");
            }
            have_data = true;
        }
        r.pos = next;
    }
    if (!have_fmt || !have_data) raise(errc::malformed_wav, "missing fmt or data chunk");

    AudioBuffer out;
    out.sample_rate = kDefaultSampleRate;
    out.samples = resample_linear(mono, rate, kDefaultSampleRate);
    return out;
}

void write_wav(const AudioBuffer& audio, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_failure, "cannot open " + path.string() + " for writing");

    const auto n = static_cast<std::uint32_t>(audio.samples.size());
    const auto rate = static_cast<std::uint32_t>(std::llround(audio.sample_rate));
    const std::uint32_t data_size = n * 2;
    const auto w16 = [&out](std::uint32_t v) {
        const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
        out.write(b, 2);
    };
    const auto w32 = [&out](std::uint32_t v) {
        const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
        out.write(b, 4);
    };
    out.write("RIFF", 4);
    w32(36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    w32(16);
    w16(1); // PCM
    w16(1); // mono
    w32(rate);
    w32(rate * 2);
    w16(2);
    w16(16);
    out.write("data", 4);
    w32(data_size);
    for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
        const double v = std::clamp(audio.samples[i], -1.0, 1.0);
        const auto s = static_cast<std::int16_t>(std::lround(v * 32767.0));
        w16(static_cast<std::uint16_t>(s));
    }
    if (!out) raise(errc::io_failure, "short write to " + path.string());
}

} // namespace a2sa
