#pragma once

#include <Eigen/Core>
#include <filesystem>

#include "a2sa/budget.hpp"
#include "a2sa/types.hpp"

namespace a2sa {

inline constexpr double kDefaultSampleRate = 22050.0;

struct AudioBuffer {
    Eigen::ArrayXd samples; // [-1, 1]
    double sample_rate = kDefaultSampleRate;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// Synthesis constants: 8 harmonics at amplitude 1/h, tau = 0.5 s exponential
// decay, 10 ms linear attack and release, peak normalized to 0.9. Harmonics
// above Nyquist are skipped.
struct SynthesisConfig {
    int harmonics = 8;
    double decay_tau = 0.5;
    double attack = 0.010;
    double release = 0.010;
    double peak = 0.9;
};

// Additive rendering of a note sequence at equal-temperament frequencies
// f = 440 * 2^((pitch-69)/12). Empty input gives a zero-length buffer.
AudioBuffer synthesize(const NoteSequence& seq, double sample_rate = kDefaultSampleRate,
                       const SynthesisConfig& cfg = {});

// 12 pitch classes per frame, columns are frames.
struct ChromaSequence {
    Eigen::MatrixXd frames; // 12 x N
    double frame_period = 0.02;

    int size() const { return static_cast<int>(frames.cols()); }
};

using OnsetFeatureSequence = ChromaSequence;

struct ChromaConfig {
    int window = 4096;       // STFT window (Hann)
    double min_freq = 55.0;  // analysis band
    double max_freq = 5000.0;
};

struct OnsetConfig {
    int smear_frames = 10;        // forward smear, linearly decaying
    double norm_window = 1.0;     // seconds, local max normalization
    double norm_floor = 1e-4;
};

// Raw (unnormalized) pitch-class energies from an STFT with
// hop = round(frame_period * sample_rate).
ChromaSequence chroma_energies(const AudioBuffer& audio, double frame_period,
                               const ChromaConfig& cfg = {});

// L2-normalized chroma frames (all-zero frames stay zero); the harmonic
// feature family of the summed-matrix baseline.
ChromaSequence chroma_features(const AudioBuffer& audio, double frame_period,
                               const ChromaConfig& cfg = {});

// Per-class half-wave-rectified energy difference, smeared forward with
// linearly decaying weights and normalized by the local 1-second max; the
// percussive feature family. Input is the *pre-normalization* energies.
OnsetFeatureSequence onset_features(const ChromaSequence& energies, const OnsetConfig& cfg = {});

// Summed cost matrix: cosine distances between chroma frames plus euclidean
// distances between onset-feature frames, score frames on rows.
Eigen::MatrixXd seba_cost_matrix(const AudioBuffer& score_audio, const AudioBuffer& perf_audio,
                                 double frame_period, const ResourceBudget* budget = nullptr);

// PCM WAV input: 16-bit or float32, mono or stereo (averaged); output is
// resampled to 22050 Hz by linear interpolation when needed.
AudioBuffer read_wav(const std::filesystem::path& path);

// 16-bit PCM mono writer (the optional --dump-wav CLI path).
void write_wav(const AudioBuffer& audio, const std::filesystem::path& path);

} // namespace a2sa
