#pragma once

#include "dsub/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dsub {

/// Description of one excitation signal.
///
/// Random parts use std::mt19937_64 seeded with `seed` (plus the channel index
/// for multi-channel tables) and the Box-Muller transform. Band limiting zeroes
/// every DFT bin outside [band_low, band_high] and rescales the result to the
/// requested sample variance.
struct SignalSpec {
    enum class Kind { multisine, bandlimited_white_noise, file };

    Kind kind = Kind::bandlimited_white_noise;
    double sample_rate = 1000.0;  ///< Hz

    /// Multisine components (Hz, amplitude, phase in rad). Phases may be empty.
    std::vector<double> frequencies;
    std::vector<double> amplitudes;
    std::vector<double> phases;

    /// Noise band (Hz) and variance. For a multisine this is the corrupting noise;
    /// band_high <= 0 there means unfiltered white noise.
    double band_low = 0.0;
    double band_high = 200.0;
    double variance = 1.0;
    std::uint64_t seed = 1;

    /// CSV source for Kind::file (header row, one column per channel).
    std::string path;
    Index column = 0;

    /// Throws ModelError on a band at or above Nyquist, negative variance,
    /// mismatched multisine lists or a missing file path.
    void validate() const;
};

/// Five in-band sines between 5 and 150 Hz with unit amplitude, corrupted by
/// white noise of variance 0.01.
SignalSpec default_multisine();

/// n samples of the signal at spec.sample_rate. `channel` offsets the noise seed
/// so that channels share the deterministic part and differ in their noise.
Vector generate_signal(const SignalSpec& spec, Index n_samples, Index channel = 0);

/// n_samples x channels table built column by column with generate_signal.
Matrix generate_channels(const SignalSpec& spec, Index n_samples, Index channels);

std::string to_string(SignalSpec::Kind kind);
SignalSpec::Kind signal_kind_from_string(const std::string& name);

}  // namespace dsub
