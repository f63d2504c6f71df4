#include "dsub/signals.hpp"

#include "dsub/io.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>

namespace dsub {

namespace {

Vector gaussian_white(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // 53-bit uniform in (0, 1]
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };
    Vector out(n);
    for (Index i = 0; i < n; i += 2) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        out(i) = r * std::cos(theta);
        if (i + 1 < n) out(i + 1) = r * std::sin(theta);
    }
    return out;
}

void band_limit(Vector& x, double rate, double low, double high) {
    const Index n = x.size();
    if (n == 0) return;
    const auto bins = static_cast<std::size_t>(n / 2 + 1);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> freq(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)), &fftw_free);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(), freq.get(), FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq.get(), x.data(), FFTW_ESTIMATE);
    fftw_execute(fwd);
    const double df = rate / static_cast<double>(n);
    for (std::size_t k = 0; k < bins; ++k) {
        const double f = static_cast<double>(k) * df;
        if (f < low || f > high) {
            freq.get()[k][0] = 0.0;
            freq.get()[k][1] = 0.0;
        }
    }
    fftw_execute(inv);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    x /= static_cast<double>(n);
}

void scale_to_variance(Vector& x, double variance) {
    if (x.size() == 0) return;
    const double mean = x.mean();
    const double current = (x.array() - mean).square().mean();
    if (variance == 0.0 || current == 0.0) {
        x.setZero();
        return;
    }
    x *= std::sqrt(variance / current);
}

Vector noise(const SignalSpec& spec, Index n, Index channel, bool filtered) {
    Vector x = gaussian_white(n, spec.seed + static_cast<std::uint64_t>(channel));
    if (filtered) band_limit(x, spec.sample_rate, spec.band_low, spec.band_high);
    scale_to_variance(x, spec.variance);
    return x;
}

}  // namespace

void SignalSpec::validate() const {
    if (!(sample_rate > 0.0)) throw ModelError("signal sample rate must be positive");
    const double nyquist = 0.5 * sample_rate;
    if (!(variance >= 0.0)) throw ModelError("signal variance must be non-negative");
    switch (kind) {
    case Kind::bandlimited_white_noise:
        if (!(band_low >= 0.0) || !(band_high > band_low)) {
            throw ModelError("noise band must satisfy 0 <= low < high");
        }
        if (!(band_high < nyquist)) {
            throw ModelError("noise band upper edge " + std::to_string(band_high) + " Hz is not below Nyquist " +
                             std::to_string(nyquist) + " Hz");
        }
        break;
    case Kind::multisine:
        if (amplitudes.size() != frequencies.size()) {
            throw ModelError("multisine needs one amplitude per frequency");
        }
        if (!phases.empty() && phases.size() != frequencies.size()) {
            throw ModelError("multisine phases must be empty or one per frequency");
        }
        for (double f : frequencies) {
            if (!(f >= 0.0 && f < nyquist)) throw ModelError("multisine frequency outside [0, Nyquist)");
        }
        if (band_high > 0.0 && (!(band_low >= 0.0) || band_low >= band_high || band_high >= nyquist)) {
            throw ModelError("multisine noise band must satisfy 0 <= low < high < Nyquist");
        }
        break;
    case Kind::file:
        if (path.empty()) throw ModelError("file signal needs a path");
        if (column < 0) throw ModelError("file signal column must be non-negative");
        break;
    }
}

SignalSpec default_multisine() {
    SignalSpec s;
    s.kind = SignalSpec::Kind::multisine;
    s.frequencies = {5.0, 17.0, 43.0, 89.0, 150.0};
    s.amplitudes = {1.0, 0.8, 0.6, 0.4, 0.3};
    s.phases = {0.0, 1.1, 2.3, 0.7, 4.0};
    s.band_low = 0.0;
    s.band_high = 0.0;
    s.variance = 0.01;
    return s;
}

Vector generate_signal(const SignalSpec& spec, Index n_samples, Index channel) {
    spec.validate();
    if (n_samples < 0) throw ModelError("sample count must be non-negative");
    switch (spec.kind) {
    case SignalSpec::Kind::bandlimited_white_noise:
        return noise(spec, n_samples, channel, true);
    case SignalSpec::Kind::multisine: {
        Vector x = Vector::Zero(n_samples);
        for (std::size_t c = 0; c < spec.frequencies.size(); ++c) {
            const double w = 2.0 * std::numbers::pi * spec.frequencies[c];
            const double phase = spec.phases.empty() ? 0.0 : spec.phases[c];
            for (Index i = 0; i < n_samples; ++i) {
                x(i) += spec.amplitudes[c] * std::sin(w * static_cast<double>(i) / spec.sample_rate + phase);
            }
        }
        if (spec.variance > 0.0) x += noise(spec, n_samples, channel, spec.band_high > 0.0);
        return x;
    }
    case SignalSpec::Kind::file: {
        const CsvTable table = read_csv(spec.path);
        if (spec.column >= static_cast<Index>(table.header.size())) {
            throw ModelError("signal file " + spec.path + " has no column " + std::to_string(spec.column));
        }
        if (static_cast<Index>(table.rows.size()) < n_samples) {
            throw ModelError("signal file " + spec.path + " holds " + std::to_string(table.rows.size()) +
                             " samples, " + std::to_string(n_samples) + " requested");
        }
        Vector x(n_samples);
        for (Index i = 0; i < n_samples; ++i) {
            x(i) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(spec.column)];
        }
        return x;
    }
    }
    throw ModelError("unknown signal kind");
}

Matrix generate_channels(const SignalSpec& spec, Index n_samples, Index channels) {
    Matrix out(n_samples, channels);
    for (Index c = 0; c < channels; ++c) {
        if (spec.kind == SignalSpec::Kind::file) {
            SignalSpec shifted = spec;
            shifted.column = spec.column + c;
            out.col(c) = generate_signal(shifted, n_samples, c);
        } else {
            out.col(c) = generate_signal(spec, n_samples, c);
        }
    }
    return out;
}

std::string to_string(SignalSpec::Kind kind) {
    switch (kind) {
    case SignalSpec::Kind::multisine: return "multisine";
    case SignalSpec::Kind::bandlimited_white_noise: return "bandlimited_white_noise";
    case SignalSpec::Kind::file: return "file";
    }
    return "unknown";
}

SignalSpec::Kind signal_kind_from_string(const std::string& name) {
    if (name == "multisine") return SignalSpec::Kind::multisine;
    if (name == "bandlimited_white_noise" || name == "noise") return SignalSpec::Kind::bandlimited_white_noise;
    if (name == "file") return SignalSpec::Kind::file;
    throw ModelError("unknown signal kind '" + name + "'");
}

}  // namespace dsub
