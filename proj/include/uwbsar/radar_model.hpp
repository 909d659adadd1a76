#pragma once

// Radar parameters, transmitted pulse synthesis and range compression.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uwbsar/core.hpp"
#include "uwbsar/detail/fft.hpp"

namespace uwbsar {

/// Pulse and antenna parameters. Defaults describe the LT102 module used in
/// the reference setup: 23.328 GHz sampling, 7.29 GHz carrier, 2 GHz
/// bandwidth, 60 degree beam, 0.4-3 m working range, side-looking mount.
struct RadarConfig {
  double sample_rate_hz = 23.328e9;
  double center_freq_hz = 7.29e9;
  double bandwidth_hz = 2.0e9;
  double pulse_amplitude_v = 1.0;
  double beamwidth_rad = kPi / 3.0;  // full width
  double range_min_m = 0.4;
  double range_max_m = 3.0;
  double mount_angle_rad = kPi / 2.0;  // boresight relative to robot heading

  void validate() const {
    const double vals[] = {sample_rate_hz, center_freq_hz, bandwidth_hz, pulse_amplitude_v,
                           beamwidth_rad,  range_min_m,    range_max_m,  mount_angle_rad};
    for (double v : vals)
      if (!std::isfinite(v)) throw Error("RadarConfig: non-finite parameter");
    if (center_freq_hz <= 0.0 || bandwidth_hz <= 0.0)
      throw Error("RadarConfig: center frequency and bandwidth must be positive");
    if (bandwidth_hz >= 2.0 * center_freq_hz)
      throw Error("RadarConfig: bandwidth must be below twice the center frequency");
    if (!(sample_rate_hz > 2.0 * (center_freq_hz + bandwidth_hz / 2.0)))
      throw Error("RadarConfig: sample rate below Nyquist for the pulse band");
    if (!(range_min_m > 0.0 && range_min_m < range_max_m))
      throw Error("RadarConfig: require 0 < range_min_m < range_max_m");
    if (!(beamwidth_rad > 0.0 && beamwidth_rad < kPi))
      throw Error("RadarConfig: require 0 < beamwidth_rad < pi");
    if (pulse_amplitude_v <= 0.0) throw Error("RadarConfig: pulse amplitude must be positive");
  }

  bool operator==(const RadarConfig&) const = default;
};

/// Uniformly sampled real signal; sample i sits at t0_s + i / sample_rate_hz.
struct Waveform {
  std::vector<double> samples;
  double t0_s = 0.0;
  double sample_rate_hz = 1.0;

  double time_at(std::size_t i) const {
    return t0_s + static_cast<double>(i) / sample_rate_hz;
  }
  void validate() const {
    if (samples.empty()) throw Error("Waveform: no samples");
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz) || !std::isfinite(t0_s))
      throw Error("Waveform: invalid timing");
    for (double s : samples)
      if (!std::isfinite(s)) throw Error("Waveform: non-finite sample");
  }
};

using ComplexSeries = std::vector<std::complex<double>>;

/// One raw echo as digitized, stamped with the radar pose.
struct RawScan {
  Waveform echo;
  Pose2 pose;
  std::size_t radar_index = 0;
};

/// Range-compressed analytic scan. Bin k covers one-way range k * dd.
struct CompressedScan {
  ComplexSeries bins;
  Pose2 pose;
  std::size_t radar_index = 0;
};

// ---------------------------------------------------------------------------
// Gaussian pulse

/// Envelope exponent a in exp(-a t^2) such that the envelope spectrum falls
/// to -6 dB at fc +/- bandwidth/2.
inline double gaussian_envelope_rate(const RadarConfig& cfg) {
  const double ref = std::pow(10.0, -6.0 / 20.0);
  const double w = kPi * cfg.bandwidth_hz;  // pi * fc * fractional bandwidth
  return -(w * w) / (4.0 * std::log(ref));
}

/// Half duration after which the envelope stays below `rel_level` of peak.
inline double pulse_half_duration(const RadarConfig& cfg, double rel_level = 1e-3) {
  return std::sqrt(-std::log(rel_level) / gaussian_envelope_rate(cfg));
}

/// Continuous-time transmitted pulse s(t).
inline double pulse_value(const RadarConfig& cfg, double t) {
  const double a = gaussian_envelope_rate(cfg);
  const double at = std::abs(t);
  return cfg.pulse_amplitude_v * std::exp(-a * at * at) *
         std::cos(2.0 * kPi * cfg.center_freq_hz * at);
}

/// Gaussian-modulated cosine sampled at fs on a grid centered at t = 0.
inline Waveform synthesize_pulse(const RadarConfig& cfg, double half_duration_s) {
  cfg.validate();
  if (!(half_duration_s > 0.0) || !std::isfinite(half_duration_s))
    throw Error("synthesize_pulse: half duration must be positive");
  const double min_half = pulse_half_duration(cfg, 1e-3);
  if (half_duration_s * (1.0 + 1e-12) < min_half)
    throw Error("synthesize_pulse: half duration too short, envelope not below 1e-3 at edges");

  const auto half = static_cast<long>(std::ceil(half_duration_s * cfg.sample_rate_hz));
  Waveform w;
  w.sample_rate_hz = cfg.sample_rate_hz;
  w.t0_s = -static_cast<double>(half) / cfg.sample_rate_hz;
  w.samples.resize(static_cast<std::size_t>(2 * half + 1));
  for (long k = -half; k <= half; ++k) {
    const double t = static_cast<double>(std::abs(k)) / cfg.sample_rate_hz;
    w.samples[static_cast<std::size_t>(k + half)] = pulse_value(cfg, t);
  }
  return w;
}

inline Waveform synthesize_pulse(const RadarConfig& cfg) {
  return synthesize_pulse(cfg, pulse_half_duration(cfg, 1e-3));
}

// ---------------------------------------------------------------------------
// Range compression

/// Correlates `received` with the pulse (convolution with h(t) = s*(-t)).
/// The output keeps the received time axis and length, so an echo whose
/// pulse center arrives at time tau peaks at the output sample nearest tau.
inline Waveform matched_filter(const Waveform& received, const Waveform& pulse) {
  received.validate();
  pulse.validate();
  if (std::abs(received.sample_rate_hz - pulse.sample_rate_hz) >
      1e-9 * received.sample_rate_hz)
    throw Error("matched_filter: sample-rate mismatch");

  // Integer sample offset of each pulse tap relative to t = 0.
  const auto first = static_cast<long>(std::lround(pulse.t0_s * pulse.sample_rate_hz));
  const auto n = static_cast<long>(received.samples.size());
  const auto m = static_cast<long>(pulse.samples.size());

  Waveform out;
  out.t0_s = received.t0_s;
  out.sample_rate_hz = received.sample_rate_hz;
  out.samples.assign(received.samples.size(), 0.0);
  for (long k = 0; k < n; ++k) {
    double acc = 0.0;
    for (long j = 0; j < m; ++j) {
      const long idx = k + first + j;
      if (idx < 0 || idx >= n) continue;
      acc += received.samples[static_cast<std::size_t>(idx)] * pulse.samples[static_cast<std::size_t>(j)];
    }
    out.samples[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

/// Analytic signal by the frequency-domain Hilbert construction. The real
/// part is the input verbatim; only the imaginary part comes from the FFT.
inline ComplexSeries analytic_signal(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw Error("analytic_signal: non-finite input");
  const std::size_t n = x.size();
  ComplexSeries z(n);
  if (n == 0) return z;
  for (std::size_t i = 0; i < n; ++i) z[i] = {x[i], 0.0};
  detail::fft(z);
  // One-sided spectrum weights: DC and Nyquist kept once, positive bins doubled.
  const std::size_t pos_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < pos_end; ++k) z[k] *= 2.0;
  for (std::size_t k = pos_end + (n % 2 == 0 ? 1 : 0); k < n; ++k) z[k] = 0.0;
  detail::fft(z, true);
  for (std::size_t i = 0; i < n; ++i) z[i] = {x[i], z[i].imag()};
  return z;
}

inline ComplexSeries analytic_signal(const Waveform& w) {
  w.validate();
  return analytic_signal(std::span<const double>(w.samples));
}

/// Matched filter followed by the analytic conversion, once per scan.
inline CompressedScan compress_scan(const RawScan& raw, const Waveform& pulse) {
  CompressedScan out;
  out.bins = analytic_signal(matched_filter(raw.echo, pulse));
  out.pose = raw.pose;
  out.radar_index = raw.radar_index;
  return out;
}

// ---------------------------------------------------------------------------
// Range bins

/// One-way range covered by one sample: c / (2 fs).
inline double range_bin_spacing(const RadarConfig& cfg) {
  return kSpeedOfLight / (2.0 * cfg.sample_rate_hz);
}

/// Nearest bin index for a one-way range.
inline std::size_t range_to_bin(double range_m, const RadarConfig& cfg) {
  if (!(range_m >= 0.0) || !std::isfinite(range_m))
    throw Error("range_to_bin: range must be finite and non-negative");
  return static_cast<std::size_t>(std::llround(range_m / range_bin_spacing(cfg)));
}

/// As above, but empty when the bin falls beyond a scan of `n_bins` samples.
inline std::optional<std::size_t> range_to_bin(double range_m, const RadarConfig& cfg,
                                               std::size_t n_bins) {
  const std::size_t k = range_to_bin(range_m, cfg);
  if (k >= n_bins) return std::nullopt;
  return k;
}

/// Smallest scan length whose bins cover range_max plus the pulse tail.
inline std::size_t bins_to_cover(const RadarConfig& cfg) {
  const double tail = pulse_half_duration(cfg) * cfg.sample_rate_hz;
  return range_to_bin(cfg.range_max_m, cfg) + static_cast<std::size_t>(std::ceil(tail)) + 2;
}

}  // namespace uwbsar
