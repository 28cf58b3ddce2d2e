// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_METRICS_METRICS_H_
#define PVSE_METRICS_METRICS_H_

#include "pvse/signal/waveform.h"

namespace pvse::metrics {

// Short-time objective intelligibility in [0, 1]. Both signals are resampled
// to 10 kHz, frames more than 40 dB below the loudest clean frame are
// dropped, and clipped band-envelope correlations over 384 ms segments are
// averaged. Throws LengthMismatch, TooShort, SilentReference.
double Stoi(const signal::Waveform &clean, const signal::Waveform &processed);

inline constexpr double kSiSdrCap = 80.0;

// Scale-invariant SDR in dB, clamped to [-80, 80]. Throws LengthMismatch,
// SilentReference.
double SiSdr(const signal::Waveform &clean, const signal::Waveform &processed);

// Mean per-frame SNR over 32 ms frames with 50% overlap, each frame clamped
// to [-10, 35] dB; frames with clean power below 1e-8 are skipped. Throws
// LengthMismatch, NoValidFrames.
double SegSnr(const signal::Waveform &clean, const signal::Waveform &processed);

// Log-likelihood ratio of order-10 LPC fits over 32 ms Hann frames (50%
// overlap); mean of the smallest 95% of frame values. Throws LengthMismatch,
// TooShort, NoValidFrames.
double Llr(const signal::Waveform &clean, const signal::Waveform &processed);

// Weighted spectral slope distance over 25 critical bands, 32 ms Hann frames
// with 75% overlap. Throws LengthMismatch, TooShort.
double Wss(const signal::Waveform &clean, const signal::Waveform &processed);

// Mean absolute difference of the normalized spectrograms.
double SpectralL1(const signal::Waveform &clean, const signal::Waveform &processed);

}  // namespace pvse::metrics

#endif  // PVSE_METRICS_METRICS_H_
