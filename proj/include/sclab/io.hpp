#pragma once

#include "sclab/quantization.hpp"
#include "sclab/wavefield.hpp"

#include <string>

namespace sclab::io {

/// Flat little-endian binary format: i64 d, i64 n_j per axis, f64 lo_j/hi_j
/// per axis, f64 h, then interleaved re/im f64 samples.
void write_field(const std::string& path, const WaveField& f);
WaveField read_field(const std::string& path);

/// Same header twice (x grid then xi grid) followed by the values.
void write_phase_field(const std::string& path, const PhaseSpaceField& f);

/// Grid-operator export: i64 rows, i64 cols, f64 h, then row-major complex
/// doubles.
void write_operator(const std::string& path, const quantization::GridOperator& op);

/// CSV of a 1-D field: x, re, im, abs2.
void write_field_csv(const std::string& path, const WaveField& f);

/// CSV of eigenvalues: index, value.
void write_spectrum_csv(const std::string& path, const VectorXd& evals);

/// Writes text atomically (temp file + rename).
void write_text(const std::string& path, const std::string& content);

/// FNV-1a 64 hash, used to stamp outputs with their manifest.
std::uint64_t fnv1a(const std::string& data);

}  // namespace sclab::io
