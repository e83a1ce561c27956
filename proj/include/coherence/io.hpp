#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coherence/maxcorr.hpp"
#include "coherence/states.hpp"

namespace coherence::io {

/// Contents of a state file: either a density matrix or a pure state.
struct LoadedState {
    std::optional<DensityMatrix> density;
    std::optional<PureState> pure;
};

/// Parses a state file. Syntax and shape problems throw parse_error with the
/// position when known; value-level invariant failures (Hermiticity, trace,
/// positivity, norm) throw contract_violation. Non-finite numbers are
/// rejected at parse time.
LoadedState load_state_file(const std::string& path);

/// The density matrix view of a loaded state (outer product for pure files).
DensityMatrix as_density(const LoadedState& loaded);

/// Kraus operators of a channel file {"kraus": [matrix, ...]}.
std::vector<ComplexMatrix> load_channel_file(const std::string& path);

/// Steps of a protocol file {"steps": [{"party": "A"|"B", "kraus": [...]}]}.
std::vector<ProtocolStep> load_protocol_file(const std::string& path);

/// State file text for a density matrix / pure state. All numbers carry 12
/// significant digits; output is byte-deterministic.
std::string encode_density(const DensityMatrix& rho);
std::string encode_pure(const PureState& psi);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// One double at 12 significant digits.
std::string format_significant(double value);

/// SHA-256 of the canonical byte encoding of a state: magic "CDM1", the
/// subsystem count and dims as little-endian u64, then row-major (re, im)
/// pairs as little-endian IEEE-754 doubles.
std::string state_digest(const DensityMatrix& rho);

} // namespace coherence::io
