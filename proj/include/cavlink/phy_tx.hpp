#pragma once

#include <vector>

#include "cavlink/framing.hpp"
#include "cavlink/phy_common.hpp"

namespace cavlink {

/// PSDU plus MCS; the unit of PHY transmission.
struct NonHtPacket {
    Psdu psdu;
    int mcs_index = 0;
};

/// 10 repetitions of the 16-sample short training pattern (160 samples, 8 us).
IqWaveform build_lstf(double sample_rate = kSampleRate);

/// 32-sample cyclic prefix plus two identical 64-sample long training symbols.
IqWaveform build_lltf(double sample_rate = kSampleRate);

/// The 24-bit SIGNAL field {RATE, reserved, LENGTH, parity, tail}, uncoded.
BitVector build_lsig_bits(const Mcs& mcs, size_t psdu_length);

/// One BPSK rate-1/2 OFDM symbol (80 samples) carrying the SIGNAL field.
IqWaveform build_lsig(const Mcs& mcs, size_t psdu_length);

/// Number of DATA OFDM symbols for a PSDU at a given MCS.
size_t data_symbol_count(size_t psdu_length, const Mcs& mcs);

struct DataField {
    IqWaveform waveform;                   // n_symbols * 80 samples
    std::vector<Complex> symbols;          // 48 * n_symbols data constellation points
    size_t n_symbols = 0;
};

/// Scramble, encode, puncture, interleave, map and OFDM-modulate the PSDU.
DataField modulate_data(const Psdu& psdu, const Mcs& mcs, uint8_t scrambler_seed = kDefaultScramblerSeed);

/// Full non-HT PPDU: L-STF | L-LTF | L-SIG | DATA.
IqWaveform build_ppdu(const NonHtPacket& packet, uint8_t scrambler_seed = kDefaultScramblerSeed);

/// Concatenate PPDUs separated (and preceded) by idle_time of exact zeros.
IqWaveform assemble_burst(const std::vector<IqWaveform>& ppdus, double idle_time);

/// Reference data constellation points for a PSDU (the data-aided EVM reference).
std::vector<Complex> reference_symbols(const Psdu& psdu, const Mcs& mcs, uint8_t scrambler_seed = kDefaultScramblerSeed);

}  // namespace cavlink
