#pragma once

#include <string>

#include "risim/ris_core.hpp"

namespace risim {

enum class EncoderKind { PosCen, PosInd, ChanCen, ChanInd };

std::string to_string(EncoderKind kind);
EncoderKind encoder_from_string(const std::string& name);
bool is_centralized(EncoderKind kind);
bool is_position(EncoderKind kind);

std::size_t feature_width(EncoderKind kind, std::size_t num_ris, std::size_t elements_per_ris);
std::size_t target_width(EncoderKind kind, std::size_t num_ris, std::size_t groups_per_ris);

inline constexpr std::size_t kAllRis = static_cast<std::size_t>(-1);
inline constexpr double kDefaultLogFloor = -20.0;

// Per element triples (tx - e, rx - e) for every element of every covered RIS,
// then rx - tx appended. PosInd covers only RIS m.
std::vector<double> encode_position(const Scene& scene, const Vec3& rx, EncoderKind kind,
                                    std::size_t m = kAllRis);

// Per coefficient pairs (log10 magnitude floored, phase / pi): the h block then
// the g block, RIS major within each, then the h0 pair. ChanInd covers only RIS
// m but keeps the h0 pair.
std::vector<double> encode_channel(const ChannelRealization& r, EncoderKind kind,
                                   std::size_t m = kAllRis, double log_floor = kDefaultLogFloor);

// Regression targets for codebook indices; defined for 1 bit codebooks where
// index 0 maps to +1 and index 1 to -1.
std::vector<double> encode_label(const PhaseConfig& cfg, const Codebook& cb);
std::vector<double> encode_label_slice(std::span<const int> indices, const Codebook& cb);

// Inverse of encode_label on raw network outputs: y >= 0 picks index 0.
PhaseConfig decode_output(std::span<const double> y, std::size_t num_ris,
                          std::size_t groups_per_ris);

}  // namespace risim
