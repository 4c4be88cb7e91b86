#include "risim/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

void push_vec(std::vector<double>& out, const Vec3& v) {
  out.push_back(v.x);
  out.push_back(v.y);
  out.push_back(v.z);
}

void push_coeff(std::vector<double>& out, cd z, double log_floor) {
  const double mag = std::abs(z);
  out.push_back(mag > 0.0 ? std::max(std::log10(mag), log_floor) : log_floor);
  out.push_back(std::atan2(z.imag(), z.real()) / kPi);
}

}  // namespace

std::string to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::PosCen: return "pos_cen";
    case EncoderKind::PosInd: return "pos_ind";
    case EncoderKind::ChanCen: return "chan_cen";
    case EncoderKind::ChanInd: return "chan_ind";
  }
  throw std::domain_error("encoder: bad kind");
}

EncoderKind encoder_from_string(const std::string& name) {
  if (name == "pos_cen") return EncoderKind::PosCen;
  if (name == "pos_ind") return EncoderKind::PosInd;
  if (name == "chan_cen") return EncoderKind::ChanCen;
  if (name == "chan_ind") return EncoderKind::ChanInd;
  throw std::domain_error("encoder: unknown kind " + name);
}

bool is_centralized(EncoderKind kind) {
  return kind == EncoderKind::PosCen || kind == EncoderKind::ChanCen;
}

bool is_position(EncoderKind kind) {
  return kind == EncoderKind::PosCen || kind == EncoderKind::PosInd;
}

std::size_t feature_width(EncoderKind kind, std::size_t num_ris, std::size_t elements_per_ris) {
  const std::size_t covered = is_centralized(kind) ? num_ris * elements_per_ris : elements_per_ris;
  if (is_position(kind)) return 6 * covered + 3;
  return 4 * covered + 2;
}

std::size_t target_width(EncoderKind kind, std::size_t num_ris, std::size_t groups_per_ris) {
  return (is_centralized(kind) ? num_ris : 1) * groups_per_ris;
}

std::vector<double> encode_position(const Scene& scene, const Vec3& rx, EncoderKind kind,
                                    std::size_t m) {
  require(is_position(kind), "encode_position: wrong encoder kind");
  const bool cen = is_centralized(kind);
  require(cen || m < scene.num_ris(), "encode_position: ris index out of range");
  std::vector<double> out;
  const std::size_t first = cen ? 0 : m;
  const std::size_t last = cen ? scene.num_ris() : m + 1;
  for (std::size_t i = first; i < last; ++i) {
    for (std::size_t k = 0; k < scene.ris[i].geometry.num_elements(); ++k) {
      const Vec3 e = scene.element_position(i, k);
      push_vec(out, scene.tx - e);
      push_vec(out, rx - e);
    }
  }
  push_vec(out, rx - scene.tx);
  return out;
}

std::vector<double> encode_channel(const ChannelRealization& r, EncoderKind kind, std::size_t m,
                                   double log_floor) {
  require(!is_position(kind), "encode_channel: wrong encoder kind");
  require(std::isfinite(log_floor), "encode_channel: bad log floor");
  const bool cen = is_centralized(kind);
  require(cen || m < r.h.size(), "encode_channel: ris index out of range");
  std::vector<double> out;
  const std::size_t first = cen ? 0 : m;
  const std::size_t last = cen ? r.h.size() : m + 1;
  for (std::size_t i = first; i < last; ++i)
    for (cd z : r.h[i]) push_coeff(out, z, log_floor);
  for (std::size_t i = first; i < last; ++i)
    for (cd z : r.g[i]) push_coeff(out, z, log_floor);
  push_coeff(out, r.h0, log_floor);
  return out;
}

std::vector<double> encode_label_slice(std::span<const int> indices, const Codebook& cb) {
  require(cb.bits == 1, "encode_label: only 1 bit codebooks have sign targets");
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] == 0 || indices[i] == 1, "encode_label: index out of range");
    out[i] = indices[i] == 0 ? 1.0 : -1.0;
  }
  return out;
}

std::vector<double> encode_label(const PhaseConfig& cfg, const Codebook& cb) {
  cfg.validate(cb);
  return encode_label_slice(cfg.indices, cb);
}

PhaseConfig decode_output(std::span<const double> y, std::size_t num_ris,
                          std::size_t groups_per_ris) {
  require(y.size() == num_ris * groups_per_ris, "decode_output: width mismatch");
  PhaseConfig cfg = PhaseConfig::zeros(num_ris, groups_per_ris);
  for (std::size_t i = 0; i < y.size(); ++i) cfg.indices[i] = y[i] >= 0.0 ? 0 : 1;
  return cfg;
}

}  // namespace risim
