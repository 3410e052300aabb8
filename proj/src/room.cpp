// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/room.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "sbss/errors.hpp"
#include "sbss/kv_config.hpp"

namespace sbss {

namespace {

double distance(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::string describe(const Point3& p) {
  return "(" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " + std::to_string(p[2]) + ")";
}

void check_inside(const RoomSpec& room, const Point3& p, const std::string& what) {
  for (int d = 0; d < 3; ++d) {
    if (!(p[d] > 0.0 && p[d] < room.dimensions[d])) {
      throw ContractViolation(what + " at " + describe(p) + " is not strictly inside the room");
    }
  }
}

// Image coordinates along one axis: position (1 - 2q) s + 2 l L after
// |2 l - q| wall bounces.
struct AxisImage {
  double offset;  // image coordinate minus receiver coordinate
  int bounces;
};

std::vector<AxisImage> axis_images(double s, double r, double len, int order, double reach) {
  std::vector<AxisImage> out;
  const int lmax = order / 2 + 1;
  for (int l = -lmax; l <= lmax; ++l) {
    for (int q = 0; q <= 1; ++q) {
      const int bounces = std::abs(2 * l - q);
      if (bounces > order) continue;
      const double offset = (1 - 2 * q) * s + 2.0 * l * len - r;
      if (std::abs(offset) > reach) continue;
      out.push_back({offset, bounces});
    }
  }
  return out;
}

}  // namespace

void RoomSpec::validate() const {
  for (int d = 0; d < 3; ++d) {
    if (!(dimensions[d] > 0.0) || !std::isfinite(dimensions[d])) {
      throw ContractViolation("room dimensions must be positive");
    }
  }
  if (!(t60 >= 0.0) || !std::isfinite(t60)) throw ContractViolation("T60 must be >= 0");
  if (sample_rate <= 0) throw ContractViolation("sample rate must be positive");
  if (rir_length < 0) throw ContractViolation("rir_length must be >= 0");
  if (mics.empty()) throw ContractViolation("room has no microphones");
  if (sources.empty()) throw ContractViolation("room has no sources");
  for (std::size_t i = 0; i < mics.size(); ++i) check_inside(*this, mics[i], "mic " + std::to_string(i));
  for (std::size_t i = 0; i < sources.size(); ++i) {
    check_inside(*this, sources[i], "source " + std::to_string(i));
  }
}

double RoomSpec::volume() const { return dimensions[0] * dimensions[1] * dimensions[2]; }

double RoomSpec::surface() const {
  const auto& d = dimensions;
  return 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
}

double sabine_alpha(const RoomSpec& room) {
  if (!(room.t60 >= 0.0)) throw ContractViolation("T60 must be >= 0");
  if (room.t60 == 0.0) return 1.0;
  return std::min(0.161 * room.volume() / (room.surface() * room.t60), 0.99);
}

int effective_rir_length(const RoomSpec& room) {
  if (room.rir_length > 0) return room.rir_length;
  double longest = 0.0;
  for (const auto& s : room.sources)
    for (const auto& m : room.mics) longest = std::max(longest, distance(s, m));
  const int direct = static_cast<int>(std::ceil(longest / kSpeedOfSound * room.sample_rate)) + 64;
  const int reverb = static_cast<int>(std::ceil(1.2 * room.t60 * room.sample_rate));
  return std::max(direct, reverb);
}

int effective_max_order(const RoomSpec& room) {
  if (room.max_order >= 0) return room.max_order;
  if (sabine_alpha(room) >= 1.0) return 0;
  const double reach = kSpeedOfSound * effective_rir_length(room) / room.sample_rate;
  int order = 0;
  for (int d = 0; d < 3; ++d) order += static_cast<int>(std::ceil(reach / room.dimensions[d])) + 1;
  return order;
}

std::vector<double> image_source_rir(const RoomSpec& room, int source, int mic, int max_order) {
  if (max_order < 0) throw ContractViolation("max_order must be >= 0");
  if (source < 0 || source >= static_cast<int>(room.sources.size())) {
    throw ContractViolation("source index out of range");
  }
  if (mic < 0 || mic >= static_cast<int>(room.mics.size())) {
    throw ContractViolation("mic index out of range");
  }
  const Point3& s = room.sources[source];
  const Point3& r = room.mics[mic];
  if (distance(s, r) < 1e-9) {
    throw ContractViolation("source " + std::to_string(source) + " and mic " + std::to_string(mic) +
                            " are collocated");
  }
  const int len = effective_rir_length(room);
  const double beta = std::sqrt(1.0 - sabine_alpha(room));
  const double fs = room.sample_rate;
  const double reach = kSpeedOfSound * len / fs;

  std::vector<double> powers(max_order + 1);
  for (int b = 0; b <= max_order; ++b) powers[b] = b == 0 ? 1.0 : powers[b - 1] * beta;

  const auto xs = axis_images(s[0], r[0], room.dimensions[0], max_order, reach);
  const auto ys = axis_images(s[1], r[1], room.dimensions[1], max_order, reach);
  const auto zs = axis_images(s[2], r[2], room.dimensions[2], max_order, reach);

  std::vector<double> h(len, 0.0);
  for (const auto& ix : xs) {
    for (const auto& iy : ys) {
      const int bxy = ix.bounces + iy.bounces;
      if (bxy > max_order) continue;
      const double dxy = ix.offset * ix.offset + iy.offset * iy.offset;
      if (dxy > reach * reach) continue;
      for (const auto& iz : zs) {
        const int b = bxy + iz.bounces;
        if (b > max_order) continue;
        const double gain = powers[b];
        if (gain == 0.0) continue;
        const double d = std::sqrt(dxy + iz.offset * iz.offset);
        const double delay = d / kSpeedOfSound * fs;
        const auto i = static_cast<long long>(std::floor(delay));
        if (i >= len) continue;
        const double frac = delay - static_cast<double>(i);
        const double amp = gain / d;
        h[i] += (1.0 - frac) * amp;
        if (i + 1 < len) h[i + 1] += frac * amp;
      }
    }
  }
  return h;
}

std::vector<std::vector<std::vector<double>>> room_rirs(const RoomSpec& room) {
  room.validate();
  const int order = effective_max_order(room);
  const int n = static_cast<int>(room.sources.size());
  const int m = static_cast<int>(room.mics.size());
  std::vector<std::vector<std::vector<double>>> rirs(n, std::vector<std::vector<double>>(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) rirs[i][j] = image_source_rir(room, i, j, order);
  return rirs;
}

Mixture convolve_mix(const Waveform& sources,
                     const std::vector<std::vector<std::vector<double>>>& rirs,
                     int reference_mic) {
  sources.validate();
  const int n = sources.num_channels();
  if (n == 0) throw ContractViolation("convolve_mix: no sources");
  if (static_cast<int>(rirs.size()) != n) {
    throw ContractViolation("convolve_mix: " + std::to_string(n) + " sources but " +
                            std::to_string(rirs.size()) + " RIR sets");
  }
  const int m = static_cast<int>(rirs.front().size());
  for (const auto& set : rirs) {
    if (static_cast<int>(set.size()) != m) throw ContractViolation("convolve_mix: ragged RIR sets");
  }
  if (reference_mic < 0 || reference_mic >= m) {
    throw ContractViolation("convolve_mix: reference mic out of range");
  }
  const std::size_t len = sources.length();

  Mixture out;
  out.mixture = Waveform(sources.sample_rate, m, len);
  out.images.assign(n, Waveform(sources.sample_rate, 1, len));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const auto y = detail::fft_convolve(sources.channels[i], rirs[i][j]);
      auto& dst = out.mixture.channels[j];
      for (std::size_t k = 0; k < len && k < y.size(); ++k) dst[k] += y[k];
      if (j == reference_mic) {
        auto& img = out.images[i].channels[0];
        for (std::size_t k = 0; k < len && k < y.size(); ++k) img[k] = y[k];
      }
    }
  }
  return out;
}

RoomSpec default_room(double t60, int mics, int sources, std::uint64_t seed) {
  if (mics < 1 || sources < 1) throw ContractViolation("default_room: need a mic and a source");
  RoomSpec room;
  room.t60 = t60;
  const Point3 centre{4.0, 4.0, 1.5};
  const double spacing = 0.0283;
  for (int i = 0; i < mics; ++i) {
    room.mics.push_back({centre[0] + (i - 0.5 * (mics - 1)) * spacing, centre[1], centre[2]});
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 90.0);
  for (int i = 0; i < sources; ++i) {
    const double deg = (i % 2 == 0 ? 1.0 : -1.0) * angle(rng);
    const double rad = deg * std::numbers::pi / 180.0;
    room.sources.push_back({centre[0] + 2.0 * std::sin(rad), centre[1] + 2.0 * std::cos(rad), centre[2]});
  }
  return room;
}

namespace {

Point3 parse_point(const std::string& text, const std::string& what) {
  const auto items = split_list(text);
  if (items.size() != 3) throw ConfigError(what + ": expected three coordinates, got '" + text + "'");
  return {parse_number(items[0], what), parse_number(items[1], what), parse_number(items[2], what)};
}

}  // namespace

RoomSpec read_room_spec(const std::string& path) {
  const KvConfig cfg = KvConfig::read(path);
  cfg.check_keys({"dimensions", "t60", "sample_rate", "rir_length", "max_order", "mic", "source",
                  "mics", "sources", "seed"});
  const double t60 = cfg.number("t60", 0.0);
  RoomSpec room;
  if (cfg.has("mic") || cfg.has("source")) {
    room.t60 = t60;
    for (const auto& v : cfg.all("mic")) room.mics.push_back(parse_point(v, path + ": mic"));
    for (const auto& v : cfg.all("source")) room.sources.push_back(parse_point(v, path + ": source"));
  } else {
    room = default_room(t60, static_cast<int>(cfg.integer("mics", 2)),
                        static_cast<int>(cfg.integer("sources", 2)),
                        static_cast<std::uint64_t>(cfg.integer("seed", 0)));
  }
  if (cfg.has("dimensions")) room.dimensions = parse_point(cfg.string("dimensions"), path + ": dimensions");
  room.sample_rate = static_cast<int>(cfg.integer("sample_rate", 16000));
  room.rir_length = static_cast<int>(cfg.integer("rir_length", 0));
  room.max_order = static_cast<int>(cfg.integer("max_order", -1));
  try {
    room.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return room;
}

}  // namespace sbss
