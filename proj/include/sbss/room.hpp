// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Shoebox room simulation with the image-source method and convolutive mixing.

#ifndef SBSS_ROOM_HPP_
#define SBSS_ROOM_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sbss/signal.hpp"

namespace sbss {

using Point3 = std::array<double, 3>;

inline constexpr double kSpeedOfSound = 343.0;

struct RoomSpec {
  Point3 dimensions{8.0, 8.0, 3.0};
  double t60 = 0.0;
  std::vector<Point3> mics;
  std::vector<Point3> sources;
  int sample_rate = 16000;
  /// 0 picks max(1.2 T60 fs, longest direct path + 64 samples).
  int rir_length = 0;
  /// Negative picks an order high enough to fill rir_length.
  int max_order = -1;

  /// Throws ContractViolation unless every position is strictly inside the
  /// room, T60 >= 0, the rate is positive and there is at least one mic and
  /// one source.
  void validate() const;
  double volume() const;
  double surface() const;
};

/// 0.161 V / (S T60), clamped to 0.99; T60 == 0 gives 1.
double sabine_alpha(const RoomSpec& room);

int effective_rir_length(const RoomSpec& room);
int effective_max_order(const RoomSpec& room);

/// Sum of image-source impulses with reflection coefficient sqrt(1 - alpha)
/// per wall bounce, 1/distance spreading and linear-interpolation fractional
/// delay, truncated to effective_rir_length samples. Images whose total
/// bounce count exceeds max_order are skipped.
std::vector<double> image_source_rir(const RoomSpec& room, int source, int mic, int max_order);

/// All RIRs, indexed [source][mic], at effective_max_order.
std::vector<std::vector<std::vector<double>>> room_rirs(const RoomSpec& room);

struct Mixture {
  /// M channels, as long as the longest source.
  Waveform mixture;
  /// One single-channel waveform per source: its contribution at the
  /// reference mic.
  std::vector<Waveform> images;
};

/// x_m = sum_n s_n * rir[n][m], truncated to the longest source. sources has
/// one channel per source.
Mixture convolve_mix(const Waveform& sources,
                     const std::vector<std::vector<std::vector<double>>>& rirs,
                     int reference_mic = 0);

/// Default geometry: 8 x 8 x 3 m room, a linear array centred at
/// (4, 4, 1.5) with 2.83 cm spacing along x, sources 2 m from the array
/// centre at the array height. The first source's angle is drawn uniformly
/// from [0, 90] degrees, the second from [-90, 0]; further sources alternate.
RoomSpec default_room(double t60, int mics, int sources, std::uint64_t seed);

/// Key-value room description: dimensions, t60, sample_rate, rir_length,
/// max_order, mic (repeatable, "x y z"), source (repeatable).
RoomSpec read_room_spec(const std::string& path);

}  // namespace sbss

#endif  // SBSS_ROOM_HPP_
