#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "trackx/model.hpp"

namespace trackx {

struct PlaylistSegment {
  std::string video_uri;
  double start_seconds = 0.0;
  double end_seconds = 0.0;
};

struct Playlist {
  std::vector<PlaylistSegment> segments;
  // Events that fell entirely outside the video.
  std::size_t dropped = 0;
};

// One segment per event, mapped through the session video offset and clipped
// to the video extent. Throws NoVideoBound.
Playlist playlist(const Track& track, const Session& session);

struct RenderBin {
  Interval span;
  Duration covered = 0;  // ticks of the bin covered by events
  double coverage = 0.0;  // covered / span length
  std::optional<double> max_score;
};

struct RenderBuffer {
  Interval window;
  std::vector<RenderBin> bins;
};

// Exact per-bin coverage and max score. The window is clamped to `domain`
// when given; bin edges are start + floor(len * i / bins).
RenderBuffer bin_events(const Track& track, Interval window, std::size_t bins,
                        std::optional<Interval> domain = std::nullopt);

}  // namespace trackx
