#include "trackx/render.hpp"

#include <algorithm>

#include "trackx/error.hpp"

namespace trackx {

Playlist playlist(const Track& track, const Session& session) {
  if (!session.video) throw Error(ErrorCode::NoVideoBound, "session has no video bound");
  const VideoBinding& video = *session.video;
  Playlist out;
  for (const auto& e : track.events) {
    Tick from = e.interval.start - video.offset;
    Tick to = e.interval.end - video.offset;
    if (to <= 0 || (video.length && from >= *video.length)) {
      ++out.dropped;
      continue;
    }
    from = std::max<Tick>(from, 0);
    if (video.length) to = std::min(to, *video.length);
    out.segments.push_back({video.uri, static_cast<double>(from) / kTicksPerSecond,
                            static_cast<double>(to) / kTicksPerSecond});
  }
  return out;
}

RenderBuffer bin_events(const Track& track, Interval window, std::size_t bins,
                        std::optional<Interval> domain) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bin count must be at least 1");
  if (domain) {
    window = {std::max(window.start, domain->start), std::min(window.end, domain->end)};
  }
  if (!window.valid()) throw Error(ErrorCode::InvalidArgument, "render window is empty");

  std::vector<Tick> edges(bins + 1);
  const __int128 len = window.length();
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = window.start + static_cast<Tick>(len * static_cast<__int128>(i) /
                                                static_cast<__int128>(bins));
  }

  RenderBuffer buf;
  buf.window = window;
  buf.bins.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) buf.bins[i].span = {edges[i], edges[i + 1]};

  // Index of the bin holding tick t (t inside the window). Empty bins are
  // skipped because upper_bound lands past repeated edges.
  auto bin_of = [&](Tick t) {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), t) - edges.begin()) - 1;
  };

  auto first = std::upper_bound(track.events.begin(), track.events.end(), window.start,
                                [](Tick t, const Event& e) { return t < e.interval.end; });
  for (auto it = first; it != track.events.end() && it->interval.start < window.end; ++it) {
    const Tick from = std::max(it->interval.start, window.start);
    const Tick to = std::min(it->interval.end, window.end);
    for (std::size_t b = bin_of(from); b < bins && buf.bins[b].span.start < to; ++b) {
      RenderBin& bin = buf.bins[b];
      const Duration overlap = bin.span.overlap({from, to});
      if (overlap == 0) continue;
      bin.covered += overlap;
      if (it->payload.score) {
        bin.max_score = std::max(bin.max_score.value_or(*it->payload.score), *it->payload.score);
      }
    }
  }
  for (auto& bin : buf.bins) {
    const Duration width = bin.span.length();
    bin.coverage = width > 0 ? static_cast<double>(bin.covered) / static_cast<double>(width) : 0.0;
  }
  return buf;
}

}  // namespace trackx
