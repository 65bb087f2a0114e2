#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trackx/model.hpp"

namespace trackx {

inline constexpr int kBsxFormatVersion = 1;

struct BsxDocument {
  int format_version = kBsxFormatVersion;
  Session session;
  ExtraFields extra;  // unknown top-level keys
};

// gzip-framed JSON document:
//   {format_version, session{domain, video, cursor},
//    tracks[{id{class_label,author,version}, kind, meta,
//            events[[start,end,score?,label?,attrs?]]}]}
std::string bsx_write(const BsxDocument& doc, bool gzip = true);
std::string bsx_write(const Session& session, bool gzip = true);

// Accepts gzip (magic 1f 8b) or bare JSON. Throws BadMagic, DecodeError,
// SchemaError, SchemaVersionUnsupported or InvariantViolation; never returns
// a partial session.
BsxDocument bsx_read_document(std::string_view bytes);
Session bsx_read(std::string_view bytes);

namespace gzip {

std::string compress(std::string_view data);
// Throws DecodeError on corrupt or truncated input.
std::string decompress(std::string_view data);
bool has_magic(std::string_view data);

}  // namespace gzip

// Model metadata for one track version, as listed in a manifest file.
struct ManifestEntry {
  TrackId id;
  ModelMeta model;
};

// JSON manifest: {"entries": [{class_label, author, version, commit_hash,
// commit_message, committed_at, params, sensors, window_seconds}]} or a bare
// array of entries. Entries come back ordered by class label, author, then
// dotted-numeric version. Throws BadVersionString / SchemaError.
std::vector<ManifestEntry> load_manifest(std::string_view bytes);

// Attaches metadata to matching tracks and returns one warning per entry
// without a track. Applying the same manifest twice changes nothing.
std::vector<std::string> apply_manifest(Session& session, const std::vector<ManifestEntry>& entries);

}  // namespace trackx
