#pragma once

// JSON views of engine values, shared by the BSX codec, the HTTP API and the
// command-line tool.

#include <json.hpp>

#include "trackx/command.hpp"
#include "trackx/error.hpp"
#include "trackx/metrics.hpp"
#include "trackx/model.hpp"
#include "trackx/render.hpp"

namespace trackx::codec {

using nlohmann::json;

json attr_value(const AttrValue& v);
AttrValue attr_value_from(const json& j);  // number or string, SchemaError otherwise

json interval(const Interval& iv);  // [start, end]
Interval interval_from(const json& j);

json track_id(const TrackId& id);
TrackId track_id_from(const json& j);

json model_meta(const ModelMeta& m);
ModelMeta model_meta_from(const json& j);

// Unknown keys land in `extra` as dumped JSON.
json track_meta(const TrackMeta& m, const ExtraFields& extra = {});
TrackMeta track_meta_from(const json& j, ExtraFields* extra = nullptr);

json metric(const Metric& m);  // null when undefined
json threshold_value(double theta);  // "+inf" / "-inf" for the sweep ends

json report(const Report& r);
json roc_curve(const RocCurve& c);
json event_score(const EventScore& s);
json playlist(const Playlist& p);
json render_buffer(const RenderBuffer& b);
json track_summary(const Track& t);
json track_info(const TrackInfo& info);
json event(const Event& e);
json effect(const Effect& e);
json error(const Error& e);

// Builds a json value from the ExtraFields text representation.
json extra_value(const std::string& text);

}  // namespace trackx::codec
