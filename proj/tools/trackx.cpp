#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "trackx/bsx.hpp"
#include "trackx/command.hpp"
#include "trackx/error.hpp"
#include "trackx/ingest.hpp"
#include "trackx/json_codec.hpp"
#include "trackx/service.hpp"

using namespace trackx;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  }
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Tick seconds_to_ticks(double s) { return static_cast<Tick>(std::llround(s * kTicksPerSecond)); }

struct TrackSpec {
  TrackKind kind;
  TrackId id;
  std::string path;
};

// kind:class:author:version[=path]
TrackSpec parse_spec(const std::string& text, bool want_path) {
  std::string head = text, path;
  if (auto eq = text.find('='); eq != std::string::npos) {
    head = text.substr(0, eq);
    path = text.substr(eq + 1);
  }
  std::vector<std::string> parts;
  std::stringstream ss(head);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4 || (want_path && path.empty())) {
    throw Error(ErrorCode::InvalidArgument,
                "track spec must be kind:class:author:version" + std::string(want_path ? "=file.csv" : "") +
                    ", got '" + text + "'");
  }
  auto kind = parse_track_kind(parts[0]);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown track kind '" + parts[0] + "'");
  return {*kind, {parts[1], parts[2], parts[3]}, path};
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

std::function<void()> g_stop;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trackx: time-series track algebra, metrics and sessions"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a BSX session from CSV tracks");
  std::vector<std::string> specs;
  std::string out_path, manifest_path, video_uri;
  std::optional<double> eps_t;
  double eps_s = 0.05, video_offset = 0;
  std::optional<double> video_length;
  ingest->add_option("tracks", specs, "kind:class:author:version=file.csv")->required();
  ingest->add_option("-o,--output", out_path, "Output .bsx file")->required();
  ingest->add_option("--manifest", manifest_path, "Model metadata manifest (JSON)");
  ingest->add_option("--eps-t", eps_t, "Gap tolerance in seconds (default: 2x median spacing)");
  ingest->add_option("--eps-s", eps_s, "Score tolerance within a run")->capture_default_str();
  ingest->add_option("--video", video_uri, "Video URI to bind");
  ingest->add_option("--video-offset", video_offset, "Session time of video start, seconds");
  ingest->add_option("--video-length", video_length, "Video length in seconds");

  // eval
  auto* eval = app.add_subcommand("eval", "Print a metric as JSON");
  std::string eval_file, metric;
  std::vector<std::string> refs;
  eval->add_option("file", eval_file, "Session .bsx")->required();
  eval->add_option("metric", metric, "report | roc | score | jaccard")
      ->required()
      ->check(CLI::IsMember({"report", "roc", "score", "jaccard"}));
  eval->add_option("tracks", refs, "Track references (id, position, %substring, prefix)")->required();

  // exec
  auto* exec = app.add_subcommand("exec", "Run one command against a session");
  std::string exec_file, command, exec_out, user = "cli";
  exec->add_option("file", exec_file, "Session .bsx")->required();
  exec->add_option("command", command, "Command text, e.g. \"subtract 1 2\"")->required();
  exec->add_option("-o,--output", exec_out, "Write the updated session here");
  exec->add_option("--user", user, "Author of generated tracks")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Serve sessions over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> preload;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("files", preload, "Sessions to load at startup");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert between CSV and BSX");
  std::string in_path, conv_out, as_spec, track_ref;
  bool plain = false;
  convert->add_option("input", in_path)->required();
  convert->add_option("output", conv_out)->required();
  convert->add_option("--as", as_spec, "kind:class:author:version for CSV input");
  convert->add_option("--track", track_ref, "Track to export from BSX input");
  convert->add_flag("--plain", plain, "Write BSX without gzip framing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      Session session;
      for (const auto& text : specs) {
        const TrackSpec spec = parse_spec(text, true);
        CompressionConfig cfg;
        cfg.eps_s = eps_s;
        if (eps_t) cfg.eps_t = seconds_to_ticks(*eps_t);
        session.add(import_csv(read_file(spec.path), spec.kind, spec.id, cfg));
      }
      if (!video_uri.empty()) {
        VideoBinding video{video_uri, seconds_to_ticks(video_offset), std::nullopt};
        if (video_length) video.length = seconds_to_ticks(*video_length);
        session.video = video;
      }
      if (!manifest_path.empty()) {
        for (const auto& w : apply_manifest(session, load_manifest(read_file(manifest_path)))) {
          std::cerr << "warning: " << w << "\n";
        }
      }
      session.validate();
      write_file(out_path, bsx_write(session));
      std::cerr << "wrote " << session.tracks.size() << " tracks to " << out_path << "\n";
    } else if (*eval) {
      Session session = bsx_read(read_file(eval_file));
      std::string text = metric;
      for (const auto& r : refs) text += " " + r;
      const Effect e = execute(session, text);
      print(codec::effect(e)["metric"]);
    } else if (*exec) {
      Session session = bsx_read(read_file(exec_file));
      ExecContext ctx;
      ctx.user = user;
      const Effect e = execute(session, command, ctx);
      print(codec::effect(e));
      if (!exec_out.empty()) write_file(exec_out, bsx_write(session));
    } else if (*serve) {
      SessionStore store;
      Api api(store);
      for (const auto& path : preload) {
        const std::string id = store.create(bsx_read(read_file(path)));
        std::cout << "session " << id << " <- " << path << "\n";
      }
      HttpServer server(api, host, port);
      g_stop = [&server] { server.stop(); };
      std::signal(SIGINT, [](int) { g_stop(); });
      std::signal(SIGTERM, [](int) { g_stop(); });
      std::cout << "listening on http://" << host << ":" << server.port() << std::endl;
      server.run();
    } else if (*convert) {
      if (ends_with(in_path, ".csv")) {
        if (as_spec.empty()) throw Error(ErrorCode::InvalidArgument, "CSV input needs --as kind:class:author:version");
        const TrackSpec spec = parse_spec(as_spec, false);
        Session session;
        session.add(import_csv(read_file(in_path), spec.kind, spec.id));
        write_file(conv_out, bsx_write(session, !plain));
      } else {
        const Session session = bsx_read(read_file(in_path));
        if (ends_with(conv_out, ".csv")) {
          if (track_ref.empty() && session.tracks.size() != 1) {
            throw Error(ErrorCode::InvalidArgument, "session has several tracks; pick one with --track");
          }
          const Track* t = session.tracks.front().get();
          if (!track_ref.empty()) {
            const TrackRef r = resolve(session, TrackRef{track_ref}, Op::info, 0);
            t = session.find(r.ids.front());
          }
          write_file(conv_out, export_csv(*t));
        } else {
          write_file(conv_out, bsx_write(session, !plain));
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
