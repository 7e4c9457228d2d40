#include "idp/server/wire.hpp"

#include <stdexcept>

namespace idp::server {

using nlohmann::json;

json to_json(const lang::SourceRange& r) {
  return {{"line", r.line}, {"col", r.col}, {"end_line", r.end_line}, {"end_col", r.end_col}};
}

json to_json(const lang::Diagnostic& d) {
  json out = {{"severity", lang::to_string(d.severity)},
              {"file", d.file},
              {"range", to_json(d.range)},
              {"message", d.message}};
  if (d.severity == lang::Severity::core) out["instantiations"] = d.instantiations;
  return out;
}

json to_json(const std::vector<lang::Diagnostic>& diagnostics) {
  json out = json::array();
  for (const auto& d : diagnostics) out.push_back(to_json(d));
  return out;
}

json to_json(const run::Event& e) {
  using run::EventKind;
  json out = {{"type", run::to_string(e.kind)}};
  switch (e.kind) {
    case EventKind::out:
    case EventKind::err: out["data"] = e.text; break;
    case EventKind::ask: out["prompt"] = e.text; break;
    case EventKind::limit: out["kind"] = e.text; break;
    case EventKind::exit: out["code"] = e.code; break;
    case EventKind::viz: {
      json commands = json::array();
      for (const auto& c : e.viz) {
        switch (c.kind) {
          case run::VizCommand::Kind::grid:
            commands.push_back({{"kind", "grid"}, {"width", c.x}, {"height", c.y}});
            break;
          case run::VizCommand::Kind::cell:
            commands.push_back({{"kind", "cell"}, {"x", c.x}, {"y", c.y}, {"color", c.text}});
            break;
          case run::VizCommand::Kind::label:
            commands.push_back({{"kind", "label"}, {"x", c.x}, {"y", c.y}, {"text", c.text}});
            break;
        }
      }
      out["commands"] = std::move(commands);
      break;
    }
  }
  return out;
}

std::vector<lang::SourceFile> files_from_json(const json& files) {
  if (!files.is_array()) throw std::invalid_argument("files must be an array of {name, content}");
  std::vector<lang::SourceFile> out;
  for (const auto& f : files) {
    if (!f.is_object() || !f.contains("name") || !f.contains("content") || !f["name"].is_string() ||
        !f["content"].is_string()) {
      throw std::invalid_argument("files must be an array of {name, content}");
    }
    out.push_back({f["name"].get<std::string>(), f["content"].get<std::string>()});
  }
  return out;
}

}  // namespace idp::server
