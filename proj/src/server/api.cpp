#include "idp/server/api.hpp"

#include <spdlog/spdlog.h>

#include <nlohmann/json.hpp>

#include "idp/engine/inference.hpp"
#include "idp/server/wire.hpp"

namespace idp::server {

using nlohmann::json;

namespace {

HttpResponse reply(int status, const json& body) { return {status, "application/json", body.dump()}; }
HttpResponse error(int status, const std::string& message) { return reply(status, {{"error", message}}); }

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json parse_body(const HttpRequest& r) {
  try {
    auto doc = json::parse(r.body);
    if (!doc.is_object()) throw BadRequest("request body must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("invalid JSON: ") + e.what());
  }
}

std::string string_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string()) throw BadRequest(std::string("missing string field \"") + key + "\"");
  return doc[key].get<std::string>();
}

int int_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw BadRequest(std::string("missing integer field \"") + key + "\"");
  }
  return doc[key].get<int>();
}

std::vector<lang::SourceFile> files_field(const json& doc) {
  if (!doc.contains("files")) throw BadRequest("missing field \"files\"");
  try {
    return files_from_json(doc["files"]);
  } catch (const std::invalid_argument& e) {
    throw BadRequest(e.what());
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 &&
               hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

const char* content_type(const std::string& path) {
  static const std::pair<const char*, const char*> types[] = {
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"}, {".mjs", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"}, {".svg", "image/svg+xml"},
      {".png", "image/png"},                 {".ico", "image/x-icon"},     {".md", "text/markdown"},
      {".idp", "text/plain; charset=utf-8"}, {".txt", "text/plain; charset=utf-8"}};
  for (const auto& [ext, type] : types) {
    if (path.ends_with(ext)) return type;
  }
  return "application/octet-stream";
}

json files_json(const std::vector<lang::SourceFile>& files) {
  json out = json::array();
  for (const auto& f : files) out.push_back({{"name", f.name}, {"content", f.content}});
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_query(std::string_view query) {
  std::map<std::string, std::string> out;
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto part = query.substr(0, amp);
    const auto eq = part.find('=');
    if (!part.empty()) {
      out[percent_decode(part.substr(0, eq))] = eq == std::string_view::npos ? "" : percent_decode(part.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return out;
}

Api::Api(ServerConfig config, FileSystem& fs, std::unique_ptr<share::Backend> share)
    : config_(std::move(config)), fs_(fs), share_(std::move(share)) {
  tutorials_ = load_tutorials(fs_, config_.tutorials);
}

HttpResponse Api::handle(const HttpRequest& r) const {
  const auto q = r.target.find('?');
  const std::string path = percent_decode(std::string_view(r.target).substr(0, q));
  const auto query = parse_query(q == std::string::npos ? "" : std::string_view(r.target).substr(q + 1));
  const auto& m = r.method;
  try {
    if (!path.starts_with("/api/")) {
      if (m != "GET" && m != "HEAD") return error(405, "method not allowed");
      return static_file(path);
    }
    if (r.body.size() > config_.max_payload_bytes) return error(413, "payload too large");
    if (path == "/api/files" && m == "GET") return files(r);
    if (path == "/api/file" && m == "GET") return file_get(query);
    if (path == "/api/file" && m == "PUT") return file_put(r);
    if (path == "/api/check" && m == "POST") return check(r);
    if (path == "/api/inference" && m == "POST") return inference(r);
    if (path == "/api/tokens" && m == "POST") return tokens(r);
    if (path == "/api/symbols" && m == "POST") return symbols(r);
    if (path == "/api/indent" && m == "POST") return indent(r);
    if (path == "/api/complete" && m == "POST") return complete(r);
    if (path == "/api/snippets" && m == "GET") return snippets();
    if (path == "/api/share" && m == "POST") return share_create(r);
    if (path.starts_with("/api/share/") && m == "GET") return share_fetch(path.substr(11));
    if (path == "/api/tutorials" && m == "GET") return tutorials("");
    if (path.starts_with("/api/tutorials/") && m == "GET") return tutorials(path.substr(15));
    static const char* known[] = {"/api/files", "/api/file", "/api/check", "/api/inference", "/api/tokens",
                                  "/api/symbols", "/api/indent", "/api/complete", "/api/snippets", "/api/share",
                                  "/api/tutorials"};
    for (const auto* k : known) {
      if (path == k || (path.starts_with(k) && path[std::string_view(k).size()] == '/')) {
        return error(405, "method not allowed");
      }
    }
    return error(404, "no such endpoint");
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", m, path, e.what());
    return error(500, "internal error");
  }
}

HttpResponse Api::files(const HttpRequest&) const {
  json names = json::array();
  for (const auto& n : fs_.list(config_.workspace)) {
    if (n.starts_with("shares/")) continue;
    names.push_back(n);
  }
  return reply(200, {{"files", names}});
}

HttpResponse Api::file_get(const std::map<std::string, std::string>& query) const {
  const auto it = query.find("path");
  if (it == query.end()) return error(400, "missing query parameter path");
  const auto full = resolve_inside(config_.workspace, it->second);
  if (!full) return error(400, "path must stay inside the workspace");
  const auto content = fs_.read(*full);
  if (!content) return error(404, "no such file");
  return reply(200, {{"path", it->second}, {"content", *content}});
}

HttpResponse Api::file_put(const HttpRequest& r) const {
  if (config_.mode == Mode::online) return error(403, "the workspace is read-only in online mode");
  const auto doc = parse_body(r);
  const auto path = string_field(doc, "path");
  const auto content = string_field(doc, "content");
  const auto full = resolve_inside(config_.workspace, path);
  if (!full) return error(400, "path must stay inside the workspace");
  if (fs_.is_directory(*full)) return error(400, "path names a directory");
  fs_.write_atomic(*full, content);
  return reply(200, {{"path", path}});
}

HttpResponse Api::check(const HttpRequest& r) const {
  const auto files = files_field(parse_body(r));
  return reply(200, {{"diagnostics", to_json(lang::analyze(files).diagnostics)}});
}

HttpResponse Api::inference(const HttpRequest& r) const {
  const auto doc = parse_body(r);
  const auto files = files_field(doc);
  const auto kind = string_field(doc, "kind");
  if (kind != "modelexpand" && kind != "propagate" && kind != "unsatcore") {
    return error(400, "kind must be modelexpand, propagate or unsatcore");
  }
  const auto theory_name = string_field(doc, "theory");
  const auto structure_name = string_field(doc, "structure");
  std::size_t max_models = 1;
  if (doc.contains("max_models")) {
    if (!doc["max_models"].is_number_integer() || doc["max_models"].get<std::int64_t>() < 1) {
      throw BadRequest("max_models must be a positive integer");
    }
    max_models = doc["max_models"].get<std::size_t>();
  }
  max_models = std::min(max_models, config_.limits.max_models);

  const auto analysis = lang::analyze(files);
  if (lang::has_errors(analysis.diagnostics)) {
    return reply(422, {{"error", "the files have errors"}, {"diagnostics", to_json(analysis.diagnostics)}});
  }
  const auto& program = *analysis.program;
  const auto* theory = program.theory(theory_name);
  const auto* block = program.structure(structure_name);
  auto missing = [](const std::string& what) {
    return reply(422, {{"error", what}, {"diagnostics", json::array()}});
  };
  if (!theory) return missing("unknown theory " + theory_name);
  if (!block) return missing("unknown structure " + structure_name);
  if (theory->vocabulary.text != block->vocabulary.text) {
    return missing("theory " + theory_name + " and structure " + structure_name + " use different vocabularies");
  }

  engine::Budget budget;
  budget.limits.ground_atoms_max = config_.limits.ground_atoms_max;
  budget.limits.max_decisions = config_.limits.max_decisions;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (config_.limits.wall_ms > 0) {
    deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.limits.wall_ms);
  }
  budget.stop = cancel_.token(deadline);

  try {
    const auto structure = engine::structure_from(program, *block);
    if (kind == "modelexpand") {
      json models = json::array();
      for (const auto& m : engine::modelexpand(*theory, structure, max_models, budget)) models.push_back(engine::render(m));
      const bool satisfiable = !models.empty();
      return reply(200, {{"kind", kind}, {"satisfiable", satisfiable}, {"models", models}});
    }
    if (kind == "propagate") {
      const auto refined = engine::propagate(*theory, structure, budget);
      json out = {{"kind", kind}, {"consistent", refined.has_value()}};
      if (refined) out["structure"] = engine::render(*refined);
      return reply(200, out);
    }
    const auto core = engine::unsatcore(*theory, structure, budget);
    if (!core) return reply(200, {{"kind", kind}, {"satisfiable", true}});
    // One diagnostic per sentence, listing its instantiations in the core.
    std::vector<lang::Diagnostic> diagnostics;
    std::map<int, std::size_t> by_sentence;
    for (const auto& item : core->items) {
      auto [it, fresh] = by_sentence.try_emplace(item.sentence, diagnostics.size());
      if (fresh) {
        diagnostics.push_back({lang::Severity::core, core->file, item.range,
                               "this sentence is part of an unsat core of theory " + core->theory, {}});
      }
      if (!item.substitution_text.empty()) diagnostics[it->second].instantiations.push_back(item.substitution_text);
    }
    return reply(200, {{"kind", kind}, {"satisfiable", false}, {"diagnostics", to_json(diagnostics)}});
  } catch (const engine::LimitError& e) {
    if (e.kind() == engine::LimitKind::killed) return error(503, "the server is shutting down");
    return reply(422, {{"error", "limit exceeded"}, {"limit", engine::to_string(e.kind())}});
  }
}

HttpResponse Api::tokens(const HttpRequest& r) const {
  const auto text = string_field(parse_body(r), "text");
  const auto toks = lang::tokenize(text);
  json tokens = json::array();
  for (const auto& t : toks) {
    tokens.push_back({{"kind", lang::to_string(t.kind)}, {"lexeme", t.lexeme}, {"range", to_json(t.range())}});
  }
  json spans = json::array();
  for (const auto& s : editor::classify(toks)) spans.push_back({{"range", to_json(s.range)}, {"class", s.css_class}});
  return reply(200, {{"tokens", tokens}, {"spans", spans}});
}

HttpResponse Api::symbols(const HttpRequest& r) const {
  const auto doc = parse_body(r);
  const auto text = string_field(doc, "text");
  if (doc.value("reverse", false)) return reply(200, {{"text", editor::restore_symbols(text)}});
  const auto d = editor::replace_symbols(text);
  return reply(200, {{"text", d.text}, {"position_map", d.position_map}});
}

HttpResponse Api::indent(const HttpRequest& r) const {
  const auto doc = parse_body(r);
  const auto text = string_field(doc, "text");
  if (doc.contains("line")) {
    const int line = int_field(doc, "line");
    if (line < 1 || line > lang::end_of(text).line) throw BadRequest("line out of range");
    return reply(200, {{"column", editor::indent_line(text, line)}});
  }
  return reply(200, {{"text", editor::reindent(text)}});
}

HttpResponse Api::complete(const HttpRequest& r) const {
  const auto doc = parse_body(r);
  const auto text = string_field(doc, "text");
  const lang::Position cursor{int_field(doc, "line"), int_field(doc, "col")};
  json out = json::array();
  for (const auto& c : editor::completions(text, cursor, all_snippets())) {
    out.push_back({{"label", c.label},
                   {"kind", c.kind == editor::Completion::Kind::snippet ? "snippet" : "word"},
                   {"insert_text", c.insert_text},
                   {"description", c.description}});
  }
  return reply(200, {{"candidates", out}});
}

std::vector<editor::Snippet> Api::all_snippets() const {
  auto out = editor::builtin_snippets();
  if (const auto text = fs_.read(config_.workspace / "snippets.json")) {
    try {
      for (auto& s : editor::load_snippets(*text)) {
        std::erase_if(out, [&](const editor::Snippet& b) { return b.trigger == s.trigger; });
        out.push_back(std::move(s));
      }
    } catch (const std::invalid_argument& e) {
      spdlog::warn("snippets.json ignored: {}", e.what());
    }
  }
  return out;
}

HttpResponse Api::snippets() const {
  json out = json::array();
  for (const auto& s : all_snippets()) {
    out.push_back({{"trigger", s.trigger}, {"body", s.body}, {"description", s.description}});
  }
  return reply(200, {{"snippets", out}});
}

HttpResponse Api::share_create(const HttpRequest& r) const {
  if (!share_) return error(503, "sharing is not configured");
  if (config_.mode == Mode::online && config_.share.backend == ShareConfig::Backend::local) {
    return error(403, "the local share store is not writable in online mode");
  }
  const auto files = files_field(parse_body(r));
  std::vector<share::File> shared;
  for (const auto& f : files) shared.push_back({f.name, f.content});
  try {
    const auto id = share_->create(shared);
    const auto origin = config_.public_url.empty() ? "http://" + r.host : config_.public_url;
    return reply(200, {{"id", id}, {"url", origin + "/#share=" + id}});
  } catch (const share::ShareError& e) {
    switch (e.kind()) {
      case share::ErrorKind::too_large: return error(413, e.what());
      case share::ErrorKind::empty: return error(400, e.what());
      case share::ErrorKind::not_found: return error(404, e.what());
      case share::ErrorKind::upstream: return error(502, e.what());
    }
    return error(500, e.what());
  }
}

HttpResponse Api::share_fetch(const std::string& id) const {
  if (!share_) return error(503, "sharing is not configured");
  try {
    const auto record = share_->fetch(id);
    std::vector<lang::SourceFile> files;
    for (const auto& f : record.files) files.push_back({f.name, f.content});
    return reply(200, {{"id", record.id}, {"created_at", record.created_at}, {"files", files_json(files)}});
  } catch (const share::ShareError& e) {
    if (e.kind() == share::ErrorKind::upstream) return error(502, e.what());
    return error(404, e.what());
  }
}

HttpResponse Api::tutorials(const std::string& id) const {
  if (id.empty()) {
    json list = json::array();
    for (const auto& t : tutorials_) list.push_back({{"id", t.id}, {"title", t.title}});
    return reply(200, {{"tutorials", list}});
  }
  for (const auto& t : tutorials_) {
    if (t.id == id) {
      return reply(200, {{"id", t.id}, {"title", t.title}, {"explanation", t.explanation}, {"files", files_json(t.files)}});
    }
  }
  return error(404, "no such tutorial");
}

HttpResponse Api::static_file(const std::string& path) const {
  std::string rel = path.substr(1);
  if (rel.empty() || rel.ends_with("/")) rel += "index.html";
  const auto full = resolve_inside(config_.web_root, rel);
  if (!full) return {404, "text/plain; charset=utf-8", "not found\n"};
  const auto content = fs_.read(*full);
  if (!content) return {404, "text/plain; charset=utf-8", "not found\n"};
  return {200, content_type(rel), *content};
}

}  // namespace idp::server
