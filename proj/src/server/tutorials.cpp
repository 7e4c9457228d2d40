#include "idp/server/tutorials.hpp"

#include <map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace idp::server {

std::vector<TutorialBundle> load_tutorials(const FileSystem& fs, const std::filesystem::path& dir) {
  std::map<std::string, std::vector<std::string>> entries;
  if (!fs.is_directory(dir)) return {};
  for (const auto& path : fs.list(dir)) {
    const auto slash = path.find('/');
    if (slash == std::string::npos || path.find('/', slash + 1) != std::string::npos) continue;
    entries[path.substr(0, slash)].push_back(path.substr(slash + 1));
  }
  std::vector<TutorialBundle> out;
  for (const auto& [id, names] : entries) {
    const auto meta = fs.read(dir / id / "tutorial.json");
    if (!meta) continue;
    TutorialBundle bundle{id, id, {}, {}};
    try {
      bundle.title = nlohmann::json::parse(*meta).value("title", id);
    } catch (const nlohmann::json::exception& e) {
      spdlog::warn("tutorial {}: bad tutorial.json: {}", id, e.what());
    }
    bundle.explanation = fs.read(dir / id / "explanation.md").value_or("");
    for (const auto& name : names) {
      if (!name.ends_with(".idp")) continue;
      if (auto content = fs.read(dir / id / name)) bundle.files.push_back({name, *content});
    }
    for (const auto& d : lang::analyze(bundle.files).diagnostics) {
      spdlog::warn("tutorial {}: {}:{}:{}: {}: {}", id, d.file, d.range.line, d.range.col, lang::to_string(d.severity),
                   d.message);
    }
    out.push_back(std::move(bundle));
  }
  return out;
}

}  // namespace idp::server
