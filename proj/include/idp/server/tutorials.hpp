#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "idp/lang/resolver.hpp"
#include "idp/server/filesystem.hpp"

namespace idp::server {

struct TutorialBundle {
  std::string id;
  std::string title;
  std::string explanation;  // markdown
  std::vector<lang::SourceFile> files;
};

/// Every `<dir>/<id>/` holding a `tutorial.json` ({"title": ...}) becomes a
/// bundle with its `explanation.md` and `*.idp` files, sorted by id. Files
/// that do not check cleanly are logged, not rejected.
std::vector<TutorialBundle> load_tutorials(const FileSystem& fs, const std::filesystem::path& dir);

}  // namespace idp::server
