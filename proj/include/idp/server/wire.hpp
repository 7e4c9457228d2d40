#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idp/lang/diagnostic.hpp"
#include "idp/lang/resolver.hpp"
#include "idp/run/session.hpp"

// JSON shapes shared by the REST and WebSocket endpoints.
namespace idp::server {

nlohmann::json to_json(const lang::SourceRange& range);
nlohmann::json to_json(const lang::Diagnostic& diagnostic);
nlohmann::json to_json(const std::vector<lang::Diagnostic>& diagnostics);
nlohmann::json to_json(const run::Event& event);

/// `[{name, content}, ...]`; throws std::invalid_argument on other shapes.
std::vector<lang::SourceFile> files_from_json(const nlohmann::json& files);

}  // namespace idp::server
