#include "idp/share/share.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "idp/util/random.hpp"

namespace idp::share {

namespace fs = std::filesystem;
using nlohmann::json;

std::string generate_id() { return util::random_token(kIdLength, util::kBase36); }

bool is_valid_id(std::string_view id) {
  return id.size() == kIdLength && id.find_first_not_of(util::kBase36) == std::string_view::npos;
}

void validate(const std::vector<File>& files) {
  if (files.empty()) throw ShareError(ErrorKind::empty, "nothing to share");
  std::size_t total = 0;
  for (const auto& f : files) total += f.name.size() + f.content.size();
  if (total > kMaxShareBytes) {
    throw ShareError(ErrorKind::too_large, "shared files exceed " + std::to_string(kMaxShareBytes) + " bytes");
  }
}

namespace {

json files_json(const std::vector<File>& files) {
  json out = json::array();
  for (const auto& f : files) out.push_back({{"name", f.name}, {"content", f.content}});
  return out;
}

std::vector<File> files_from(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("files must be an array");
  std::vector<File> out;
  for (const auto& f : j) out.push_back({f.at("name").get<std::string>(), f.at("content").get<std::string>()});
  return out;
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

}  // namespace

LocalStore::LocalStore(fs::path directory) : directory_(std::move(directory)) {}

std::string LocalStore::create(const std::vector<File>& files) {
  validate(files);
  fs::create_directories(directory_);
  const json doc = {{"created_at", now_seconds()}, {"files", files_json(files)}};
  const auto temp = directory_ / (".tmp-" + util::random_token(16, util::kHex));
  {
    std::ofstream out(temp, std::ios::binary);
    out << doc.dump();
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw std::runtime_error("cannot write share record");
    }
  }
  // A hard link fails instead of replacing an existing record, which makes
  // the id reservation atomic.
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto id = generate_id();
    std::error_code ec;
    fs::create_hard_link(temp, directory_ / (id + ".json"), ec);
    if (!ec) {
      fs::remove(temp, ec);
      return id;
    }
    if (ec != std::errc::file_exists) {
      fs::remove(temp, ec);
      throw std::runtime_error("cannot store share record: " + ec.message());
    }
  }
  std::error_code ignored;
  fs::remove(temp, ignored);
  throw std::runtime_error("cannot allocate a share id");
}

ShareRecord LocalStore::fetch(const std::string& id) {
  if (!is_valid_id(id)) throw ShareError(ErrorKind::not_found, "unknown share " + id);
  std::ifstream in(directory_ / (id + ".json"), std::ios::binary);
  if (!in) throw ShareError(ErrorKind::not_found, "unknown share " + id);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto doc = json::parse(buffer.str());
  return {id, doc.at("created_at").get<std::int64_t>(), files_from(doc.at("files"))};
}

ExternalStore::ExternalStore(std::string base_url, std::string token) : token_(std::move(token)) {
  const auto scheme = base_url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("share base_url needs a scheme: " + base_url);
  const auto slash = base_url.find('/', scheme + 3);
  origin_ = base_url.substr(0, slash);
  path_ = slash == std::string::npos ? "" : base_url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
}

namespace {

httplib::Headers auth(const std::string& token) {
  if (token.empty()) return {};
  return {{"Authorization", "Bearer " + token}};
}

}  // namespace

std::string ExternalStore::create(const std::vector<File>& files) {
  validate(files);
  httplib::Client client(origin_);
  client.set_connection_timeout(5);
  client.set_read_timeout(10);
  const json body = {{"files", files_json(files)}};
  const auto res = client.Post(path_.empty() ? "/" : path_, auth(token_), body.dump(), "application/json");
  if (!res) throw ShareError(ErrorKind::upstream, "share backend unreachable: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw ShareError(ErrorKind::upstream, "share backend answered " + std::to_string(res->status));
  }
  try {
    const auto doc = json::parse(res->body);
    auto id = doc.at("id").get<std::string>();
    if (id.empty()) throw std::invalid_argument("empty id");
    return id;
  } catch (const std::exception& e) {
    throw ShareError(ErrorKind::upstream, std::string("share backend sent an invalid answer: ") + e.what());
  }
}

ShareRecord ExternalStore::fetch(const std::string& id) {
  httplib::Client client(origin_);
  client.set_connection_timeout(5);
  client.set_read_timeout(10);
  const auto res = client.Get(path_ + "/" + httplib::detail::encode_url(id), auth(token_));
  if (!res) throw ShareError(ErrorKind::upstream, "share backend unreachable: " + httplib::to_string(res.error()));
  if (res->status == 404) throw ShareError(ErrorKind::not_found, "unknown share " + id);
  if (res->status < 200 || res->status >= 300) {
    throw ShareError(ErrorKind::upstream, "share backend answered " + std::to_string(res->status));
  }
  try {
    const auto doc = json::parse(res->body);
    return {id, doc.value("created_at", std::int64_t{0}), files_from(doc.at("files"))};
  } catch (const std::exception& e) {
    throw ShareError(ErrorKind::upstream, std::string("share backend sent an invalid answer: ") + e.what());
  }
}

}  // namespace idp::share
