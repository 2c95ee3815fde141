#include "qres/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "qres/error.hpp"

namespace qres::broker {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kRecordVersion = 1;

bool valid_id(const std::string& id) {
  return id.size() == 64 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

json body_of(const StoredSecSla& r) {
  json j;
  j["version"] = kRecordVersion;
  j["anonymous_id"] = r.anonymous_id;
  j["nonce"] = to_hex(r.list.auth.nonce.bytes);
  j["challenge"] = to_hex(r.list.auth.challenge);
  j["attach_key"] = to_hex(r.list.attach_key.bytes);
  j["auditor_signature"] = to_hex(r.list.auditor_sig.bytes);
  j["submitted_at"] = r.submitted_at;
  j["encrypted_tokens"] = json::array();
  for (const auto& t : r.list.tokens) j["encrypted_tokens"].push_back(to_hex(t.bytes));
  return j;
}

std::string checksum_of(const json& body) { return to_hex(hash(as_bytes(body.dump()))); }

void sync_fd(int fd, const fs::path& p) {
  if (::fsync(fd) != 0) fail(ErrorCode::Io, "fsync " + p.string() + ": " + std::strerror(errno));
}

}  // namespace

std::string record_to_json(const StoredSecSla& r) {
  json j = body_of(r);
  j["checksum"] = checksum_of(j);
  return j.dump(2) + "\n";
}

StoredSecSla record_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Corrupt, std::string("record is not JSON: ") + e.what());
  }
  try {
    std::string sum = j.at("checksum").get<std::string>();
    json body = j;
    body.erase("checksum");
    if (checksum_of(body) != sum) fail(ErrorCode::Corrupt, "record checksum mismatch");
    if (j.at("version").get<int>() != kRecordVersion) fail(ErrorCode::Corrupt, "unsupported record version");
    StoredSecSla r;
    r.anonymous_id = j.at("anonymous_id").get<std::string>();
    r.list.auth.nonce.bytes = array_from_hex<16>(j.at("nonce").get<std::string>());
    r.list.auth.challenge = array_from_hex<32>(j.at("challenge").get<std::string>());
    r.list.attach_key.bytes = array_from_hex<32>(j.at("attach_key").get<std::string>());
    r.list.auditor_sig.bytes = array_from_hex<64>(j.at("auditor_signature").get<std::string>());
    r.submitted_at = j.at("submitted_at").get<std::int64_t>();
    for (const auto& t : j.at("encrypted_tokens")) {
      EncryptedToken et;
      et.bytes = array_from_hex<16>(t.get<std::string>());
      r.list.tokens.push_back(et);
    }
    if (r.anonymous_id != r.list.auth.anon_id()) fail(ErrorCode::Corrupt, "anonymous id does not match challenge");
    return r;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Corrupt) throw;
    fail(ErrorCode::Corrupt, e.detail());
  } catch (const std::exception& e) {
    fail(ErrorCode::Corrupt, std::string("record field: ") + e.what());
  }
}

FileStore::FileStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::Io, "cannot create store directory " + dir_.string() + ": " + ec.message());
}

fs::path FileStore::path_of(const std::string& id) const { return dir_ / (id + ".json"); }

void FileStore::put(const StoredSecSla& r) {
  if (!valid_id(r.anonymous_id)) fail(ErrorCode::Corrupt, "invalid anonymous id");
  if (r.list.tokens.empty()) fail(ErrorCode::EmptyInput, "record has no tokens");
  std::string text = record_to_json(r);
  std::lock_guard lk(write_mu_);
  fs::path final_path = path_of(r.anonymous_id);
  fs::path tmp = final_path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorCode::Io, "open " + tmp.string() + ": " + std::strerror(errno));
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = ::write(fd, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      fail(ErrorCode::Io, "write " + tmp.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  sync_fd(fd, tmp);
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) fail(ErrorCode::Io, "rename into " + final_path.string() + ": " + ec.message());
  int dfd = ::open(dir_.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

StoredSecSla FileStore::get(const std::string& id) const {
  if (!valid_id(id)) fail(ErrorCode::NotFound, "no record for '" + id + "'");
  std::ifstream in(path_of(id), std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "no record for " + id);
  std::stringstream ss;
  ss << in.rdbuf();
  auto r = record_from_json(ss.str());
  if (r.anonymous_id != id) fail(ErrorCode::Corrupt, "record file name does not match its id");
  return r;
}

std::vector<std::string> FileStore::list() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::string id = entry.path().stem().string();
    if (valid_id(id)) ids.push_back(id);
  }
  if (ec) fail(ErrorCode::Io, "list " + dir_.string() + ": " + ec.message());
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace qres::broker
