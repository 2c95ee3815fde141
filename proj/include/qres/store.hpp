#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "qres/anonet.hpp"

namespace qres::broker {

// What the broker keeps per anonymous provider. No identity fields.
struct StoredSecSla {
  std::string anonymous_id;  // hex of the challenge digest
  anon::SignedTokenList list;
  std::int64_t submitted_at = 0;  // unix seconds

  friend bool operator==(const StoredSecSla& a, const StoredSecSla& b) {
    return a.anonymous_id == b.anonymous_id && a.submitted_at == b.submitted_at && a.list.encode() == b.list.encode();
  }
};

std::string record_to_json(const StoredSecSla& r);
StoredSecSla record_from_json(std::string_view text);  // Corrupt

class SecSlaStore {
 public:
  virtual ~SecSlaStore() = default;
  virtual void put(const StoredSecSla& r) = 0;
  virtual StoredSecSla get(const std::string& anonymous_id) const = 0;  // NotFound, Corrupt
  virtual std::vector<std::string> list() const = 0;                   // sorted
};

// One JSON file per anonymous id. Writes go through a temp file, fsync and rename.
class FileStore final : public SecSlaStore {
 public:
  explicit FileStore(std::filesystem::path dir);  // Io

  void put(const StoredSecSla& r) override;
  StoredSecSla get(const std::string& anonymous_id) const override;
  std::vector<std::string> list() const override;

  std::filesystem::path path_of(const std::string& anonymous_id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex write_mu_;
};

}  // namespace qres::broker
