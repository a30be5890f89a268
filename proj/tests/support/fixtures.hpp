#pragma once

#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "payattr/corpus.hpp"

namespace payattr::test {

inline Transaction txn(std::string id, std::string actor, std::string target, std::string note = "",
                       std::string created_at = "2018-01-01T00:00:00Z", TransactionKind kind = TransactionKind::payment,
                       std::int64_t likes = 0) {
  Transaction t;
  t.id = std::move(id);
  t.created_at = std::move(created_at);
  t.note = std::move(note);
  t.kind = kind;
  t.actor_id = actor;
  t.actor_name = "Name " + actor;
  t.target_id = target;
  t.target_name = "Name " + target;
  t.likes_count = likes;
  return t;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("payattr-test-" + std::to_string(rd()) + "-" +
             std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace payattr::test
