#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace herdscope::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Collects output files as temporaries inside the target directory and
/// renames them into place only on commit(). Uncommitted temporaries are
/// removed on destruction, so a failed command leaves nothing behind.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  ~OutputSet();
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  void write(const std::string& name, const std::function<void(std::ostream&)>& body);

  /// Final names, in write order.
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Digest of a staged file.
  std::string digest(const std::string& name) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

  void commit();

 private:
  std::filesystem::path temp_path(const std::string& name) const;

  std::filesystem::path dir_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

}  // namespace herdscope::cli
