#include "output.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <unistd.h>

#include "herdscope/error.hpp"

namespace herdscope::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

OutputSet::~OutputSet() {
  if (committed_) return;
  for (const auto& n : names_) {
    std::error_code ec;
    std::filesystem::remove(temp_path(n), ec);
  }
}

std::filesystem::path OutputSet::temp_path(const std::string& name) const {
  return dir_ / fmt::format(".{}.tmp{}", name, static_cast<long>(::getpid()));
}

void OutputSet::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (committed_) throw std::logic_error("output set already committed");
  const auto tmp = temp_path(name);
  names_.push_back(name);
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
  body(out);
  out.flush();
  if (!out) throw ConfigError("write failed for " + (dir_ / name).string());
}

std::string OutputSet::digest(const std::string& name) const {
  return sha256_file(committed_ ? dir_ / name : temp_path(name));
}

void OutputSet::commit() {
  for (const auto& n : names_) std::filesystem::rename(temp_path(n), dir_ / n);
  committed_ = true;
}

}  // namespace herdscope::cli
