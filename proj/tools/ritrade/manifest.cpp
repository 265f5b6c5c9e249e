#include "ritrade/manifest.hpp"

#include "ritrade/stream_io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace ritrade::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path.string()));
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "ritrade";
  j["version"] = RITRADE_VERSION;
  j["command"] = m.command;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) j["config"][k] = v;
  j["workers"] = m.workers;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : m.inputs) {
    j["inputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  }
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& p : m.outputs) {
    j["outputs"].push_back({{"file", p.filename().string()}, {"sha256", sha256_file(p)}});
  }
  j["wall_s"] = m.wall_s;

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

}  // namespace ritrade::cli
