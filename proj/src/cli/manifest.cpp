#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "nlslab/cli.hpp"
#include "nlslab/error.hpp"

namespace nlslab::cli {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw SpecError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw SpecError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t memory_cap_bytes() {
  std::uint64_t mb = 2048;
  if (const char* env = std::getenv("NLSLAB_MEMORY_CAP_MB")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) mb = v;
  }
  return mb * 1024ULL * 1024ULL;
}

nlohmann::json make_manifest(const Options& options, const SystemSpec& spec, const std::optional<GridSpec>& grid,
                             const std::vector<std::string>& outputs, const nlohmann::json& notes) {
  nlohmann::json m;
  m["tool"] = "nlslab";
  m["version"] = NLSLAB_VERSION;
  m["command"] = options.command;
  m["spec_source"] = options.spec_source;
  m["spec_hash"] = hex64(fnv1a(serialize_spec(spec)));
  m["dimension"] = spec.dim;
  m["seed"] = options.seed;
  if (grid) {
    m["grid"] = {{"dimension", grid->dim}, {"points_per_axis", grid->points}, {"half_length", grid->half_length}};
  } else {
    m["grid"] = nullptr;
  }
  m["outputs"] = outputs;
  m["notes"] = notes;
  return m;
}

}  // namespace nlslab::cli
