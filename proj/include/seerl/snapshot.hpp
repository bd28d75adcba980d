// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_SNAPSHOT_HPP
#define SEERL_SNAPSHOT_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "seerl/errors.hpp"
#include "seerl/learner.hpp"

namespace seerl {

/// Frozen policy parameters plus the run metadata needed to place the
/// snapshot inside its training run.
struct SnapshotMeta {
  std::string run_id;
  std::string env_id;
  std::uint64_t learner_config_hash = 0;
  std::uint64_t cycle_index = 0; // 1-based
  std::uint64_t step = 0;
  double alpha0 = 0.0;
  std::uint64_t total_steps = 0; // T
  std::uint64_t num_cycles = 0;  // M
};

struct PolicySnapshot {
  PolicyParams params;
  SnapshotMeta meta;
};

namespace detail {

constexpr char kMagic[8] = {'S', 'E', 'E', 'R', 'L', 'S', 'N', 'P'};
constexpr std::uint32_t kVersion = 1;

inline std::string canonical_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Architecture parse_arch(const std::string& desc) {
  // mlp:v1;in=<n>;hidden=<n>;head=categorical|gaussian;out=<n>
  Architecture arch;
  auto field = [&desc](const std::string& key) {
    const std::string tag = key + "=";
    const auto pos = desc.find(tag);
    if (pos == std::string::npos)
      throw LengthMismatch("snapshot architecture missing field " + key);
    const auto end = desc.find(';', pos);
    return desc.substr(pos + tag.size(), end - pos - tag.size());
  };
  arch.state_dim = std::stoi(field("in"));
  arch.hidden = std::stoi(field("hidden"));
  arch.discrete = field("head") == "categorical";
  arch.action_dim = std::stoi(field("out"));
  return arch;
}

template <typename T>
void write_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw LengthMismatch("snapshot truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

} // namespace detail

/// Layout: 8-byte magic, u32 version, u32 metadata length, metadata as
/// sorted key=value lines, u64 parameter count, little-endian IEEE-754
/// doubles. Two saves of the same snapshot produce identical bytes.
inline void save_snapshot(const PolicySnapshot& snap, const std::string& path) {
  std::map<std::string, std::string> kv;
  kv["M"] = std::to_string(snap.meta.num_cycles);
  kv["T"] = std::to_string(snap.meta.total_steps);
  kv["alpha0"] = detail::canonical_double(snap.meta.alpha0);
  kv["arch"] = snap.params.arch.describe();
  kv["cycle_index"] = std::to_string(snap.meta.cycle_index);
  kv["env_id"] = snap.meta.env_id;
  kv["learner_config_hash"] = std::to_string(snap.meta.learner_config_hash);
  kv["run_id"] = snap.meta.run_id;
  kv["step"] = std::to_string(snap.meta.step);

  std::string meta;
  for (const auto& [k, v] : kv) meta += k + "=" + v + "\n";

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoFailure("cannot open for writing: " + path);
  os.write(detail::kMagic, sizeof(detail::kMagic));
  detail::write_le<std::uint32_t>(os, detail::kVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(meta.size()));
  os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  detail::write_le<std::uint64_t>(os, snap.params.values.size());
  for (double d : snap.params.values) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    detail::write_le<std::uint64_t>(os, bits);
  }
  if (!os) throw IoFailure("write failed: " + path);
}

inline PolicySnapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailure("cannot open: " + path);

  char magic[8];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, detail::kMagic, sizeof(magic)) != 0)
    throw BadMagic("not a snapshot file: " + path);
  const auto version = detail::read_le<std::uint32_t>(is);
  if (version != detail::kVersion)
    throw UnsupportedVersion("snapshot version " + std::to_string(version));

  const auto meta_len = detail::read_le<std::uint32_t>(is);
  std::string meta(meta_len, '\0');
  if (!is.read(meta.data(), meta_len))
    throw LengthMismatch("snapshot metadata truncated");

  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < meta.size()) {
    const auto nl = meta.find('\n', pos);
    const std::string line = meta.substr(pos, nl - pos);
    pos = nl == std::string::npos ? meta.size() : nl + 1;
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  PolicySnapshot snap;
  snap.meta.run_id = kv["run_id"];
  snap.meta.env_id = kv["env_id"];
  snap.meta.learner_config_hash = std::stoull(kv["learner_config_hash"]);
  snap.meta.cycle_index = std::stoull(kv["cycle_index"]);
  snap.meta.step = std::stoull(kv["step"]);
  snap.meta.alpha0 = std::stod(kv["alpha0"]);
  snap.meta.total_steps = std::stoull(kv["T"]);
  snap.meta.num_cycles = std::stoull(kv["M"]);
  snap.params.arch = detail::parse_arch(kv["arch"]);

  if (snap.params.arch.hash() != snap.meta.learner_config_hash)
    throw LengthMismatch("architecture hash mismatch in " + path);

  const auto count = detail::read_le<std::uint64_t>(is);
  if (count != snap.params.arch.param_count())
    throw LengthMismatch("parameter count " + std::to_string(count) +
                         " does not match architecture");
  snap.params.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t bits = detail::read_le<std::uint64_t>(is);
    std::memcpy(&snap.params.values[i], &bits, sizeof(double));
  }
  return snap;
}

inline std::string snapshot_filename(const std::string& run_id,
                                     std::uint64_t cycle_index) {
  return run_id + "_cycle" + std::to_string(cycle_index) + ".snap";
}

} // namespace seerl

#endif // SEERL_SNAPSHOT_HPP
