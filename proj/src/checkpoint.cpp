#include "graphdiff/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace graphdiff::nn {

namespace {

constexpr char kMagic[4] = {'G', 'D', 'F', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("checkpoint: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_checkpoint_entries(const std::string& path,
                              const std::vector<CheckpointEntry>& entries) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    put_u32(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    std::size_t expect = 1;
    for (int d : e.dims) expect *= static_cast<std::size_t>(d);
    if (e.dims.empty() || expect != e.data.size())
      throw std::invalid_argument("checkpoint: entry '" + e.name + "' dims/data mismatch");
    os.put(static_cast<char>(e.dims.size()));
    for (int d : e.dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (double v : e.data) put_f64(os, v);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<CheckpointEntry> read_checkpoint_entries(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4)) throw std::runtime_error("checkpoint: truncated file (no magic)");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(std::string("checkpoint: version mismatch, expected GDF1 got ") +
                             std::string(magic, 4));
  const std::uint32_t count = get_u32(is);
  std::vector<CheckpointEntry> entries;
  entries.reserve(count);
  for (std::uint32_t e = 0; e < count; ++e) {
    CheckpointEntry entry;
    const std::uint32_t name_len = get_u32(is);
    entry.name.resize(name_len);
    if (!is.read(entry.name.data(), name_len))
      throw std::runtime_error("checkpoint: truncated file (entry name)");
    const int ndim = is.get();
    if (ndim == EOF || ndim < 1 || ndim > 4)
      throw std::runtime_error("checkpoint: corrupt entry header for '" + entry.name + "'");
    std::size_t total = 1;
    for (int d = 0; d < ndim; ++d) {
      entry.dims.push_back(static_cast<int>(get_u32(is)));
      total *= static_cast<std::size_t>(entry.dims.back());
    }
    entry.data.resize(total);
    for (std::size_t i = 0; i < total; ++i) entry.data[i] = get_f64(is);
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::vector<CheckpointEntry>& extra) {
  std::vector<CheckpointEntry> entries;
  for (const auto& [name, t] : store.items())
    entries.push_back({name, t.dims(), t.values()});
  const auto& ms = store.adam_m();
  const auto& vs = store.adam_v();
  if (!ms.empty()) {
    for (std::size_t p = 0; p < store.items().size(); ++p) {
      const auto& [name, t] = store.items()[p];
      entries.push_back({"opt.m." + name, t.dims(), ms[p]});
      entries.push_back({"opt.v." + name, t.dims(), vs[p]});
    }
    entries.push_back({"opt.steps", {1}, {static_cast<double>(store.adam_steps())}});
  }
  entries.insert(entries.end(), extra.begin(), extra.end());
  write_checkpoint_entries(path, entries);
}

std::vector<CheckpointEntry> load_checkpoint(const std::string& path, ParamStore& store) {
  auto entries = read_checkpoint_entries(path);
  std::vector<CheckpointEntry> extra;
  auto& ms = store.adam_m();
  auto& vs = store.adam_v();
  for (auto& e : entries) {
    if (e.name.rfind("opt.m.", 0) == 0 || e.name.rfind("opt.v.", 0) == 0) {
      const bool is_m = e.name[4] == 'm';
      const std::string pname = e.name.substr(6);
      if (ms.size() != store.items().size()) {
        ms.resize(store.items().size());
        vs.resize(store.items().size());
        for (std::size_t p = 0; p < store.items().size(); ++p) {
          ms[p].assign(store.items()[p].second.numel(), 0.0);
          vs[p].assign(store.items()[p].second.numel(), 0.0);
        }
      }
      bool found = false;
      for (std::size_t p = 0; p < store.items().size(); ++p) {
        if (store.items()[p].first == pname) {
          (is_m ? ms[p] : vs[p]) = std::move(e.data);
          found = true;
          break;
        }
      }
      if (!found)
        throw std::runtime_error("checkpoint: optimizer state for unknown parameter " + pname);
    } else if (e.name == "opt.steps") {
      store.adam_steps() = static_cast<long>(e.data.at(0));
    } else {
      bool matched = false;
      for (auto& [name, t] : store.items()) {
        if (name == e.name) {
          if (t.dims() != e.dims)
            throw std::runtime_error("checkpoint: shape mismatch for parameter " + name +
                                     ": expected " + shape_string(t.dims()) + " got " +
                                     shape_string(e.dims));
          t.values() = std::move(e.data);
          matched = true;
          break;
        }
      }
      if (!matched) extra.push_back(std::move(e));
    }
  }
  return extra;
}

std::vector<CheckpointEntry> load_checkpoint_extras(const std::string& path) {
  auto entries = read_checkpoint_entries(path);
  std::vector<CheckpointEntry> extra;
  for (auto& e : entries)
    if (e.name.rfind("opt.", 0) != 0) extra.push_back(std::move(e));
  return extra;
}

}  // namespace graphdiff::nn
