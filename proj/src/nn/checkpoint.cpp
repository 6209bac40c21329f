#include "fasloc/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace fasloc::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ValidationError("checkpoint: truncated file");
  return v;
}

std::string get_string(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  if (n > (1u << 20)) throw ValidationError("checkpoint: implausible string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw ValidationError("checkpoint: truncated file");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TensorList& params,
                     const std::map<std::string, std::string>& metadata) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [k, v] : metadata) {
    put_string(os, k);
    put_string(os, v);
  }
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    const Matrix& m = p.tensor->value;
    put_string(os, p.name);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint " + path.string());
  char magic[sizeof(kCheckpointMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw ValidationError("checkpoint: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw ValidationError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ck;
  const auto nmeta = get<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < nmeta; ++i) {
    auto k = get_string(is);
    ck.metadata[k] = get_string(is);
  }
  const auto count = get<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    e.name = get_string(is);
    const auto rows = get<std::uint32_t>(is);
    const auto cols = get<std::uint32_t>(is);
    e.value.resize(rows, cols);
    is.read(reinterpret_cast<char*>(e.value.data()),
            static_cast<std::streamsize>(e.value.size() * sizeof(double)));
    if (!is) throw ValidationError("checkpoint: truncated tensor " + e.name);
    ck.tensors.push_back(std::move(e));
  }
  return ck;
}

void restore(const Checkpoint& ckpt, const TensorList& params) {
  if (ckpt.tensors.size() != params.size())
    throw ValidationError("checkpoint manifest has " + std::to_string(ckpt.tensors.size()) +
                          " tensors, model expects " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = ckpt.tensors[i];
    const Matrix& dst = params[i].tensor->value;
    if (e.name != params[i].name)
      throw ValidationError("checkpoint manifest mismatch: '" + e.name + "' vs '" +
                            params[i].name + "'");
    if (e.value.rows() != dst.rows() || e.value.cols() != dst.cols())
      throw ValidationError("checkpoint shape mismatch for " + e.name);
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i].tensor->value = ckpt.tensors[i].value;
}

}  // namespace fasloc::nn
