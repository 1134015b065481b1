#include "mlnum/nn/param_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mlnum::nn {

namespace {

constexpr char kMagic[8] = {'M', 'L', 'N', 'P', 'A', 'R', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte-swapping not implemented");

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("truncated parameter snapshot");
    return v;
}

}  // namespace

std::span<double> ParamStore::add(const std::string& name, std::size_t len) {
    if (index_.count(name)) throw std::invalid_argument("duplicate slice name: " + name);
    const Slice s{values_.size(), len};
    index_.emplace(name, s);
    values_.resize(values_.size() + len, 0.0);
    return std::span<double>(values_).subspan(s.offset, s.len);
}

ParamStore::Slice ParamStore::slice(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw std::invalid_argument("unknown slice name: " + std::string(name));
    return it->second;
}

std::span<double> ParamStore::view(std::string_view name) {
    const Slice s = slice(name);
    return std::span<double>(values_).subspan(s.offset, s.len);
}

std::span<const double> ParamStore::view(std::string_view name) const {
    const Slice s = slice(name);
    return std::span<const double>(values_).subspan(s.offset, s.len);
}

void ParamStore::save(std::ostream& os) const {
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(index_.size()));
    for (const auto& [name, s] : index_) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint64_t>(os, s.offset);
        put<std::uint64_t>(os, s.len);
    }
    put<std::uint64_t>(os, values_.size());
    os.write(reinterpret_cast<const char*>(values_.data()),
             static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

ParamStore ParamStore::load(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a parameter snapshot (bad magic)");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw std::runtime_error("unsupported snapshot version");

    ParamStore ps;
    const auto count = get<std::uint32_t>(is);
    std::size_t expected = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = get<std::uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const auto offset = get<std::uint64_t>(is);
        const auto len = get<std::uint64_t>(is);
        ps.index_.emplace(std::move(name), Slice{offset, len});
        expected += len;
    }
    const auto total = get<std::uint64_t>(is);
    if (total != expected) throw std::runtime_error("snapshot index does not cover payload");
    ps.values_.resize(total);
    is.read(reinterpret_cast<char*>(ps.values_.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!is) throw std::runtime_error("truncated parameter snapshot payload");
    return ps;
}

void ParamStore::save_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    save(f);
}

ParamStore ParamStore::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return load(f);
}

}  // namespace mlnum::nn
