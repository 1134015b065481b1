#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlnum::nn {

// Flat container of all trainable parameters of one model. Slices are
// addressed by structured names ("part/layer/tensor"); the optimizer and
// gradient buffers are aligned with the same flat layout.
//
// add() may reallocate the backing vector: build the full index first, then
// take views.
class ParamStore {
public:
    struct Slice {
        std::size_t offset = 0;
        std::size_t len = 0;
    };

    std::span<double> add(const std::string& name, std::size_t len);

    bool has(std::string_view name) const { return index_.find(name) != index_.end(); }
    Slice slice(std::string_view name) const;
    std::span<double> view(std::string_view name);
    std::span<const double> view(std::string_view name) const;

    std::size_t size() const { return values_.size(); }
    std::span<double> data() { return values_; }
    std::span<const double> data() const { return values_; }
    const std::map<std::string, Slice, std::less<>>& index() const { return index_; }

    // Binary snapshot: magic, version, index map (length-prefixed UTF-8 names
    // with offsets/lengths), then raw little-endian float64 payload.
    void save(std::ostream& os) const;
    static ParamStore load(std::istream& is);
    void save_file(const std::string& path) const;
    static ParamStore load_file(const std::string& path);

private:
    std::vector<double> values_;
    std::map<std::string, Slice, std::less<>> index_;
};

}  // namespace mlnum::nn
