#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace glovekit {

/// FNV-1a 64-bit content digest. Used to detect changed inputs when
/// resuming a pipeline and to stamp artifacts in run manifests; not a
/// cryptographic hash.
class Fnv1a64 {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001B3ULL;
        }
    }
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

std::string to_hex(std::uint64_t v);
std::uint64_t digest_bytes(std::string_view bytes);
std::uint64_t digest_file(const std::filesystem::path& path);
std::string digest_file_hex(const std::filesystem::path& path);

} // namespace glovekit
