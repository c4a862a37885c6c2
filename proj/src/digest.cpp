#include "glovekit/digest.hpp"

#include <cstdio>
#include <vector>

#include "glovekit/errors.hpp"

namespace glovekit {

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

std::uint64_t digest_bytes(std::string_view bytes) {
    Fnv1a64 h;
    h.update(bytes);
    return h.value();
}

std::uint64_t digest_file(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw IoError("cannot open for digest: " + path.string());
    Fnv1a64 h;
    std::vector<char> buf(1 << 20);
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) {
        h.update(buf.data(), n);
    }
    bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) throw IoError("read error while digesting: " + path.string());
    return h.value();
}

std::string digest_file_hex(const std::filesystem::path& path) {
    return to_hex(digest_file(path));
}

} // namespace glovekit
