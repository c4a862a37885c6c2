#include "glovekit/io_util.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "glovekit/errors.hpp"

namespace glovekit {

File::File(const std::filesystem::path& path, const char* mode) : path_(path) {
    f_ = std::fopen(path.string().c_str(), mode);
    if (!f_) {
        throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    }
}

File::~File() {
    if (f_) std::fclose(f_);
}

File::File(File&& other) noexcept : f_(other.f_), path_(std::move(other.path_)) {
    other.f_ = nullptr;
}

File& File::operator=(File&& other) noexcept {
    if (this != &other) {
        if (f_) std::fclose(f_);
        f_ = other.f_;
        path_ = std::move(other.path_);
        other.f_ = nullptr;
    }
    return *this;
}

void File::close() {
    if (f_) {
        int rc = std::fclose(f_);
        f_ = nullptr;
        if (rc != 0) throw IoError("close failed for '" + path_.string() + "'");
    }
}

void File::write(const void* data, std::size_t len) {
    if (std::fwrite(data, 1, len, f_) != len) {
        throw IoError("write failed for '" + path_.string() + "': " + std::strerror(errno));
    }
}

std::size_t File::read_some(void* data, std::size_t len) {
    std::size_t n = std::fread(data, 1, len, f_);
    if (n < len && std::ferror(f_)) {
        throw IoError("read failed for '" + path_.string() + "'");
    }
    return n;
}

void File::read_exact(void* data, std::size_t len) {
    if (read_some(data, len) != len) {
        throw IoError("unexpected end of file in '" + path_.string() + "'");
    }
}

void File::seek(std::uint64_t offset) {
    if (::fseeko(f_, static_cast<off_t>(offset), SEEK_SET) != 0) {
        throw IoError("seek failed for '" + path_.string() + "'");
    }
}

std::uint64_t file_size(const std::filesystem::path& path) {
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat '" + path.string() + "': " + ec.message());
    return size;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        File f(tmp, "wb");
        f.write(content.data(), content.size());
        f.close();
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed for '" + path.string() + "': " + ec.message());
}

TempFileGuard::~TempFileGuard() {
    for (const auto& p : paths_) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
    }
}

} // namespace glovekit
