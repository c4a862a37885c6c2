#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace glovekit {

/// RAII wrapper over std::FILE with checked reads/writes.
class File {
public:
    File() = default;
    File(const std::filesystem::path& path, const char* mode);
    ~File();
    File(File&& other) noexcept;
    File& operator=(File&& other) noexcept;
    File(const File&) = delete;
    File& operator=(const File&) = delete;

    bool is_open() const { return f_ != nullptr; }
    void close();
    void write(const void* data, std::size_t len);
    std::size_t read_some(void* data, std::size_t len); // short read only at EOF
    void read_exact(void* data, std::size_t len);
    void seek(std::uint64_t offset);
    std::FILE* handle() { return f_; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::FILE* f_ = nullptr;
    std::filesystem::path path_;
};

std::uint64_t file_size(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes content to a sibling temp file, then renames over the target.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

/// Deletes the registered paths on destruction unless released; keeps
/// temporary shuffle buckets and spill runs from outliving a failed run.
class TempFileGuard {
public:
    TempFileGuard() = default;
    ~TempFileGuard();
    TempFileGuard(const TempFileGuard&) = delete;
    TempFileGuard& operator=(const TempFileGuard&) = delete;

    void add(std::filesystem::path p) { paths_.push_back(std::move(p)); }
    void release() { paths_.clear(); }

private:
    std::vector<std::filesystem::path> paths_;
};

} // namespace glovekit
