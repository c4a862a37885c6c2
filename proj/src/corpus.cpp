#include "glovekit/corpus.hpp"

#include <cerrno>
#include <cstring>
#include <sstream>
#include <unordered_set>

#include "glovekit/errors.hpp"
#include "glovekit/latin.hpp"

namespace glovekit {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

} // namespace

CorpusManifest CorpusManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    CorpusManifest m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_ws(line);
        if (fields.empty() || fields[0][0] == '#') continue;
        const std::string& key = fields[0];
        if (key == "lowercase") {
            if (fields.size() != 2 || (fields[1] != "true" && fields[1] != "false")) {
                throw ParseError(path.string(), lineno, "lowercase expects 'true' or 'false'");
            }
            m.lowercase = fields[1] == "true";
        } else if (key == "stop-token") {
            if (fields.size() != 2) {
                throw ParseError(path.string(), lineno, "stop-token expects exactly one token");
            }
            m.stop_tokens.insert(fields[1]);
        } else if (key == "source") {
            if (fields.size() < 2 || fields.size() > 3) {
                throw ParseError(path.string(), lineno, "source expects a path and optional repeat count");
            }
            CorpusSource src;
            std::filesystem::path p(fields[1]);
            src.path = p.is_absolute() ? p : base / p;
            if (fields.size() == 3) {
                errno = 0;
                char* end = nullptr;
                unsigned long long rep = std::strtoull(fields[2].c_str(), &end, 10);
                if (errno != 0 || end == fields[2].c_str() || *end != '\0' || rep > UINT32_MAX) {
                    throw ParseError(path.string(), lineno, "repeat count must be a nonnegative integer");
                }
                src.repeat = static_cast<std::uint32_t>(rep);
            }
            m.sources.push_back(std::move(src));
        } else {
            throw ParseError(path.string(), lineno, "unknown directive '" + key + "'");
        }
    }
    m.validate();
    return m;
}

void CorpusManifest::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& src : sources) {
        if (src.repeat < 1) {
            throw ValidationError("manifest field 'repeat' for '" + src.path.string() +
                                  "': repeat count must be >= 1");
        }
        if (!seen.insert(src.path.string()).second) {
            throw ValidationError("manifest field 'source': duplicate path '" + src.path.string() + "'");
        }
    }
}

void clean_line(const std::string& line, const CorpusManifest& manifest,
                std::vector<std::string>& tokens) {
    tokens.clear();
    std::size_t i = 0;
    std::string tok;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i == start) break;
        tok.assign(line, start, i - start);
        if (manifest.lowercase) ascii_lowercase(tok);
        if (manifest.stop_tokens.contains(tok)) continue;
        tokens.push_back(tok);
    }
}

TokenStream::TokenStream(CorpusManifest manifest) : manifest_(std::move(manifest)) {
    manifest_.validate();
    reset();
}

void TokenStream::reset() {
    source_idx_ = 0;
    pass_ = 0;
    in_.close();
    in_.clear();
    file_open_ = false;
}

bool TokenStream::advance_file() {
    // Moves to the next (source, pass) pair and opens it.
    while (source_idx_ < manifest_.sources.size()) {
        const auto& src = manifest_.sources[source_idx_];
        if (pass_ >= src.repeat) {
            ++source_idx_;
            pass_ = 0;
            continue;
        }
        in_.close();
        in_.clear();
        in_.open(src.path, std::ios::binary);
        if (!in_) {
            throw IoError("cannot open corpus file '" + src.path.string() + "': " +
                          std::strerror(errno));
        }
        ++pass_;
        file_open_ = true;
        return true;
    }
    file_open_ = false;
    return false;
}

bool TokenStream::next(std::vector<std::string>& tokens) {
    for (;;) {
        if (!file_open_) {
            if (!advance_file()) return false;
        }
        if (std::getline(in_, line_)) {
            clean_line(line_, manifest_, tokens);
            return true;
        }
        if (in_.bad()) {
            throw IoError("read error in corpus file");
        }
        file_open_ = false; // EOF; go to next pass/source
    }
}

bool MemoryCorpus::next(std::vector<std::string>& tokens) {
    if (cursor_ >= docs_.size()) return false;
    tokens = docs_[cursor_++];
    return true;
}

} // namespace glovekit
