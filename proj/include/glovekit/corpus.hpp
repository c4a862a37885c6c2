#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace glovekit {

struct CorpusSource {
    std::filesystem::path path;
    std::uint32_t repeat = 1;
};

/// Declarative corpus description: which files to read, how many times
/// each is concatenated into the stream, and the token cleaning rules.
///
/// Manifest file format, one directive per line (# starts a comment):
///
///     lowercase true
///     stop-token <doc>
///     stop-token <unk>
///     source gigaword.txt 2
///     source wiki.txt
///
/// `source` takes a path (no spaces) and an optional repeat count >= 1.
/// Relative source paths resolve against the manifest's directory.
struct CorpusManifest {
    std::vector<CorpusSource> sources;
    std::unordered_set<std::string> stop_tokens;
    bool lowercase = false;

    static CorpusManifest load(const std::filesystem::path& path);
    void validate() const;
};

/// Ordered documents, each an ordered token list. Implementations must be
/// rewindable so multi-pass consumers (counting, cooccurrence, MFT sweeps)
/// can reuse one source.
class DocumentSource {
public:
    virtual ~DocumentSource() = default;
    /// Fills `tokens` with the next document; returns false at end of
    /// stream. Documents that clean to zero tokens are still yielded.
    virtual bool next(std::vector<std::string>& tokens) = 0;
    virtual void reset() = 0;
};

/// Streams a manifest's corpora: each source is emitted repeat-count
/// times, in manifest order, one document per input line. Cleaning
/// lowercases first (when configured), then drops stop-tokens, so stop
/// lists written in lowercase match regardless of input casing.
class TokenStream final : public DocumentSource {
public:
    explicit TokenStream(CorpusManifest manifest);

    bool next(std::vector<std::string>& tokens) override;
    void reset() override;

    const CorpusManifest& manifest() const { return manifest_; }

private:
    bool advance_file();

    CorpusManifest manifest_;
    std::size_t source_idx_ = 0;
    std::uint32_t pass_ = 0;
    std::ifstream in_;
    bool file_open_ = false;
    std::string line_;
};

/// In-memory documents; handy for fixtures and the python bindings.
class MemoryCorpus final : public DocumentSource {
public:
    MemoryCorpus() = default;
    explicit MemoryCorpus(std::vector<std::vector<std::string>> docs)
        : docs_(std::move(docs)) {}

    bool next(std::vector<std::string>& tokens) override;
    void reset() override { cursor_ = 0; }

    const std::vector<std::vector<std::string>>& docs() const { return docs_; }

private:
    std::vector<std::vector<std::string>> docs_;
    std::size_t cursor_ = 0;
};

/// Splits one raw line into cleaned tokens under the manifest's rules.
void clean_line(const std::string& line, const CorpusManifest& manifest,
                std::vector<std::string>& tokens);

} // namespace glovekit
