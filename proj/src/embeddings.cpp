#include "glovekit/embeddings.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "glovekit/errors.hpp"
#include "glovekit/io_util.hpp"

namespace glovekit {

std::string export_mode_name(ExportMode m) {
    switch (m) {
        case ExportMode::sum: return "sum";
        case ExportMode::focus: return "focus";
        case ExportMode::concat: return "concat";
    }
    return "sum";
}

ExportMode export_mode_from_name(const std::string& name) {
    if (name == "sum") return ExportMode::sum;
    if (name == "focus") return ExportMode::focus;
    if (name == "concat") return ExportMode::concat;
    throw ValidationError("unknown export mode '" + name + "' (sum|focus|concat)");
}

EmbeddingSet::EmbeddingSet(std::vector<std::string> words, std::uint32_t dim,
                           std::vector<double> matrix)
    : words_(std::move(words)), dim_(dim), matrix_(std::move(matrix)) {
    if (matrix_.size() != words_.size() * std::size_t(dim_)) {
        throw ValidationError("embedding matrix size does not match words x dim");
    }
    index_.reserve(words_.size());
    for (std::uint32_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw ValidationError("duplicate word '" + words_[i] + "' in embedding set");
        }
    }
}

std::optional<std::uint32_t> EmbeddingSet::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingSet::save_text(const std::filesystem::path& path, int precision) const {
    if (precision < 1 || precision > 17) throw ValidationError("precision must be in [1, 17]");
    File f(path, "wb");
    std::string line;
    char num[64];
    for (std::uint32_t i = 0; i < words_.size(); ++i) {
        line = words_[i];
        const auto vec = vector(i);
        for (double v : vec) {
            const int n = std::snprintf(num, sizeof num, " %.*g", precision, v);
            line.append(num, static_cast<std::size_t>(n));
        }
        line.push_back('\n');
        f.write(line.data(), line.size());
    }
    f.close();
}

EmbeddingSet EmbeddingSet::load_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vectors '" + path.string() + "'");
    std::vector<std::string> words;
    std::vector<double> matrix;
    std::uint32_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0) {
            throw ParseError(path.string(), lineno, "expected 'word v1 ... vd'");
        }
        words.push_back(line.substr(0, sp));
        std::uint32_t d = 0;
        const char* p = line.c_str() + sp;
        char* end = nullptr;
        while (*p != '\0') {
            while (*p == ' ') ++p;
            if (*p == '\0') break;
            const double v = std::strtod(p, &end);
            if (end == p) throw ParseError(path.string(), lineno, "bad vector component");
            matrix.push_back(v);
            ++d;
            p = end;
        }
        if (d == 0) throw ParseError(path.string(), lineno, "no vector components");
        if (dim == 0) {
            dim = d;
        } else if (d != dim) {
            throw ParseError(path.string(), lineno,
                             "dimension mismatch: expected " + std::to_string(dim) + ", got " +
                                 std::to_string(d));
        }
    }
    return EmbeddingSet(std::move(words), dim, std::move(matrix));
}

namespace {
constexpr char kEmbMagic[4] = {'G', 'K', 'E', 'B'};
}

void EmbeddingSet::save_binary(const std::filesystem::path& path) const {
    File f(path, "wb");
    f.write(kEmbMagic, 4);
    const std::uint32_t version = 1;
    f.write(&version, 4);
    const std::uint64_t n = words_.size();
    f.write(&n, 8);
    f.write(&dim_, 4);
    const std::uint32_t meta_count = static_cast<std::uint32_t>(metadata_.size());
    f.write(&meta_count, 4);
    auto write_str = [&](const std::string& s) {
        const std::uint32_t len = static_cast<std::uint32_t>(s.size());
        f.write(&len, 4);
        f.write(s.data(), s.size());
    };
    for (const auto& [k, v] : metadata_) {
        write_str(k);
        write_str(v);
    }
    for (const auto& w : words_) write_str(w);
    f.write(matrix_.data(), matrix_.size() * sizeof(double));
    f.close();
}

EmbeddingSet EmbeddingSet::load_binary(const std::filesystem::path& path) {
    File f(path, "rb");
    char magic[4];
    f.read_exact(magic, 4);
    if (std::memcmp(magic, kEmbMagic, 4) != 0) {
        throw IoError("'" + path.string() + "' is not a binary embedding file");
    }
    std::uint32_t version = 0;
    f.read_exact(&version, 4);
    if (version != 1) throw IoError("unsupported embedding file version");
    std::uint64_t n = 0;
    std::uint32_t dim = 0;
    std::uint32_t meta_count = 0;
    f.read_exact(&n, 8);
    f.read_exact(&dim, 4);
    f.read_exact(&meta_count, 4);
    auto read_str = [&] {
        std::uint32_t len = 0;
        f.read_exact(&len, 4);
        std::string s(len, '\0');
        f.read_exact(s.data(), len);
        return s;
    };
    std::map<std::string, std::string> metadata;
    for (std::uint32_t i = 0; i < meta_count; ++i) {
        auto k = read_str();
        metadata[k] = read_str();
    }
    std::vector<std::string> words;
    words.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) words.push_back(read_str());
    std::vector<double> matrix(static_cast<std::size_t>(n) * dim);
    f.read_exact(matrix.data(), matrix.size() * sizeof(double));
    EmbeddingSet set(std::move(words), dim, std::move(matrix));
    set.metadata() = std::move(metadata);
    return set;
}

EmbeddingSet export_embeddings(const ModelParams& params, const Vocabulary& vocab,
                               ExportMode mode) {
    if (vocab.size() != params.vocab) {
        throw ValidationError("vocabulary size does not match trained parameters");
    }
    const std::uint32_t d = params.dim;
    const std::uint32_t out_dim = mode == ExportMode::concat ? 2 * d : d;
    std::vector<std::string> words;
    words.reserve(vocab.size());
    for (std::uint32_t i = 0; i < vocab.size(); ++i) words.push_back(vocab.word(i));

    std::vector<double> matrix(static_cast<std::size_t>(vocab.size()) * out_dim);
    for (std::uint32_t i = 0; i < vocab.size(); ++i) {
        const auto wi = params.w_row(i);
        const auto ci = params.wc_row(i);
        double* out = matrix.data() + std::size_t(i) * out_dim;
        switch (mode) {
            case ExportMode::sum:
                for (std::uint32_t k = 0; k < d; ++k) out[k] = wi[k] + ci[k];
                break;
            case ExportMode::focus:
                for (std::uint32_t k = 0; k < d; ++k) out[k] = wi[k];
                break;
            case ExportMode::concat:
                for (std::uint32_t k = 0; k < d; ++k) out[k] = wi[k];
                for (std::uint32_t k = 0; k < d; ++k) out[d + k] = ci[k];
                break;
        }
    }
    return EmbeddingSet(std::move(words), out_dim, std::move(matrix));
}

} // namespace glovekit
