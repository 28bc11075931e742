#pragma once

// Tabular output and run manifests. Tables are comma separated with one
// header line; reals are written with 17 significant digits so values
// round-trip exactly.

#include <openssl/evp.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qrw/error.hpp"

namespace qrw {

inline constexpr const char* code_version = "qrw 1.0.0";

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_int(long long v) { return std::to_string(v); }

/// A CSV table written row by row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
        : CsvWriter(path, std::vector<std::string>(header)) {}

    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(header.size()) {
        if (!out_) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
        write_line(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) {
            throw Error(ErrorCategory::io, path_.string() + ": row has " + std::to_string(cells.size()) +
                                               " cells, header has " + std::to_string(width_));
        }
        write_line(cells);
    }

    void close() {
        out_.close();
        if (!out_) throw Error(ErrorCategory::io, "failed writing " + path_.string());
    }

private:
    void write_line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_.put(',');
            out_ << cells[i];
        }
        out_.put('\n');
    }

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

/// Lower-case hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCategory::io, "cannot read " + path.string());

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error(ErrorCategory::io, "sha256 initialisation failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string s;
    s.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        s.push_back(hex[md[i] >> 4]);
        s.push_back(hex[md[i] & 0xF]);
    }
    return s;
}

/// Record of one run: every emitted file with its digest, plus whatever
/// metadata the caller attaches.
class Manifest {
public:
    explicit Manifest(std::filesystem::path dir) : dir_(std::move(dir)) {
        doc_["code_version"] = code_version;
        doc_["files"] = nlohmann::json::array();
    }

    void add_file(const std::string& name) {
        const auto p = dir_ / name;
        doc_["files"].push_back({{"name", name},
                                 {"sha256", sha256_file(p)},
                                 {"bytes", static_cast<std::uint64_t>(std::filesystem::file_size(p))}});
    }

    nlohmann::json& doc() { return doc_; }
    const nlohmann::json& doc() const { return doc_; }

    void write(const std::string& name = "manifest.json") const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCategory::io, "cannot write " + (dir_ / name).string());
        out << doc_.dump(2) << '\n';
    }

private:
    std::filesystem::path dir_;
    nlohmann::json doc_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
    out << text;
    out.close();
    if (!out) throw Error(ErrorCategory::io, "failed writing " + path.string());
}

}  // namespace qrw
