// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rfseeker::io {

namespace fs = std::filesystem;

void atomic_write(const fs::path &path, const void *data, size_t size) {
    if (path.empty() || path.filename().empty())
        throw std::runtime_error("atomic_write: empty path");
    fs::path dir = path.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw std::runtime_error("atomic_write: cannot create directory " + dir.string());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out.write(static_cast<const char *>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("atomic_write: write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("atomic_write: rename failed for " + path.string());
    }
}

void atomic_write(const fs::path &path, const std::string &text) {
    atomic_write(path, text.data(), text.size());
}

std::vector<uint8_t> read_all(const fs::path &path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in)
        throw std::runtime_error("read_all: cannot open " + path.string());
    auto size = static_cast<size_t>(in.tellg());
    in.seekg(0);
    std::vector<uint8_t> buf(size);
    if (size > 0)
        in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(size));
    if (!in)
        throw std::runtime_error("read_all: short read on " + path.string());
    return buf;
}

std::string read_text(const fs::path &path) {
    auto bytes = read_all(path);
    return std::string(bytes.begin(), bytes.end());
}

void put_bytes(std::vector<uint8_t> &buf, const void *data, size_t size) {
    const auto *p = static_cast<const uint8_t *>(data);
    buf.insert(buf.end(), p, p + size);
}

void put_u32(std::vector<uint8_t> &buf, uint32_t v) { put_bytes(buf, &v, sizeof v); }
void put_u64(std::vector<uint8_t> &buf, uint64_t v) { put_bytes(buf, &v, sizeof v); }
void put_f32(std::vector<uint8_t> &buf, float v) { put_bytes(buf, &v, sizeof v); }

void get_bytes(const std::vector<uint8_t> &buf, size_t &pos, void *out, size_t size) {
    if (pos + size > buf.size())
        throw std::runtime_error("binary payload truncated");
    std::memcpy(out, buf.data() + pos, size);
    pos += size;
}

uint32_t get_u32(const std::vector<uint8_t> &buf, size_t &pos) {
    uint32_t v;
    get_bytes(buf, pos, &v, sizeof v);
    return v;
}

uint64_t get_u64(const std::vector<uint8_t> &buf, size_t &pos) {
    uint64_t v;
    get_bytes(buf, pos, &v, sizeof v);
    return v;
}

float get_f32(const std::vector<uint8_t> &buf, size_t &pos) {
    float v;
    get_bytes(buf, pos, &v, sizeof v);
    return v;
}

} // namespace rfseeker::io
