// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rfseeker::io {

static_assert(std::endian::native == std::endian::little,
              "payload serialization assumes a little-endian host");

// Write bytes to a temp file in the target directory and rename it into
// place, so readers never observe a partially written file. Throws
// std::runtime_error and removes the temp file on any failure.
void atomic_write(const std::filesystem::path &path, const void *data, size_t size);
void atomic_write(const std::filesystem::path &path, const std::string &text);

std::vector<uint8_t> read_all(const std::filesystem::path &path);
std::string read_text(const std::filesystem::path &path);

// append helpers for building binary payloads in memory
void put_u32(std::vector<uint8_t> &buf, uint32_t v);
void put_u64(std::vector<uint8_t> &buf, uint64_t v);
void put_f32(std::vector<uint8_t> &buf, float v);
void put_bytes(std::vector<uint8_t> &buf, const void *data, size_t size);

// cursor-based reads that throw std::runtime_error on truncation
uint32_t get_u32(const std::vector<uint8_t> &buf, size_t &pos);
uint64_t get_u64(const std::vector<uint8_t> &buf, size_t &pos);
float get_f32(const std::vector<uint8_t> &buf, size_t &pos);
void get_bytes(const std::vector<uint8_t> &buf, size_t &pos, void *out, size_t size);

} // namespace rfseeker::io
