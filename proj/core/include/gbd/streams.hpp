/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

namespace gbd {

// Compression containers are detected purely by the final filename
// extension, applied after the context extension (foo.cnf.gz).
bool is_compressed_path(const std::filesystem::path& path);

// Opens a file for reading, transparently decompressing .gz/.xz/.bz2.
// A corrupt or truncated archive surfaces as a DataError thrown while
// reading (the stream has badbit exceptions enabled).
std::unique_ptr<std::istream> read_maybe_compressed(const std::filesystem::path& path);

// Opens a file for writing, compressing by extension with the same codec
// set. Compressed output is byte-deterministic (fixed container header).
std::unique_ptr<std::ostream> write_maybe_compressed(const std::filesystem::path& path);

} // namespace gbd
