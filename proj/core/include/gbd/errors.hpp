/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include <stdexcept>
#include <string>

namespace gbd {

// Base of all gbd errors. The CLI maps subclasses to exit codes:
// SyntaxError -> 1 (usage/parse), DataError -> 2 (data).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed query text or bad command-line usage.
class SyntaxError : public Error {
public:
    explicit SyntaxError(const std::string& what) : Error(what) {}
};

// Everything wrong with the data itself: unknown features, read-only
// sources, unreadable files, corrupt streams, catalog conflicts.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

} // namespace gbd
