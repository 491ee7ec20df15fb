/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include <string>
#include <string_view>

namespace gbd {

// Incremental MD5. The instance identification format is pinned to this
// digest; see doc/FORMAT notes in the README. Never change it.
class Md5 {
public:
    Md5();
    ~Md5();
    Md5(const Md5&) = delete;
    Md5& operator=(const Md5&) = delete;

    void update(std::string_view data);
    void update(char c) { update(std::string_view(&c, 1)); }

    // Finalizes and returns the 32-char lowercase hex digest.
    // The object must not be updated afterwards.
    std::string hex();

private:
    void* ctx_;
};

std::string md5_hex(std::string_view data);

} // namespace gbd
