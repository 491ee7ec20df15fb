/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/digest.hpp"
#include "gbd/errors.hpp"

#include <openssl/evp.h>

namespace gbd {

Md5::Md5() {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_md5(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw DataError("md5: cannot initialize digest context");
    }
    ctx_ = ctx;
}

Md5::~Md5() {
    EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

void Md5::update(std::string_view data) {
    if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()) != 1) {
        throw DataError("md5: digest update failed");
    }
}

std::string Md5::hex() {
    unsigned char raw[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), raw, &len) != 1) {
        throw DataError("md5: digest finalization failed");
    }
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(digits[raw[i] >> 4]);
        out.push_back(digits[raw[i] & 0xf]);
    }
    return out;
}

std::string md5_hex(std::string_view data) {
    Md5 md;
    md.update(data);
    return md.hex();
}

} // namespace gbd
