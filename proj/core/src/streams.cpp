/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/streams.hpp"
#include "gbd/errors.hpp"

#include "bzlib_decls.hpp"
#include <lzma.h>
#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

namespace gbd {
namespace {

constexpr size_t kChunk = 1 << 16;

enum class Codec { None, Gz, Xz, Bz2 };

Codec codec_for(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    if (ext == ".gz") return Codec::Gz;
    if (ext == ".xz") return Codec::Xz;
    if (ext == ".bz2") return Codec::Bz2;
    return Codec::None;
}

std::unique_ptr<std::ifstream> open_raw_in(const std::filesystem::path& path) {
    auto f = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!f->is_open()) {
        throw DataError(path.string() + ": cannot open for reading");
    }
    return f;
}

std::unique_ptr<std::ofstream> open_raw_out(const std::filesystem::path& path) {
    auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!f->is_open()) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    return f;
}

// ---------------------------------------------------------------------
// input side

class DecodeInBuf : public std::streambuf {
public:
    DecodeInBuf(std::unique_ptr<std::ifstream> src, std::string name)
        : src_(std::move(src)), name_(std::move(name)), in_(kChunk), out_(kChunk) {
        setg(out_.data(), out_.data(), out_.data());
    }

protected:
    int_type underflow() final {
        if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
        size_t n = produce(out_.data(), out_.size());
        if (n == 0) return traits_type::eof();
        setg(out_.data(), out_.data(), out_.data() + n);
        return traits_type::to_int_type(*gptr());
    }

    // Decompress up to cap bytes into out; 0 means end of stream.
    virtual size_t produce(char* out, size_t cap) = 0;

    size_t refill() {
        src_->read(in_.data(), static_cast<std::streamsize>(in_.size()));
        size_t got = static_cast<size_t>(src_->gcount());
        if (got == 0) src_eof_ = true;
        return got;
    }

    [[noreturn]] void corrupt(const char* detail) const {
        throw DataError(name_ + ": corrupt or truncated compressed stream (" + detail + ")");
    }

    std::unique_ptr<std::ifstream> src_;
    std::string name_;
    std::vector<char> in_, out_;
    bool src_eof_ = false;
    bool done_ = false;
};

class GzInBuf final : public DecodeInBuf {
public:
    GzInBuf(std::unique_ptr<std::ifstream> src, std::string name)
        : DecodeInBuf(std::move(src), std::move(name)) {
        std::memset(&strm_, 0, sizeof(strm_));
        if (inflateInit2(&strm_, 16 + MAX_WBITS) != Z_OK) corrupt("gzip init");
    }
    ~GzInBuf() override { inflateEnd(&strm_); }

private:
    size_t produce(char* out, size_t cap) override {
        if (done_) return 0;
        strm_.next_out = reinterpret_cast<Bytef*>(out);
        strm_.avail_out = static_cast<uInt>(cap);
        for (;;) {
            if (strm_.avail_in == 0 && !src_eof_) {
                size_t got = refill();
                strm_.next_in = reinterpret_cast<Bytef*>(in_.data());
                strm_.avail_in = static_cast<uInt>(got);
            }
            int rc = inflate(&strm_, Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                // gzip allows concatenated members
                if (strm_.avail_in == 0 && !src_eof_) {
                    size_t got = refill();
                    strm_.next_in = reinterpret_cast<Bytef*>(in_.data());
                    strm_.avail_in = static_cast<uInt>(got);
                }
                if (strm_.avail_in == 0 && src_eof_) {
                    done_ = true;
                    return cap - strm_.avail_out;
                }
                if (inflateReset(&strm_) != Z_OK) corrupt("gzip reset");
                continue;
            }
            if (rc == Z_OK || rc == Z_BUF_ERROR) {
                if (strm_.avail_out == 0) return cap;
                if (strm_.avail_out < cap) return cap - strm_.avail_out;
                if (strm_.avail_in == 0 && src_eof_) corrupt("unexpected end of gzip data");
                continue;
            }
            corrupt(strm_.msg ? strm_.msg : "gzip data error");
        }
    }

    z_stream strm_;
};

class XzInBuf final : public DecodeInBuf {
public:
    XzInBuf(std::unique_ptr<std::ifstream> src, std::string name)
        : DecodeInBuf(std::move(src), std::move(name)), strm_(LZMA_STREAM_INIT) {
        if (lzma_stream_decoder(&strm_, UINT64_MAX, LZMA_CONCATENATED) != LZMA_OK) {
            corrupt("xz init");
        }
    }
    ~XzInBuf() override { lzma_end(&strm_); }

private:
    size_t produce(char* out, size_t cap) override {
        if (done_) return 0;
        strm_.next_out = reinterpret_cast<uint8_t*>(out);
        strm_.avail_out = cap;
        for (;;) {
            if (strm_.avail_in == 0 && !src_eof_) {
                size_t got = refill();
                strm_.next_in = reinterpret_cast<const uint8_t*>(in_.data());
                strm_.avail_in = got;
            }
            lzma_ret rc = lzma_code(&strm_, src_eof_ ? LZMA_FINISH : LZMA_RUN);
            if (rc == LZMA_STREAM_END) {
                done_ = true;
                return cap - strm_.avail_out;
            }
            if (rc == LZMA_OK) {
                if (strm_.avail_out == 0) return cap;
                if (strm_.avail_out < cap) return cap - strm_.avail_out;
                continue;
            }
            if (rc == LZMA_BUF_ERROR) corrupt("unexpected end of xz data");
            corrupt("xz data error");
        }
    }

    lzma_stream strm_;
};

class Bz2InBuf final : public DecodeInBuf {
public:
    Bz2InBuf(std::unique_ptr<std::ifstream> src, std::string name)
        : DecodeInBuf(std::move(src), std::move(name)) {
        std::memset(&strm_, 0, sizeof(strm_));
        if (BZ2_bzDecompressInit(&strm_, 0, 0) != BZ_OK) corrupt("bzip2 init");
        live_ = true;
    }
    ~Bz2InBuf() override {
        if (live_) BZ2_bzDecompressEnd(&strm_);
    }

private:
    size_t produce(char* out, size_t cap) override {
        if (done_) return 0;
        strm_.next_out = out;
        strm_.avail_out = static_cast<unsigned>(cap);
        for (;;) {
            if (strm_.avail_in == 0 && !src_eof_) {
                size_t got = refill();
                strm_.next_in = in_.data();
                strm_.avail_in = static_cast<unsigned>(got);
            }
            int rc = BZ2_bzDecompress(&strm_);
            if (rc == BZ_STREAM_END) {
                // concatenated .bz2 members
                if (strm_.avail_in == 0 && !src_eof_) {
                    size_t got = refill();
                    strm_.next_in = in_.data();
                    strm_.avail_in = static_cast<unsigned>(got);
                }
                if (strm_.avail_in == 0 && src_eof_) {
                    done_ = true;
                    return cap - strm_.avail_out;
                }
                char* next_in = strm_.next_in;
                unsigned avail_in = strm_.avail_in;
                char* next_out = strm_.next_out;
                unsigned avail_out = strm_.avail_out;
                BZ2_bzDecompressEnd(&strm_);
                std::memset(&strm_, 0, sizeof(strm_));
                if (BZ2_bzDecompressInit(&strm_, 0, 0) != BZ_OK) corrupt("bzip2 reinit");
                strm_.next_in = next_in;
                strm_.avail_in = avail_in;
                strm_.next_out = next_out;
                strm_.avail_out = avail_out;
                continue;
            }
            if (rc == BZ_OK) {
                if (strm_.avail_out == 0) return cap;
                if (strm_.avail_out < cap) return cap - strm_.avail_out;
                if (strm_.avail_in == 0 && src_eof_) corrupt("unexpected end of bzip2 data");
                continue;
            }
            corrupt("bzip2 data error");
        }
    }

    bz_stream strm_;
    bool live_ = false;
};

class DecodedIStream final : public std::istream {
public:
    DecodedIStream(std::unique_ptr<DecodeInBuf> buf) : std::istream(buf.get()), buf_(std::move(buf)) {
        exceptions(std::ios::badbit); // propagate DataError out of underflow
    }

private:
    std::unique_ptr<DecodeInBuf> buf_;
};

class PlainIStream final : public std::istream {
public:
    PlainIStream(std::unique_ptr<std::ifstream> f) : std::istream(f->rdbuf()), file_(std::move(f)) {}

private:
    std::unique_ptr<std::ifstream> file_;
};

// ---------------------------------------------------------------------
// output side

class EncodeOutBuf : public std::streambuf {
public:
    EncodeOutBuf(std::unique_ptr<std::ofstream> dst)
        : dst_(std::move(dst)), pending_(kChunk), out_(kChunk) {
        setp(pending_.data(), pending_.data() + pending_.size());
    }

protected:
    int_type overflow(int_type ch) final {
        push(false);
        if (ch != traits_type::eof()) {
            *pptr() = traits_type::to_char_type(ch);
            pbump(1);
        }
        return 0;
    }

    int sync() final {
        push(false);
        return 0;
    }

    // Encode the pending input; finish closes the codec stream.
    virtual void encode(const char* data, size_t n, bool finish) = 0;

    void push(bool finish) {
        size_t n = static_cast<size_t>(pptr() - pbase());
        encode(pbase(), n, finish);
        setp(pending_.data(), pending_.data() + pending_.size());
    }

    void emit(const char* data, size_t n) {
        dst_->write(data, static_cast<std::streamsize>(n));
    }

    std::unique_ptr<std::ofstream> dst_;
    std::vector<char> pending_, out_;
};

class GzOutBuf final : public EncodeOutBuf {
public:
    GzOutBuf(std::unique_ptr<std::ofstream> dst) : EncodeOutBuf(std::move(dst)) {
        std::memset(&strm_, 0, sizeof(strm_));
        if (deflateInit2(&strm_, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8,
                         Z_DEFAULT_STRATEGY) != Z_OK) {
            throw DataError("gzip encoder init failed");
        }
        // fixed header fields keep compressed outputs byte-deterministic
        std::memset(&header_, 0, sizeof(header_));
        header_.os = 3;
        deflateSetHeader(&strm_, &header_);
    }

    ~GzOutBuf() override {
        try {
            push(true);
        } catch (...) {
        }
        deflateEnd(&strm_);
    }

private:
    void encode(const char* data, size_t n, bool finish) override {
        strm_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
        strm_.avail_in = static_cast<uInt>(n);
        do {
            strm_.next_out = reinterpret_cast<Bytef*>(out_.data());
            strm_.avail_out = static_cast<uInt>(out_.size());
            int rc = deflate(&strm_, finish ? Z_FINISH : Z_NO_FLUSH);
            if (rc == Z_STREAM_ERROR) throw DataError("gzip encoder failure");
            emit(out_.data(), out_.size() - strm_.avail_out);
            if (finish && rc == Z_STREAM_END) break;
        } while (strm_.avail_in > 0 || (finish && true));
    }

    z_stream strm_;
    gz_header header_;
};

class XzOutBuf final : public EncodeOutBuf {
public:
    XzOutBuf(std::unique_ptr<std::ofstream> dst)
        : EncodeOutBuf(std::move(dst)), strm_(LZMA_STREAM_INIT) {
        if (lzma_easy_encoder(&strm_, 6, LZMA_CHECK_CRC64) != LZMA_OK) {
            throw DataError("xz encoder init failed");
        }
    }

    ~XzOutBuf() override {
        try {
            push(true);
        } catch (...) {
        }
        lzma_end(&strm_);
    }

private:
    void encode(const char* data, size_t n, bool finish) override {
        strm_.next_in = reinterpret_cast<const uint8_t*>(data);
        strm_.avail_in = n;
        for (;;) {
            strm_.next_out = reinterpret_cast<uint8_t*>(out_.data());
            strm_.avail_out = out_.size();
            lzma_ret rc = lzma_code(&strm_, finish ? LZMA_FINISH : LZMA_RUN);
            if (rc != LZMA_OK && rc != LZMA_STREAM_END) throw DataError("xz encoder failure");
            emit(out_.data(), out_.size() - strm_.avail_out);
            if (finish ? rc == LZMA_STREAM_END : strm_.avail_in == 0) break;
        }
    }

    lzma_stream strm_;
};

class Bz2OutBuf final : public EncodeOutBuf {
public:
    Bz2OutBuf(std::unique_ptr<std::ofstream> dst) : EncodeOutBuf(std::move(dst)) {
        std::memset(&strm_, 0, sizeof(strm_));
        if (BZ2_bzCompressInit(&strm_, 9, 0, 0) != BZ_OK) {
            throw DataError("bzip2 encoder init failed");
        }
        live_ = true;
    }

    ~Bz2OutBuf() override {
        try {
            push(true);
        } catch (...) {
        }
        if (live_) BZ2_bzCompressEnd(&strm_);
    }

private:
    void encode(const char* data, size_t n, bool finish) override {
        strm_.next_in = const_cast<char*>(data);
        strm_.avail_in = static_cast<unsigned>(n);
        for (;;) {
            strm_.next_out = out_.data();
            strm_.avail_out = static_cast<unsigned>(out_.size());
            int rc = BZ2_bzCompress(&strm_, finish ? BZ_FINISH : BZ_RUN);
            if (rc < 0) throw DataError("bzip2 encoder failure");
            emit(out_.data(), out_.size() - strm_.avail_out);
            if (finish ? rc == BZ_STREAM_END : strm_.avail_in == 0) break;
        }
    }

    bz_stream strm_;
    bool live_ = false;
};

class EncodedOStream final : public std::ostream {
public:
    EncodedOStream(std::unique_ptr<EncodeOutBuf> buf) : std::ostream(buf.get()), buf_(std::move(buf)) {}

private:
    std::unique_ptr<EncodeOutBuf> buf_;
};

class PlainOStream final : public std::ostream {
public:
    PlainOStream(std::unique_ptr<std::ofstream> f) : std::ostream(f->rdbuf()), file_(std::move(f)) {}

private:
    std::unique_ptr<std::ofstream> file_;
};

} // namespace

bool is_compressed_path(const std::filesystem::path& path) {
    return codec_for(path) != Codec::None;
}

std::unique_ptr<std::istream> read_maybe_compressed(const std::filesystem::path& path) {
    auto raw = open_raw_in(path);
    switch (codec_for(path)) {
    case Codec::Gz:
        return std::make_unique<DecodedIStream>(std::make_unique<GzInBuf>(std::move(raw), path.string()));
    case Codec::Xz:
        return std::make_unique<DecodedIStream>(std::make_unique<XzInBuf>(std::move(raw), path.string()));
    case Codec::Bz2:
        return std::make_unique<DecodedIStream>(std::make_unique<Bz2InBuf>(std::move(raw), path.string()));
    case Codec::None:
        break;
    }
    return std::make_unique<PlainIStream>(std::move(raw));
}

std::unique_ptr<std::ostream> write_maybe_compressed(const std::filesystem::path& path) {
    auto raw = open_raw_out(path);
    switch (codec_for(path)) {
    case Codec::Gz:
        return std::make_unique<EncodedOStream>(std::make_unique<GzOutBuf>(std::move(raw)));
    case Codec::Xz:
        return std::make_unique<EncodedOStream>(std::make_unique<XzOutBuf>(std::move(raw)));
    case Codec::Bz2:
        return std::make_unique<EncodedOStream>(std::make_unique<Bz2OutBuf>(std::move(raw)));
    case Codec::None:
        break;
    }
    return std::make_unique<PlainOStream>(std::move(raw));
}

} // namespace gbd
