#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

namespace camray::cli {

std::string sha256_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 unavailable");
    }
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", md[i]);
        hex += byte;
    }
    return hex;
}

json Manifest::to_json() const {
    json j;
    j["tool"] = "camray";
    j["version"] = CAMRAY_VERSION;
    j["seed"] = seed;
    j["command"] = command;
    json in = json::array();
    for (const auto &p : inputs) {
        in.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
    }
    j["inputs"] = std::move(in);
    j["outputs"] = outputs;
    return j;
}

void Manifest::write(const std::filesystem::path &path) const { write_json(path, to_json()); }

}  // namespace camray::cli
