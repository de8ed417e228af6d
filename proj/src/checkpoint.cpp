#include "rearing/learn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rearing/core/errors.hpp"

namespace rearing::learn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'R', 'R', 'C', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

json tensor_entry(const std::string& name, const Tensor& t, const char* kind) {
    return json{{"name", name}, {"shape", t.shape}, {"kind", kind}};
}

struct OpenedCheckpoint {
    std::ifstream in;
    json header;
};

OpenedCheckpoint open_checkpoint(const std::string& path) {
    OpenedCheckpoint oc;
    oc.in.open(path, std::ios::binary);
    if (!oc.in) throw DataError("checkpoint: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t hlen = 0;
    oc.in.read(magic, 4);
    oc.in.read(reinterpret_cast<char*>(&version), sizeof(version));
    oc.in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (!oc.in || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError("checkpoint: " + path + " is not a checkpoint file");
    }
    if (version != kFormatVersion) {
        throw DataError("checkpoint: unsupported format version " + std::to_string(version));
    }
    if (hlen == 0 || hlen > (1u << 26)) {
        throw DataError("checkpoint: implausible header length in " + path);
    }
    std::string hbytes(static_cast<std::size_t>(hlen), '\0');
    oc.in.read(hbytes.data(), static_cast<std::streamsize>(hlen));
    if (!oc.in) throw DataError("checkpoint: truncated header in " + path);
    try {
        oc.header = json::parse(hbytes);
    } catch (const json::exception& e) {
        throw DataError("checkpoint: bad header in " + path + ": " + e.what());
    }
    return oc;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<Param*>& params,
                     const std::vector<BufferRef>& buffers, const json& meta) {
    json tensors = json::array();
    for (const Param* p : params) tensors.push_back(tensor_entry(p->name, p->w, "param"));
    for (const BufferRef& b : buffers) tensors.push_back(tensor_entry(b.first, *b.second, "buffer"));
    json header{{"tensors", tensors}, {"meta", meta}};
    const std::string hbytes = header.dump();

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("checkpoint: cannot open " + tmp);
        out.write(kMagic, 4);
        std::uint32_t version = kFormatVersion;
        std::uint64_t hlen = hbytes.size();
        out.write(reinterpret_cast<const char*>(&version), sizeof(version));
        out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
        out.write(hbytes.data(), static_cast<std::streamsize>(hbytes.size()));
        for (const Param* p : params) {
            out.write(reinterpret_cast<const char*>(p->w.data()),
                      static_cast<std::streamsize>(p->w.v.size() * sizeof(float)));
        }
        for (const BufferRef& b : buffers) {
            out.write(reinterpret_cast<const char*>(b.second->data()),
                      static_cast<std::streamsize>(b.second->v.size() * sizeof(float)));
        }
        if (!out) throw DataError("checkpoint: write failed for " + tmp);
    }
    fs::rename(tmp, path);
}

json load_checkpoint(const std::string& path, const std::vector<Param*>& params,
                     const std::vector<BufferRef>& buffers) {
    OpenedCheckpoint oc = open_checkpoint(path);
    const json& tensors = oc.header.at("tensors");
    if (tensors.size() != params.size() + buffers.size()) {
        throw DataError("checkpoint: " + path + " holds " + std::to_string(tensors.size()) +
                        " tensors, expected " + std::to_string(params.size() + buffers.size()));
    }
    auto read_into = [&](const json& entry, const std::string& name, Tensor& t) {
        if (entry.at("name").get<std::string>() != name) {
            throw DataError("checkpoint: tensor name mismatch, file has '" +
                            entry.at("name").get<std::string>() + "', network expects '" + name + "'");
        }
        std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
        if (shape != t.shape) {
            throw DataError("checkpoint: shape mismatch for " + name);
        }
        oc.in.read(reinterpret_cast<char*>(t.data()),
                   static_cast<std::streamsize>(t.v.size() * sizeof(float)));
        if (!oc.in) throw DataError("checkpoint: truncated tensor data for " + name);
    };
    std::size_t idx = 0;
    for (Param* p : params) read_into(tensors.at(idx++), p->name, p->w);
    for (const BufferRef& b : buffers) read_into(tensors.at(idx++), b.first, *b.second);
    return oc.header.value("meta", json::object());
}

json peek_checkpoint(const std::string& path) {
    OpenedCheckpoint oc = open_checkpoint(path);
    return oc.header.value("meta", json::object());
}

}  // namespace rearing::learn
