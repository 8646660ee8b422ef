#include "hubprior/latent_io.hpp"

#include "hubprior/error.hpp"
#include "hubprior/rng.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hubprior {

namespace {

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return value;
}

} // namespace

nlohmann::json latent_metadata(const LatentSet& set) {
    nlohmann::json meta = nlohmann::json::object();
    if (set.seed()) {
        meta["seed"] = *set.seed();
        meta["rng"] = kRngAlgorithm;
        meta["gaussian"] = kGaussianMethod;
    }
    if (set.normalization() == Normalization::Sphere) {
        meta["sphere_radius"] = sphere_radius(set.dims());
    }
    if (!set.notes().empty()) {
        meta["notes"] = set.notes();
    }
    return meta;
}

std::string encode_latents(const LatentSet& set) {
    if (set.dims() > UINT32_MAX) {
        throw Error(ErrorCode::Config, "dims do not fit the LatentFile header");
    }
    const std::string meta = latent_metadata(set).dump();
    std::string out;
    out.reserve(latent_file::kHeaderSize + meta.size() + set.data().size() * 4);
    out.append(latent_file::kMagic, 4);
    put_le<std::uint32_t>(out, latent_file::kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dims()));
    put_le<std::uint64_t>(out, set.count());
    out.push_back(static_cast<char>(latent_file::kDtypeFloat32));
    out.push_back(static_cast<char>(set.normalization()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
    out += meta;
    for (float v : set.data()) {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

LatentSet decode_latents(std::string_view bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), latent_file::kMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "not a LatentFile (bad magic)");
    }
    if (bytes.size() < latent_file::kHeaderSize) {
        throw Error(ErrorCode::TruncatedPayload, "LatentFile header is truncated");
    }
    const auto version = get_le<std::uint32_t>(bytes, 4);
    if (version != latent_file::kVersion) {
        throw Error(ErrorCode::UnsupportedVersion, "unsupported LatentFile version " + std::to_string(version));
    }
    const auto dims = get_le<std::uint32_t>(bytes, 8);
    const auto count = get_le<std::uint64_t>(bytes, 12);
    const auto dtype = static_cast<std::uint8_t>(bytes[20]);
    const auto norm = static_cast<std::uint8_t>(bytes[21]);
    const auto meta_len = get_le<std::uint32_t>(bytes, 22);

    if (dtype != latent_file::kDtypeFloat32) {
        throw Error(ErrorCode::UnsupportedDtype, "unsupported dtype " + std::to_string(dtype));
    }
    if (norm > 1) {
        throw Error(ErrorCode::InvalidHeader, "unknown normalization code " + std::to_string(norm));
    }
    if (dims == 0 || count == 0) {
        throw Error(ErrorCode::InvalidHeader, "LatentFile declares zero dims or count");
    }

    const std::size_t payload_offset = latent_file::kHeaderSize + meta_len;
    if (bytes.size() < payload_offset) {
        throw Error(ErrorCode::TruncatedPayload, "LatentFile metadata is truncated");
    }
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.substr(latent_file::kHeaderSize, meta_len));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MetadataParse, std::string("metadata is not valid JSON: ") + e.what());
    }
    if (!meta.is_object()) {
        throw Error(ErrorCode::MetadataParse, "metadata must be a JSON object");
    }

    const std::size_t available = (bytes.size() - payload_offset) / 4;
    if (count > available / dims) {
        throw Error(ErrorCode::TruncatedPayload, "payload holds fewer than the declared " + std::to_string(count) +
                                                     " rows of " + std::to_string(dims));
    }
    const std::size_t scalars = static_cast<std::size_t>(count) * dims;
    if (bytes.size() != payload_offset + scalars * 4) {
        throw Error(ErrorCode::TrailingData, "LatentFile has bytes past the declared payload");
    }

    std::vector<float> data(scalars);
    for (std::size_t i = 0; i < scalars; ++i) {
        data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, payload_offset + 4 * i));
    }

    std::optional<std::uint64_t> seed;
    std::string notes;
    try {
        if (meta.contains("seed")) {
            seed = meta.at("seed").get<std::uint64_t>();
        }
        if (meta.contains("notes")) {
            notes = meta.at("notes").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MetadataParse, std::string("bad metadata field: ") + e.what());
    }

    LatentSet set(dims, std::move(data), static_cast<Normalization>(norm), seed);
    set.set_notes(std::move(notes));
    return set;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::Io, "failed reading " + path.string());
    }
    return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot create " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

void write_latents(const std::filesystem::path& path, const LatentSet& set) {
    write_file(path, encode_latents(set));
}

LatentSet read_latents(const std::filesystem::path& path) {
    return decode_latents(read_file(path));
}

} // namespace hubprior
